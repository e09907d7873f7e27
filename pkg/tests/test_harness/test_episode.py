"""
Tests for the episode runner
"""
import json

import pytest

from src.config.run_config import RunConfig
from src.connectors.base import ReasoningBackend
from src.harness.artifacts import RunArtifacts
from src.harness.episode import prepare_map, run_episode, select_target
from src.utils.errors import BackendError


class UnreachableBackend(ReasoningBackend):
    name = 'unreachable'

    def query(self, messages):
        raise BackendError("connection refused")


@pytest.fixture
def scenario(make_scenario):
    return make_scenario()


class TestRunEpisode:
    """Test full episodes on the two-room map"""

    def test_oracle_succeeds(self, scenario, tmp_path):
        """Test the oracle pipeline finds and stops at the bed"""
        artifacts = RunArtifacts(tmp_path / 'run')
        result = run_episode(scenario, RunConfig(), artifacts)

        assert result.error is None
        assert result.success
        assert result.stopped
        assert result.detected
        assert 0.0 < result.spl <= 1.0
        assert result.provenance == 'single:oracle'
        assert result.target.point.x > 5.0
        assert result.steps <= scenario.max_steps
        records = artifacts.read_trajectory(scenario.id)
        assert len(records) == result.steps
        assert records[-1]['action'] == 'stop'

    def test_reproducible(self, scenario):
        """Test the same seed gives the same episode"""
        a = run_episode(scenario, RunConfig())
        b = run_episode(scenario, RunConfig())

        assert a.steps == b.steps
        assert a.target == b.target
        assert a.executed_length == b.executed_length

    def test_backend_failure_recorded(self, scenario):
        """Test a backend error ends the episode as a tagged failure"""
        result = run_episode(scenario, RunConfig(), backend=UnreachableBackend())

        assert result.error == 'backend_error'
        assert not result.success
        assert result.spl == 0.0
        assert result.steps == 0
        assert 'total_s' in result.timing

    def test_unreachable_target(self, make_scenario):
        """Test a blocked doorway gives an infinite optimal length, serialized as null"""
        blocked = make_scenario(obstacles=[[5.0, 2.0, 5.24, 2.99]], max_steps=60)
        record = run_episode(blocked, RunConfig()).to_dict()

        assert record['optimal_length'] is None
        assert record['target_reachable'] is False
        assert record['success'] is False
        json.dumps(record)

    def test_dump_artifacts(self, scenario, tmp_path):
        """Test map renders and node sets are written when asked"""
        artifacts = RunArtifacts(tmp_path)
        cfg = RunConfig.from_file(None, {'harness.dump_artifacts': True})
        run_episode(scenario, cfg, artifacts)
        episode_dir = artifacts.episode_dir(scenario.id)

        for name in ('rooms.pgm', 'rooms.json', 'nodes.json', 'room_map.png', 'node_map.png'):
            assert (episode_dir / name).exists()


class TestSelectTarget:
    """Test backend wiring for the global target"""

    def test_ensemble_of_oracles_agrees(self, scenario):
        """Test an ensemble built from the config agrees with itself"""
        cfg = RunConfig.from_file(None, {'reasoning.ensemble': True})
        seg, nodes = prepare_map(scenario.agent_wall_mask(), scenario.geometry, cfg)

        assert select_target(scenario, cfg, seg, nodes).provenance == 'ensemble:agree'

    def test_adversarial_points_away(self, scenario):
        """Test the adversarial backend picks a target in the start room"""
        cfg = RunConfig.from_file(None, {'reasoning.backend': 'adversarial'})
        seg, nodes = prepare_map(scenario.agent_wall_mask(), scenario.geometry, cfg)
        target = select_target(scenario, cfg, seg, nodes)

        assert target.room == seg.label_at((2.0, 2.5))
        assert target.provenance == 'single:adversarial'
