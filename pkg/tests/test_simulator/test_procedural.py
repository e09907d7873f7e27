"""
Tests for procedural scenario generation
"""
import json

import numpy as np
import pytest

from src.reasoning.goal import GOAL_KINDS
from src.simulator.procedural import FURNITURE_VALUE, build_layout, generate_batch, generate_scenario
from src.simulator.scenario import load_scenario
from src.simulator.sim import GridWorldSim


class TestBuildLayout:
    """Test seeded apartment rasters"""

    def test_same_seed_same_layout(self):
        """Test layouts are reproducible"""
        a, b = build_layout(7), build_layout(7)

        assert np.array_equal(a['values'], b['values'])
        assert a['rooms'] == b['rooms']

    def test_at_least_two_rooms(self):
        """Test every layout has a start room and a target room"""
        for seed in range(10):
            assert len(build_layout(seed)['rooms']) >= 2

    def test_outer_wall_closed(self):
        """Test the raster is walled on all sides"""
        values = build_layout(3)['values']

        assert (values[0, :] == 255).all() and (values[-1, :] == 255).all()
        assert (values[:, 0] == 255).all() and (values[:, -1] == 255).all()


class TestGenerateScenario:
    """Test written scenario files"""

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_generated_scenario_loads(self, tmp_path, seed):
        """Test each goal kind produces a loadable, solvable scenario"""
        path = generate_scenario(seed, tmp_path, max_steps=200)
        scenario = load_scenario(path)

        assert scenario.id == f'scene_{seed:03d}'
        assert scenario.goal.kind == GOAL_KINDS[seed % len(GOAL_KINDS)]
        assert scenario.max_steps == 200
        assert len(scenario.targets) >= 1
        assert np.isfinite(GridWorldSim(scenario).optimal_length())

    def test_furniture_is_walkable(self, tmp_path):
        """Test furniture is drawn below the wall threshold"""
        scenario = load_scenario(generate_scenario(4, tmp_path))

        assert (scenario.map.values == FURNITURE_VALUE).any()
        assert not scenario.agent_wall_mask()[scenario.map.values == FURNITURE_VALUE].any()

    def test_image_goal_writes_image(self, tmp_path):
        """Test instance_image goals ship their goal image"""
        seed = GOAL_KINDS.index('instance_image')
        path = generate_scenario(seed, tmp_path)
        document = json.loads(path.read_text(encoding='utf-8'))

        assert (tmp_path / document['goal']['image']).exists()

    def test_generate_batch(self, tmp_path):
        """Test a batch writes one scenario per seed"""
        paths = generate_batch(3, tmp_path, first_seed=10, max_steps=100)

        assert [p.name for p in paths] == ['scene_010.json', 'scene_011.json', 'scene_012.json']
