"""
Integration tests for the navkit command line

These tests drive the complete workflow through the CLI:
1. Generating scenarios
2. Preparing maps (rooms and nodes) and picking a global target
3. Running single episodes and batches, then rendering a trajectory
"""
import json

import pytest
from click.testing import CliRunner

from src.app import cli


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, ['--log-level', 'ERROR', *[str(a) for a in args]])


class TestMapCommands:
    """Test segment and nodes"""

    def test_segment(self, runner, scenario_file, tmp_path):
        """Test rooms are written with their render"""
        out = tmp_path / 'seg'
        result = invoke(runner, 'segment', '--scenario', scenario_file(), '--out', out)

        assert result.exit_code == 0, result.output
        rooms = json.loads((out / 'rooms.json').read_text())
        assert len(rooms['regions']) == 2
        assert (out / 'rooms.pgm').exists()
        assert (out / 'room_map.png').exists()

    def test_segment_needs_resolution(self, runner, scenario_dir, tmp_path):
        """Test --map without --resolution is a usage error"""
        result = invoke(runner, 'segment', '--map', scenario_dir / 'map.png', '--out', tmp_path / 'x')
        assert result.exit_code == 2

    def test_segment_raw_map(self, runner, scenario_dir, tmp_path):
        """Test a bare raster with its resolution can be segmented"""
        result = invoke(runner, 'segment', '--map', scenario_dir / 'map.png', '--resolution', 0.25,
                        '--out', tmp_path / 'raw')
        assert result.exit_code == 0, result.output

    def test_nodes(self, runner, scenario_file, tmp_path):
        """Test the node set is written"""
        out = tmp_path / 'nodes'
        result = invoke(runner, 'nodes', '--scenario', scenario_file(), '--seed', 1, '--out', out)

        assert result.exit_code == 0, result.output
        assert json.loads((out / 'nodes.json').read_text())['nodes']
        assert (out / 'node_map.png').exists()


class TestEpisodeCommands:
    """Test reason, run and render"""

    def test_reason(self, runner, scenario_file):
        """Test the global target is printed as JSON"""
        result = invoke(runner, 'reason', '--scenario', scenario_file())

        assert result.exit_code == 0, result.output
        assert json.loads(result.output)['provenance'] == 'single:oracle'

    def test_reason_direct_mode(self, runner, scenario_file):
        """Test --mode direct answers a coordinate target without a node"""
        result = invoke(runner, 'reason', '--scenario', scenario_file(), '--mode', 'direct')

        assert result.exit_code == 0, result.output
        target = json.loads(result.output)
        assert target['provenance'] == 'direct:oracle'
        assert target['node'] == 0

    def test_bad_scenario(self, runner, scenario_dir):
        """Test a broken scenario exits with status 1"""
        path = scenario_dir / 'broken.json'
        path.write_text('{}', encoding='utf-8')
        result = invoke(runner, 'reason', '--scenario', path)

        assert result.exit_code == 1
        assert 'schema_error' in result.output

    def test_run_then_render(self, runner, scenario_file, tmp_path):
        """Test an episode run can be rendered from its run directory"""
        path = scenario_file()
        out = tmp_path / 'run'
        result = invoke(runner, 'run', '--scenario', path, '--out', out)

        assert result.exit_code == 0, result.output
        assert json.loads(result.output)['success'] is True
        assert (out / 'results.jsonl').exists()

        result = invoke(runner, 'render', '--scenario', path, '--out', out)
        assert result.exit_code == 0, result.output
        assert (out / 'episodes' / 'two_room_bed' / 'trajectory.png').exists()


class TestBatchCommands:
    """Test generate and batch"""

    def test_generate_and_batch(self, runner, tmp_path):
        """Test generated scenarios run as a batch with a summary"""
        scenes = tmp_path / 'scenes'
        result = invoke(runner, 'generate', '--count', 2, '--seed', 0, '--max-steps', 200, '--out', scenes)
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in scenes.glob('*.json')) == ['scene_000.json', 'scene_001.json']

        out = tmp_path / 'batch'
        result = invoke(runner, 'batch', '--scenarios-dir', scenes, '--out', out, '--jobs', 1)

        assert result.exit_code == 0, result.output
        assert 'Overall' in result.output
        records = [json.loads(line) for line in (out / 'results.jsonl').read_text().splitlines()]
        assert [r['scenario_id'] for r in records] == ['scene_000', 'scene_001']
