"""
Tests for the batch runner and its output files
"""
import csv
import json

import pytest

from src.config.run_config import RunConfig
from src.harness.artifacts import RunArtifacts
from src.harness.batch import _run_one, run_batch
from src.harness.episode import EpisodeResult
from src.harness.writer import ResultsWriter
from src.simulator.procedural import generate_batch
from src.utils.errors import EmptyBatch


class TestRunBatch:
    """Test running a scenario directory"""

    def test_empty_directory(self, tmp_path):
        """Test a directory without scenarios raises EmptyBatch"""
        with pytest.raises(EmptyBatch):
            run_batch(tmp_path)

    def test_results_sorted_and_written(self, scenario_dir, scenario_file, tmp_path):
        """Test results come back in id order and land in the run directory"""
        scenario_file('b_scene')
        scenario_file('a_scene')
        (scenario_dir / 'c_broken.json').write_text('{"map": ', encoding='utf-8')
        out = tmp_path / 'run'

        summary = run_batch(scenario_dir, RunConfig(), out_dir=out)

        assert [r.scenario_id for r in summary.results] == ['a_scene', 'b_scene', 'c_broken']
        assert summary.results[2].error == 'schema_error'
        assert summary.results[0].success and summary.results[1].success
        assert [label for label, _ in summary.groups] == ['ObjNav', 'Unknown', 'Overall']
        assert summary.overall['SR'] == pytest.approx(200.0 / 3)

        assert (out / 'config.json').exists()
        assert json.loads((out / 'status.json').read_text())['status'] == 'complete'
        assert json.loads((out / 'summary.json').read_text())['errors'] == 1
        assert len(ResultsWriter(out).read_results()) == 3
        assert RunArtifacts(out).read_trajectory('a_scene')

    def test_worker_never_raises(self, tmp_path):
        """Test a missing scenario file becomes an error result"""
        result = _run_one(str(tmp_path / 'nope.json'), RunConfig().model_dump_json(), None)

        assert result.scenario_id == 'nope'
        assert result.error == 'schema_error'


@pytest.fixture(scope='module')
def generated_scenes(tmp_path_factory):
    """Twenty seeded multi-room scenarios with mixed goal kinds"""
    scenes = tmp_path_factory.mktemp('scenes')
    generate_batch(20, scenes, max_steps=500)
    return scenes


@pytest.fixture(scope='module')
def oracle_run(generated_scenes, tmp_path_factory):
    out = tmp_path_factory.mktemp('oracle_run')
    return run_batch(generated_scenes, RunConfig(), out_dir=out, jobs=1), out


def comparable(result):
    record = result.to_dict()
    del record['timing']
    return record


class TestGeneratedBatches:
    """Test whole runs over the generated scenarios"""

    def test_oracle_solves_everything(self, oracle_run):
        """Test the oracle backend succeeds on every scenario efficiently"""
        summary, _ = oracle_run

        assert len(summary.results) == 20
        assert [r.error for r in summary.results] == [None] * 20
        assert summary.overall['SR'] == 100.0
        assert summary.overall['SPL'] >= 70.0
        assert all(r.steps < 500 for r in summary.results)

    def test_adversarial_stops_once(self, generated_scenes, tmp_path):
        """Test every adversarial episode ends with exactly one stop inside the budget"""
        out = tmp_path / 'adversarial'
        cfg = RunConfig.from_file(None, {'reasoning.backend': 'adversarial'})
        summary = run_batch(generated_scenes, cfg, out_dir=out, jobs=1)
        artifacts = RunArtifacts(out)

        for result in summary.results:
            actions = [record['action'] for record in artifacts.read_trajectory(result.scenario_id)]
            assert result.error is None, result.error_message
            assert actions.count('stop') == 1
            assert actions[-1] == 'stop'
            assert len(actions) <= 500

    def test_jobs_do_not_change_results(self, generated_scenes, oracle_run):
        """Test a parallel run gives the same results and summary as a serial one"""
        serial, _ = oracle_run
        parallel = run_batch(generated_scenes, RunConfig(), jobs=4)

        assert [comparable(r) for r in parallel.results] == [comparable(r) for r in serial.results]
        assert parallel.to_dict() == serial.to_dict()

    def test_trajectory_logs_identical(self, generated_scenes, oracle_run, tmp_path):
        """Test a rerun writes byte-identical trajectory logs"""
        first, first_out = oracle_run
        second_out = tmp_path / 'rerun'
        run_batch(generated_scenes, RunConfig(), out_dir=second_out, jobs=1)

        for result in first.results:
            path = RunArtifacts(first_out).trajectory_path(result.scenario_id)
            rerun = RunArtifacts(second_out).trajectory_path(result.scenario_id)
            assert path.read_bytes() == rerun.read_bytes()

class TestResultsWriter:
    """Test JSONL and CSV output"""

    def test_write_and_read(self, tmp_path):
        """Test every result goes to both files in order"""
        results = [EpisodeResult('a', 'object_category', success=True, spl=0.5, optimal_length=2.0),
                   EpisodeResult('b', 'text_description', error='no_path')]
        writer = ResultsWriter(tmp_path)
        meta = writer.write_results(results)

        assert meta['rows'] == 2
        records = writer.read_results()
        assert [r['scenario_id'] for r in records] == ['a', 'b']
        assert records[1]['error'] == 'no_path'
        with open(writer.csv_path, newline='', encoding='utf-8') as f:
            rows = list(csv.DictReader(f))
        assert list(rows[0].keys()) == ResultsWriter.COLUMNS
        assert rows[0]['spl'] == '0.5'

    def test_missing_results(self, tmp_path):
        """Test reading before writing gives an empty list"""
        assert ResultsWriter(tmp_path).read_results() == []


class TestRunArtifacts:
    """Test run directory bookkeeping"""

    def test_status_keeps_fields(self, tmp_path):
        """Test later status updates keep earlier details"""
        artifacts = RunArtifacts(tmp_path)
        assert artifacts.get_status() is None

        artifacts.write_status('running', scenarios=3)
        record = artifacts.write_status('complete', episodes=3)

        assert record['scenarios'] == 3
        assert record['status'] == 'complete'
        assert 'started_at' in record and 'completed_at' in record

    def test_config_round_trip(self, tmp_path):
        """Test the written config rebuilds the same RunConfig"""
        cfg = RunConfig.from_file(None, {'harness.seed': 7})
        path = RunArtifacts(tmp_path).write_config(cfg)

        assert RunConfig.from_json(path.read_text()) == cfg

    def test_trajectory(self, tmp_path):
        """Test trajectory records are written one per line"""
        artifacts = RunArtifacts(tmp_path)
        artifacts.write_trajectory('s', [{'step': 1, 'action': 'turn_left'}, {'step': 2, 'action': 'stop'}])

        assert [r['action'] for r in artifacts.read_trajectory('s')] == ['turn_left', 'stop']
        assert artifacts.read_trajectory('other') == []
