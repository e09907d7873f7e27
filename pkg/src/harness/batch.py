"""
Batch runner

Runs every scenario of a directory, in a process pool when more than one job
is requested. Each worker builds its own simulator, grids and backends, so
results do not depend on the number of jobs; they are always reported in
scenario id order.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import structlog

from src.config.run_config import RunConfig
from src.harness.artifacts import RunArtifacts
from src.harness.episode import EpisodeResult, run_episode
from src.harness.metrics import metrics_by_kind
from src.harness.writer import ResultsWriter
from src.simulator.scenario import list_scenarios, load_scenario
from src.utils.errors import EmptyBatch, NavKitError

logger = structlog.get_logger(__name__)


@dataclass
class BatchSummary:
    results: List[EpisodeResult]
    groups: List[Tuple[str, Dict[str, float]]]

    @property
    def overall(self) -> Dict[str, float]:
        return self.groups[-1][1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'episodes': len(self.results),
            'errors': sum(1 for result in self.results if result.error),
            'groups': {label: metrics for label, metrics in self.groups},
        }


def _run_one(path: str, cfg_json: str, out_dir: Optional[str]) -> EpisodeResult:
    """Worker entry point; never raises"""
    cfg = RunConfig.from_json(cfg_json)
    artifacts = RunArtifacts(out_dir) if out_dir else None
    try:
        scenario = load_scenario(path, cfg.map.wall_threshold)
    except NavKitError as e:
        logger.error("Scenario could not be loaded", path=path, error=str(e))
        return EpisodeResult(scenario_id=Path(path).stem, goal_kind='unknown', error=e.tag,
                             error_message=str(e))
    try:
        return run_episode(scenario, cfg, artifacts)
    except Exception as e:
        logger.error("Unexpected error in episode", scenario_id=scenario.id, error=str(e))
        return EpisodeResult(scenario_id=scenario.id, goal_kind=scenario.goal.kind,
                             error='internal_error', error_message=str(e))


def run_batch(scenario_dir: Union[str, Path], cfg: Optional[RunConfig] = None,
              out_dir: Optional[Union[str, Path]] = None, jobs: Optional[int] = None) -> BatchSummary:
    """
    Run all scenarios in a directory and score them

    Args:
        scenario_dir: Directory holding scenario JSON files
        cfg: Run configuration
        out_dir: Run directory for results, config, status and trajectories
        jobs: Worker processes (cfg.harness.jobs when None)

    Raises:
        EmptyBatch: the directory holds no scenario
    """
    cfg = cfg or RunConfig()
    jobs = jobs or cfg.harness.jobs
    paths = [str(path) for path in list_scenarios(scenario_dir)]
    if not paths:
        raise EmptyBatch(f"No scenarios found in {scenario_dir}")

    artifacts = RunArtifacts(out_dir) if out_dir else None
    if artifacts is not None:
        artifacts.write_config(cfg)
        artifacts.write_status('running', scenarios=len(paths), jobs=jobs)

    cfg_json = cfg.model_dump_json()
    target_dir = str(out_dir) if out_dir else None
    logger.info("Batch started", scenarios=len(paths), jobs=jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, paths, [cfg_json] * len(paths), [target_dir] * len(paths)))
    else:
        results = [_run_one(path, cfg_json, target_dir) for path in paths]

    results.sort(key=lambda result: result.scenario_id)
    summary = BatchSummary(results=results, groups=metrics_by_kind(results))

    if artifacts is not None:
        writer = ResultsWriter(artifacts.base_path)
        writer.write_results(results)
        writer.write_summary(summary.to_dict())
        artifacts.write_status('complete', episodes=len(results))

    overall = summary.overall
    logger.info("Batch finished", episodes=len(results), sr=round(overall['SR'], 2),
                spl=round(overall['SPL'], 2))
    return summary
