"""
Episode runner

One scenario end to end: segment the prior map into rooms, sample candidate
nodes, pick the global target, drive there, verify and approach, stop, and
score the outcome. Any navkit error ends the episode as a tagged failure.
"""
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
import structlog

from src.config.run_config import RunConfig
from src.connectors.base import ReasoningBackend, build_backend
from src.gridmap.geometry import GridGeometry
from src.gridmap.grid import save_label_raster
from src.harness.artifacts import RunArtifacts
from src.harness.metrics import episode_spl
from src.localnav.navigator import LocalNavigator, navigate_to
from src.localnav.occupancy import OccupancyGrid
from src.nodes.sampling import NodeSet, assign_regions, sample_nodes
from src.reasoning.rendering import render_node_overview, render_room_map
from src.reasoning.selection import GlobalTarget, ensemble_select, reason
from src.rooms.segmentation import RoomSegmentation, segment_rooms
from src.simulator.scenario import Scenario
from src.simulator.sim import GridWorldSim
from src.utils.errors import NavKitError
from src.verification.detector import Detector, build_detector
from src.verification.verifier import verify_and_approach

logger = structlog.get_logger(__name__)


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return round(value, 6)


@dataclass
class EpisodeResult:
    scenario_id: str
    goal_kind: str
    success: bool = False
    spl: float = 0.0
    steps: int = 0
    executed_length: float = 0.0
    optimal_length: Optional[float] = None
    distance_to_target: Optional[float] = None
    stopped: bool = False
    collisions: int = 0
    target: Optional[GlobalTarget] = None
    detected: bool = False
    detected_in: Optional[str] = None
    error: Optional[str] = None
    error_message: Optional[str] = None
    timing: Dict[str, float] = field(default_factory=dict)

    @property
    def provenance(self) -> Optional[str]:
        return self.target.provenance if self.target else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario_id': self.scenario_id,
            'goal_kind': self.goal_kind,
            'success': self.success,
            'spl': round(self.spl, 6),
            'steps': self.steps,
            'executed_length': round(self.executed_length, 6),
            'optimal_length': _finite_or_none(self.optimal_length),
            'target_reachable': self.optimal_length is None or math.isfinite(self.optimal_length),
            'distance_to_target': _finite_or_none(self.distance_to_target),
            'stopped': self.stopped,
            'collisions': self.collisions,
            'target': self.target.to_dict() if self.target else None,
            'detected': self.detected,
            'detected_in': self.detected_in,
            'error': self.error,
            'error_message': self.error_message,
            'timing': self.timing,
        }

    def to_row(self) -> Dict[str, Any]:
        """Flat record for the CSV file"""
        record = self.to_dict()
        record.update({
            'provenance': self.provenance,
            'room': self.target.room if self.target else None,
            'node': self.target.node if self.target else None,
            'total_s': self.timing.get('total_s'),
        })
        return record


def prepare_map(walls: np.ndarray, geometry: GridGeometry, cfg: RunConfig) -> Tuple[RoomSegmentation, NodeSet]:
    """Rooms and region-tagged candidate nodes for a wall mask"""
    seg = segment_rooms(walls, geometry, cfg.rooms)
    nodes = sample_nodes(~walls, geometry, cfg.nodes.padding_m, cfg.nodes.radius_m, cfg.nodes.k_attempts,
                         rng_seed=cfg.harness.seed)
    return seg, assign_regions(nodes, seg)


def select_target(scenario: Scenario, cfg: RunConfig, seg: RoomSegmentation, nodes: NodeSet,
                  backend: Optional[ReasoningBackend] = None) -> GlobalTarget:
    """Global target for the scenario goal, single or ensemble as configured"""
    grid_map = scenario.map
    settings = cfg.reasoning
    seed = cfg.harness.seed
    if not settings.ensemble:
        backend = backend or build_backend(settings.backend, settings, scenario)
        return reason(backend, grid_map, seg, nodes, scenario.goal, settings, seed)

    if backend is not None:
        unit_a = unit_b = discriminator = backend
    else:
        models = settings.ensemble_models or [settings.model, settings.model]
        unit_a = build_backend(settings.backend, settings, scenario, model=models[0])
        unit_b = build_backend(settings.backend, settings, scenario, model=models[-1])
        discriminator = build_backend(settings.backend, settings, scenario,
                                      model=settings.discriminator_model or models[0])
    return ensemble_select(unit_a, unit_b, discriminator, grid_map, seg, nodes, scenario.goal,
                           settings, seed)


def run_episode(scenario: Scenario, cfg: Optional[RunConfig] = None,
                artifacts: Optional[RunArtifacts] = None,
                backend: Optional[ReasoningBackend] = None,
                detector: Optional[Detector] = None) -> EpisodeResult:
    """
    Run one scenario through the whole pipeline

    Args:
        scenario: Parsed scenario
        cfg: Run configuration (defaults when None)
        artifacts: Run directory; the trajectory log is always written to it,
            maps and node sets too when cfg.harness.dump_artifacts is set
        backend: Reasoning backend for every role (built from cfg when None)
        detector: Detector (built from cfg when None)

    Returns:
        EpisodeResult; errors are recorded in it, never raised
    """
    cfg = cfg or RunConfig()
    log = logger.bind(scenario_id=scenario.id)
    result = EpisodeResult(scenario_id=scenario.id, goal_kind=scenario.goal.kind)
    started = time.perf_counter()
    sim = None

    try:
        sim = GridWorldSim(scenario, cfg)
        result.optimal_length = sim.optimal_length()
        geometry = scenario.geometry
        walls = scenario.agent_wall_mask()

        seg, nodes = prepare_map(walls, geometry, cfg)
        log.info("Map prepared", rooms=seg.count, nodes=len(nodes))
        if artifacts is not None and cfg.harness.dump_artifacts:
            _dump_map_artifacts(artifacts, scenario, seg, nodes, cfg)

        reasoning_started = time.perf_counter()
        result.target = select_target(scenario, cfg, seg, nodes, backend)
        result.timing['reasoning_s'] = round(time.perf_counter() - reasoning_started, 4)

        grid = OccupancyGrid.from_wall_mask(geometry, walls)
        navigator = LocalNavigator(sim, grid, cfg)
        _, reached = navigate_to(sim, grid, result.target.point, cfg, navigator)
        detector = detector or build_detector(cfg.verify.detector, cfg.verify.detector_range_m)
        status = verify_and_approach(sim, grid, result.target.point, scenario.goal, detector, cfg, navigator)
        result.detected = status.detected
        result.detected_in = status.detected_in
        result.success = sim.check_success()
        log.info("Episode finished", success=result.success, reached_global=reached, steps=sim.steps,
                 detected=status.detected)
    except NavKitError as e:
        result.error = e.tag
        result.error_message = str(e)
        log.error("Episode failed", error=str(e), tag=e.tag)

    if sim is not None:
        result.steps = sim.steps
        result.executed_length = sim.executed_length
        result.stopped = sim.stopped
        result.collisions = sim.collisions
        result.distance_to_target = sim.distance_to_target()
        result.spl = episode_spl(result.success, result.optimal_length, result.executed_length)
        if artifacts is not None:
            artifacts.write_trajectory(scenario.id, sim.log)
    result.timing['total_s'] = round(time.perf_counter() - started, 4)
    return result


def _dump_map_artifacts(artifacts: RunArtifacts, scenario: Scenario, seg, nodes, cfg: RunConfig):
    scale = cfg.reasoning.render_scale
    save_label_raster(seg.labels, artifacts.episode_dir(scenario.id) / 'rooms.pgm')
    artifacts.write_json(scenario.id, 'rooms.json', seg.to_dict())
    artifacts.write_json(scenario.id, 'nodes.json', nodes.to_dict())
    artifacts.save_image(scenario.id, 'room_map.png', render_room_map(scenario.map, seg, scale).image)
    artifacts.save_image(scenario.id, 'node_map.png',
                         render_node_overview(scenario.map, seg, nodes, scale).image)
