"""
Grid-world simulator

One instance per episode. Holds the ground truth (walls, obstacles, object
instances), moves the agent with discrete actions, renders its depth scans and
camera frames, and judges success at the end.
"""
import heapq
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import structlog

from src.config.run_config import RunConfig
from src.gridmap.geometry import WorldPoint
from src.localnav.types import DiscreteAction, Pose
from src.simulator.scenario import Scenario
from src.simulator.sensors import DepthObservation, Raycaster, render_depth, render_frame
from src.utils.errors import EpisodeOver
from src.verification.camera import CameraIntrinsics, Frame

logger = structlog.get_logger(__name__)

_SQRT2 = math.sqrt(2.0)
_MOVES = ((-1, -1, _SQRT2), (-1, 0, 1.0), (-1, 1, _SQRT2), (0, -1, 1.0),
          (0, 1, 1.0), (1, -1, _SQRT2), (1, 0, 1.0), (1, 1, _SQRT2))


class GridWorldSim:
    """Deterministic discrete-action environment for one scenario"""

    def __init__(self, scenario: Scenario, cfg: Optional[RunConfig] = None):
        cfg = cfg or RunConfig()
        self.scenario = scenario
        self.geometry = scenario.geometry
        self.step_size = cfg.sim.step_size_m
        self.turn = math.radians(cfg.sim.turn_deg)
        turns_per_rev = 360.0 / cfg.sim.turn_deg
        # Headings are kept as start + k*turn; k wraps only when the turn divides 360
        self._turns_per_rev = round(turns_per_rev) if turns_per_rev.is_integer() else 0
        self.max_steps = scenario.max_steps or cfg.sim.max_steps
        self.success_radius = scenario.success_radius or cfg.sim.success_radius_m
        self.success_metric = cfg.sim.success_metric
        self.fov = math.radians(cfg.sensor.fov_deg)
        self.max_range = cfg.sensor.max_range_m
        self.rays = cfg.sensor.rays
        self.intrinsics = CameraIntrinsics.from_settings(cfg.camera, cfg.sensor.max_range_m)

        self.walls = scenario.truth_wall_mask()
        self._walls = self.walls.tolist()

        ids = np.zeros(self.geometry.shape, dtype=np.int32)
        # Later instances overwrite earlier ones where footprints overlap
        for index, instance in enumerate(scenario.instances):
            for row, col in instance.footprint_cells(self.geometry):
                ids[row, col] = index + 1
        self.instance_ids = ids
        self.raycaster = Raycaster(self.geometry, self.walls, ids)

        self._position = scenario.start.position
        self._start_heading = scenario.start.heading
        self._turns = 0
        self.steps = 0
        self.done = False
        self.stopped = False
        self.executed_length = 0.0
        self.collisions = 0
        self.log: List[Dict[str, Any]] = []

    @property
    def pose(self) -> Pose:
        turns = self._turns % self._turns_per_rev if self._turns_per_rev else self._turns
        return Pose(self._position, self._start_heading + turns * self.turn)

    def is_wall(self, row: int, col: int) -> bool:
        return not self.geometry.in_bounds(row, col) or self._walls[row][col]

    def observe(self) -> DepthObservation:
        return render_depth(self.raycaster, self.pose, self.fov, self.max_range, self.rays)

    def frame(self) -> Frame:
        return render_frame(self.raycaster, self.pose, self.intrinsics, self.scenario.instances)

    def _forward_target(self) -> Optional[WorldPoint]:
        pose = self.pose
        target = WorldPoint(pose.x + self.step_size * math.cos(pose.heading),
                            pose.y + self.step_size * math.sin(pose.heading))
        for row, col in self.geometry.segment_cells(pose.position, target):
            if self.is_wall(row, col):
                return None
        return target

    def step(self, action: DiscreteAction, **tags: Any) -> Tuple[Pose, DepthObservation, int]:
        """
        Execute one action

        Every action costs one step. A forward move whose segment touches a
        ground-truth wall leaves the pose unchanged. The episode ends on stop
        or when the step budget is used up.

        Raises:
            EpisodeOver: the episode has already ended
        """
        if self.done:
            raise EpisodeOver(f"Episode ended after {self.steps} steps")
        action = DiscreteAction(action)

        moved = False
        if action == DiscreteAction.MOVE_FORWARD:
            target = self._forward_target()
            if target is None:
                self.collisions += 1
            else:
                self._position = target
                self.executed_length += self.step_size
                moved = True
        elif action == DiscreteAction.TURN_LEFT:
            self._turns += 1
        elif action == DiscreteAction.TURN_RIGHT:
            self._turns -= 1
        else:
            self.stopped = True
            self.done = True

        self.steps += 1
        if self.steps >= self.max_steps:
            self.done = True

        pose = self.pose
        record = {'step': self.steps, 'action': action.value, 'x': round(pose.x, 6),
                  'y': round(pose.y, 6), 'heading_deg': round(math.degrees(pose.heading), 6),
                  'moved': moved}
        record.update(tags)
        self.log.append(record)
        return pose, self.observe(), self.steps

    def distance_to_target(self, point: Optional[Tuple[float, float]] = None) -> float:
        """Euclidean distance to the nearest footprint point of any matching instance"""
        point = self.pose.position if point is None else point
        return min(target.distance_to(point) for target in self.scenario.targets)

    def _target_distance_grid(self) -> np.ndarray:
        rows, cols = np.indices(self.geometry.shape)
        xs = self.geometry.origin_x + (cols + 0.5) * self.geometry.resolution
        ys = self.geometry.origin_y + (rows + 0.5) * self.geometry.resolution
        return np.min([target.distance_field(xs, ys) for target in self.scenario.targets], axis=0)

    def geodesic_distance(self, start: Tuple[float, float], radius: float) -> float:
        """
        Shortest walkable path length (meters) from start to any cell whose
        center lies within `radius` of a target footprint; inf if unreachable
        """
        geometry = self.geometry
        goal = (self._target_distance_grid() <= radius) & ~self.walls
        row, col = geometry.world_to_cell(start)
        if not geometry.in_bounds(row, col) or self.walls[row, col] or not goal.any():
            return math.inf

        height, width = geometry.shape
        goal_cells = goal.tolist()
        walls = self._walls
        best = {(row, col): 0.0}
        heap = [(0.0, row, col)]
        while heap:
            cost, r, c = heapq.heappop(heap)
            if cost > best.get((r, c), math.inf):
                continue
            if goal_cells[r][c]:
                return cost * geometry.resolution
            for dr, dc, step in _MOVES:
                nr, nc = r + dr, c + dc
                if not (0 <= nr < height and 0 <= nc < width) or walls[nr][nc]:
                    continue
                if dr and dc and (walls[r][nc] or walls[nr][c]):
                    continue
                new_cost = cost + step
                if new_cost < best.get((nr, nc), math.inf):
                    best[(nr, nc)] = new_cost
                    heapq.heappush(heap, (new_cost, nr, nc))
        return math.inf

    def optimal_length(self) -> float:
        """Oracle path length from the start to the success region"""
        return self.geodesic_distance(self.scenario.start.position, self.success_radius)

    def check_success(self) -> bool:
        """Stopped within the budget and within the success radius of a target"""
        if not self.stopped or self.steps > self.max_steps:
            return False
        if self.success_metric == 'geodesic':
            distance = self.geodesic_distance(self.pose.position, self.geometry.resolution)
        else:
            distance = self.distance_to_target()
        return distance <= self.success_radius
