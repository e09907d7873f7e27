"""
Local navigation loop

Observe, update the occupancy map, replan with A* every few steps, pick a
short-term waypoint along the path and let the VFH controller turn it into
one discrete action. The same follower drives every phase of an episode:
reaching the global target, the approach during verification and the final
approach to a detected object.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
import structlog

from src.config.run_config import RunConfig
from src.gridmap.geometry import WorldPoint
from src.localnav.occupancy import OccupancyGrid, update_occupancy
from src.localnav.planner import path_blocked, plan_astar, safety_relocate, select_waypoint
from src.localnav.types import DiscreteAction, Path, Pose
from src.localnav.vfh import VfhController
from src.utils.errors import NoPath, StartOccupied

logger = structlog.get_logger(__name__)

ARRIVED = 'arrived'
INTERRUPTED = 'interrupted'
EXHAUSTED = 'exhausted'


@dataclass
class NavigationResult:
    reached: bool
    outcome: str
    target: WorldPoint
    trajectory: List[Pose] = field(default_factory=list)
    replans: int = 0
    plan_failures: int = 0


class LocalNavigator:
    """Waypoint follower bound to one simulator and one occupancy grid"""

    def __init__(self, sim, grid: OccupancyGrid, cfg: Optional[RunConfig] = None):
        self.cfg = cfg or RunConfig()
        self.sim = sim
        self.grid = grid
        self.controller = VfhController(self.cfg.vfh, self.cfg.sim.turn_deg, self.cfg.sim.step_size_m)
        res = grid.geometry.resolution
        self.safe_distance_cells = self.cfg.nav.safe_distance_m / res
        update_occupancy(self.grid, sim.observe(), sim.pose)

    def _plan(self, pose: Pose, goal: WorldPoint) -> Optional[Path]:
        geometry = self.grid.geometry
        try:
            return plan_astar(self.grid, geometry.world_to_cell(pose.position), geometry.world_to_cell(goal),
                              edf=self.grid.clearance_field(),
                              clearance_weight=self.cfg.nav.clearance_weight,
                              safe_distance=self.safe_distance_cells,
                              min_clearance=self.cfg.nav.min_clearance_cells)
        except (NoPath, StartOccupied) as e:
            logger.debug("Planning failed", error=e.tag, x=pose.x, y=pose.y)
            return None

    def arrived(self, pose: Pose, goal: WorldPoint, radius: float, need_sight: bool) -> bool:
        if pose.distance_to(goal) > radius:
            return False
        return not need_sight or self.grid.segment_clear(pose.position, goal)

    def _mark_blocked_step(self, pose: Pose):
        """A forward move failed: whatever stopped it lies on the step segment"""
        geometry = self.grid.geometry
        step = self.cfg.sim.step_size_m
        end = (pose.x + step * math.cos(pose.heading), pose.y + step * math.sin(pose.heading))
        own = geometry.world_to_cell(pose.position)
        blocked = np.zeros(geometry.shape, dtype=bool)
        for row, col in geometry.segment_cells(pose.position, end):
            if (row, col) != own and geometry.in_bounds(row, col):
                blocked[row, col] = True
        self.grid.apply(np.zeros(geometry.shape, dtype=bool), blocked)

    def go_to(self, target: Tuple[float, float], radius: float, step_limit: int,
              phase: str = 'navigate', need_sight: bool = True,
              interrupt: Optional[Callable[[], bool]] = None) -> NavigationResult:
        """
        Drive toward target until within radius (and, with need_sight, in
        clear view on the occupancy map)

        Args:
            target: World point; relocated each step if its cell is occupied
            radius: Arrival distance in meters
            step_limit: Simulator step count at which to give up
            phase: Tag written into the action log
            need_sight: Require an unobstructed segment to the target on arrival
            interrupt: Called after every action; returning True ends the phase
        """
        sim = self.sim
        nav = self.cfg.nav
        path: Optional[Path] = None
        since_plan = 0
        result = NavigationResult(reached=False, outcome=EXHAUSTED,
                                  target=safety_relocate(target, self.grid))

        while True:
            pose = sim.pose
            goal = safety_relocate(target, self.grid)
            result.target = goal
            if self.arrived(pose, goal, radius, need_sight):
                result.reached, result.outcome = True, ARRIVED
                return result
            if sim.done or sim.steps >= step_limit:
                return result

            cell = self.grid.geometry.world_to_cell(pose.position)
            replanned = False
            if (path is None or since_plan >= nav.replan_interval or path_blocked(path, self.grid)
                    or path.deviation(cell) > nav.path_deviation_cells):
                path = self._plan(pose, goal)
                since_plan = 0
                replanned = True
                result.replans += 1
                if path is None:
                    result.plan_failures += 1

            if path is not None:
                path = path.suffix_from(cell)
                waypoint = safety_relocate(select_waypoint(path, nav.waypoint_distance_m,
                                                           self.grid.geometry), self.grid)
            else:
                waypoint = goal

            action = self.controller.step(self.grid, pose, waypoint)
            new_pose, depth, _ = sim.step(action, phase=phase, replanned=replanned)
            if action == DiscreteAction.MOVE_FORWARD and new_pose.position == pose.position:
                self._mark_blocked_step(pose)
            update_occupancy(self.grid, depth, new_pose)
            result.trajectory.append(new_pose)
            since_plan += 1

            if interrupt is not None and interrupt():
                result.outcome = INTERRUPTED
                return result


def navigate_to(sim, grid: OccupancyGrid, p_global: Tuple[float, float],
                cfg: Optional[RunConfig] = None,
                navigator: Optional[LocalNavigator] = None) -> Tuple[List[Pose], bool]:
    """
    Drive to within the first proximity threshold of p_global

    Leaves the verification reserve (plus the final stop) of the step budget
    unused. Returns the executed poses and whether the target was reached.
    """
    cfg = cfg or RunConfig()
    navigator = navigator or LocalNavigator(sim, grid, cfg)
    step_limit = sim.max_steps - cfg.nav.verification_reserve_steps - 1
    result = navigator.go_to(p_global, cfg.nav.prox1_m, step_limit, phase='navigate')
    logger.info("Navigation finished", reached=result.reached, steps=sim.steps,
                replans=result.replans, plan_failures=result.plan_failures)
    return result.trajectory, result.reached
