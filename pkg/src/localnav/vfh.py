"""
Reactive steering (VFH* style)

A polar histogram of nearby occupied cells picks open sectors; each open
sector is checked one step ahead along the discrete heading the agent can
actually turn to, and the cheapest feasible sector is turned into a discrete
action.
"""
import math
from typing import Optional, Tuple

import numpy as np
import structlog

from src.config.run_config import VfhSettings
from src.gridmap.geometry import wrap_angle
from src.localnav.occupancy import OccupancyGrid
from src.localnav.types import DiscreteAction, Pose

logger = structlog.get_logger(__name__)


def _wrap(angles: np.ndarray) -> np.ndarray:
    return (angles + np.pi) % (2.0 * np.pi) - np.pi


class VfhController:
    """Histogram-based local steering for one agent"""

    def __init__(self, settings: Optional[VfhSettings] = None, turn_deg: float = 30.0,
                 step_size: float = 0.25):
        self.settings = settings or VfhSettings()
        self.turn = math.radians(turn_deg)
        self.step_size = step_size
        self.sector_width = 2.0 * math.pi / self.settings.sectors
        self.sector_centers = np.arange(self.settings.sectors) * self.sector_width
        self.forward_tolerance = math.radians(self.settings.forward_tolerance_deg)

    def histogram(self, grid: OccupancyGrid, pose: Pose, horizon: float) -> np.ndarray:
        """
        Obstacle density per sector (world-frame sector centers k * 360/sectors)

        Only occupied cells within the window and closer than `horizon` count.
        Each contributes 1 - d/window to every sector within its enlargement
        angle asin((safety + res/2) / d) plus half a sector.
        """
        geometry = grid.geometry
        res = geometry.resolution
        window = self.settings.window_m
        reach = min(window, horizon)

        row, col = geometry.world_to_cell(pose.position)
        span = int(math.ceil(reach / res)) + 1
        r0, r1 = max(row - span, 0), min(row + span + 1, geometry.height)
        c0, c1 = max(col - span, 0), min(col + span + 1, geometry.width)
        density = np.zeros(self.settings.sectors)
        if r0 >= r1 or c0 >= c1:
            return density

        rows, cols = np.nonzero(grid.occupied_mask()[r0:r1, c0:c1])
        xs = geometry.origin_x + (cols + c0 + 0.5) * res
        ys = geometry.origin_y + (rows + r0 + 0.5) * res
        dx, dy = xs - pose.x, ys - pose.y
        distances = np.hypot(dx, dy)
        keep = (distances > 0.0) & (distances <= window) & (distances < horizon)
        if not keep.any():
            return density

        distances = distances[keep]
        bearings = np.arctan2(dy[keep], dx[keep])
        magnitudes = 1.0 - distances / window
        enlargement = np.arcsin(np.clip((self.settings.safety_radius_m + res / 2.0) / distances, 0.0, 1.0))

        gaps = np.abs(_wrap(self.sector_centers[:, None] - bearings[None, :]))
        covered = gaps <= enlargement[None, :] + self.sector_width / 2.0
        return (covered * magnitudes[None, :]).sum(axis=1)

    def reachable_heading(self, pose: Pose, direction: float) -> float:
        """Heading closest to `direction` among heading + k * turn"""
        turns = round(wrap_angle(direction - pose.heading) / self.turn)
        return pose.heading + turns * self.turn

    def step_clear(self, grid: OccupancyGrid, pose: Pose, heading: float) -> bool:
        end = (pose.x + self.step_size * math.cos(heading), pose.y + self.step_size * math.sin(heading))
        return grid.segment_clear(pose.position, end)

    def choose_direction(self, grid: OccupancyGrid, pose: Pose,
                         waypoint: Tuple[float, float]) -> Optional[float]:
        """
        World-frame direction of the cheapest candidate sector, or None

        A candidate is below the density threshold and has a clear step along
        its reachable heading. Dense sectors are never candidates, even when
        the step itself is clear.
        """
        target = math.atan2(waypoint[1] - pose.y, waypoint[0] - pose.x)
        horizon = pose.distance_to(waypoint) + self.settings.safety_radius_m
        density = self.histogram(grid, pose, horizon)

        target_gap = np.abs(_wrap(self.sector_centers - target))
        heading_gap = np.abs(_wrap(self.sector_centers - pose.heading))
        unit = math.radians(10.0)
        costs = (self.settings.target_weight * target_gap / unit
                 + self.settings.heading_weight * heading_gap / unit)

        feasible_cache = {}

        def feasible(sector: int) -> bool:
            turns = round(wrap_angle(self.sector_centers[sector] - pose.heading) / self.turn)
            if turns not in feasible_cache:
                feasible_cache[turns] = self.step_clear(grid, pose, pose.heading + turns * self.turn)
            return feasible_cache[turns]

        order = sorted(range(self.settings.sectors), key=lambda k: (costs[k], k))
        for sector in order:
            if density[sector] < self.settings.density_threshold and feasible(sector):
                return float(self.sector_centers[sector])
        return None

    def step(self, grid: OccupancyGrid, pose: Pose, waypoint: Tuple[float, float]) -> DiscreteAction:
        direction = self.choose_direction(grid, pose, waypoint)
        if direction is None:
            logger.debug("No feasible sector, spinning", x=pose.x, y=pose.y)
            return DiscreteAction.TURN_LEFT
        error = wrap_angle(direction - pose.heading)
        if abs(error) <= self.forward_tolerance:
            return DiscreteAction.MOVE_FORWARD
        return DiscreteAction.TURN_LEFT if error > 0 else DiscreteAction.TURN_RIGHT


def vfh_step(grid: OccupancyGrid, pose: Pose, waypoint: Tuple[float, float],
             settings: Optional[VfhSettings] = None, turn_deg: float = 30.0,
             step_size: float = 0.25) -> DiscreteAction:
    """One steering decision toward the waypoint"""
    return VfhController(settings, turn_deg, step_size).step(grid, pose, waypoint)
