"""
Online occupancy map

Tri-state grid (unexplored / free / occupied) the agent builds from its depth
scans. Cells taken from the prior wall mask are sticky: they stay occupied no
matter what is observed.
"""
import math
from typing import Tuple

import numpy as np

from src.gridmap.geometry import GridGeometry
from src.gridmap.masks import edt_with_border
from src.localnav.types import Pose
from src.simulator.sensors import DepthObservation

UNEXPLORED = 0
FREE = 1
OCCUPIED = 2

HIT_EPSILON = 1e-9


class OccupancyGrid:
    """Mutable occupancy map owned by one navigator for one episode"""

    def __init__(self, geometry: GridGeometry, sticky: np.ndarray):
        sticky = np.asarray(sticky, dtype=bool)
        if sticky.shape != geometry.shape:
            raise ValueError(f"Sticky mask shape {sticky.shape} does not match {geometry.shape}")
        self.geometry = geometry
        self.sticky = sticky.copy()
        self.states = np.full(geometry.shape, UNEXPLORED, dtype=np.int8)
        self.states[self.sticky] = OCCUPIED
        self._version = 0
        self._clearance_version = -1
        self._clearance = None

    @classmethod
    def from_wall_mask(cls, geometry: GridGeometry, wall_mask: np.ndarray) -> 'OccupancyGrid':
        return cls(geometry, wall_mask)

    @property
    def version(self) -> int:
        """Bumped whenever a state changes"""
        return self._version

    def occupied_mask(self) -> np.ndarray:
        return self.states == OCCUPIED

    def free_mask(self) -> np.ndarray:
        return self.states == FREE

    def is_occupied(self, row: int, col: int) -> bool:
        if not self.geometry.in_bounds(row, col):
            return True
        return bool(self.states[row, col] == OCCUPIED)

    def clearance_field(self) -> np.ndarray:
        """Distance in cells to the nearest occupied cell or the map edge"""
        if self._clearance_version != self._version:
            self._clearance = edt_with_border(self.occupied_mask())
            self._clearance_version = self._version
        return self._clearance

    def segment_clear(self, start: Tuple[float, float], end: Tuple[float, float]) -> bool:
        """True when no cell touched by the segment is occupied"""
        return not any(self.is_occupied(r, c) for r, c in self.geometry.segment_cells(start, end))

    def apply(self, free: np.ndarray, occupied: np.ndarray):
        """Set free cells, then occupied cells, then restore sticky cells"""
        before = self.states.copy()
        self.states[free] = FREE
        self.states[occupied] = OCCUPIED
        self.states[self.sticky] = OCCUPIED
        if not np.array_equal(before, self.states):
            self._version += 1


def update_occupancy(grid: OccupancyGrid, depth: DepthObservation, pose: Pose) -> OccupancyGrid:
    """
    Integrate one depth scan into the grid (in place; the grid is returned)

    Cells a ray enters before its range become free. A ray that hit something
    marks the cell just past its range occupied; max-range rays mark nothing
    occupied. Hits win over frees from the same scan.
    """
    geometry = grid.geometry
    height, width = geometry.shape
    free = np.zeros(geometry.shape, dtype=bool)
    occupied = np.zeros(geometry.shape, dtype=bool)

    for bearing, distance, hit in depth.rays:
        angle = pose.heading + bearing
        for row, col, t in geometry.traverse_ray(pose.x, pose.y, angle, distance):
            if t >= distance:
                break
            if 0 <= row < height and 0 <= col < width:
                free[row, col] = True
        if hit:
            reach = distance + HIT_EPSILON
            row, col = geometry.world_to_cell((pose.x + reach * math.cos(angle),
                                               pose.y + reach * math.sin(angle)))
            if 0 <= row < height and 0 <= col < width:
                occupied[row, col] = True

    grid.apply(free & ~occupied, occupied)
    return grid
