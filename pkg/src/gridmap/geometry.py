"""
Grid geometry

Metric frame of a raster (resolution + origin) and the cell traversal used by
depth raycasting, occupancy updates, kinematic collision checks and the VFH
lookahead. All of them must agree on which cells a ray or segment touches, so
they share `GridGeometry.traverse_ray`.

Frame conventions:
    x grows with column, y grows with row;
    cell (row, col) covers [origin_x + col*res, origin_x + (col+1)*res) in x;
    heading 0 points along +x and positive angles turn towards +y.
"""
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Tuple

from src.utils.errors import BadMetadata


class CellIndex(NamedTuple):
    row: int
    col: int


class WorldPoint(NamedTuple):
    x: float
    y: float

    def distance_to(self, other: Tuple[float, float]) -> float:
        return math.hypot(self.x - other[0], self.y - other[1])


def wrap_angle(angle: float) -> float:
    """Normalize an angle to [-pi, pi)"""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped < 0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class GridGeometry:
    """Size and metric placement of a grid"""

    width: int
    height: int
    resolution: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise BadMetadata(f"Grid must have positive size, got {self.width}x{self.height}")
        if not self.resolution > 0:
            raise BadMetadata(f"Resolution must be > 0, got {self.resolution}")

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    def world_to_cell(self, point: Tuple[float, float]) -> CellIndex:
        col = math.floor((point[0] - self.origin_x) / self.resolution)
        row = math.floor((point[1] - self.origin_y) / self.resolution)
        return CellIndex(int(row), int(col))

    def cell_to_world(self, cell: Tuple[int, int]) -> WorldPoint:
        return WorldPoint(self.origin_x + (cell[1] + 0.5) * self.resolution,
                          self.origin_y + (cell[0] + 0.5) * self.resolution)

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def clamp(self, cell: Tuple[int, int]) -> CellIndex:
        return CellIndex(min(max(cell[0], 0), self.height - 1),
                         min(max(cell[1], 0), self.width - 1))

    def traverse_ray(self, x: float, y: float, angle: float,
                     max_dist: float) -> Iterator[Tuple[int, int, float]]:
        """
        Walk the cells pierced by a ray (Amanatides-Woo traversal)

        Yields (row, col, t_enter) starting with the origin cell at t=0; t is
        the metric distance along the ray at which the cell is entered.
        Iteration stops once t exceeds max_dist. Cells are not bounds-checked.
        """
        res = self.resolution
        u = (x - self.origin_x) / res
        v = (y - self.origin_y) / res
        col = math.floor(u)
        row = math.floor(v)

        dx = math.cos(angle)
        dy = math.sin(angle)
        if abs(dx) < 1e-12:
            dx = 0.0
        if abs(dy) < 1e-12:
            dy = 0.0

        inf = math.inf
        if dx > 0:
            step_c, t_max_c, t_delta_c = 1, (col + 1 - u) * res / dx, res / dx
        elif dx < 0:
            step_c, t_max_c, t_delta_c = -1, (u - col) * res / -dx, res / -dx
        else:
            step_c, t_max_c, t_delta_c = 0, inf, inf

        if dy > 0:
            step_r, t_max_r, t_delta_r = 1, (row + 1 - v) * res / dy, res / dy
        elif dy < 0:
            step_r, t_max_r, t_delta_r = -1, (v - row) * res / -dy, res / -dy
        else:
            step_r, t_max_r, t_delta_r = 0, inf, inf

        t = 0.0
        while True:
            yield row, col, t
            if t_max_c < t_max_r:
                col += step_c
                t = t_max_c
                t_max_c += t_delta_c
            else:
                row += step_r
                t = t_max_r
                t_max_r += t_delta_r
            if t > max_dist:
                return

    def segment_cells(self, start: Tuple[float, float],
                      end: Tuple[float, float]) -> List[CellIndex]:
        """Cells touched by the straight segment start -> end, in order"""
        length = math.hypot(end[0] - start[0], end[1] - start[1])
        if length == 0.0:
            return [self.world_to_cell(start)]
        angle = math.atan2(end[1] - start[1], end[0] - start[0])
        return [CellIndex(r, c) for r, c, _ in self.traverse_ray(start[0], start[1], angle, length)]
