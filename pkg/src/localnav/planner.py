"""
Global path planning on the occupancy map

8-connected A* over non-occupied cells (unexplored cells are traversable)
with an optional clearance penalty taken from the distance field, waypoint
selection along the resulting path and relocation of targets that fall on
occupied cells.
"""
import heapq
import math
from typing import List, Optional, Tuple

import numpy as np
import structlog

from src.gridmap.geometry import CellIndex, GridGeometry, WorldPoint
from src.localnav.occupancy import OccupancyGrid
from src.localnav.types import Path
from src.utils.errors import NoFreeCell, NoPath, StartOccupied

logger = structlog.get_logger(__name__)

_SQRT2 = math.sqrt(2.0)
_OCTILE = _SQRT2 - 2.0
_MOVES = ((-1, -1, _SQRT2), (-1, 0, 1.0), (-1, 1, _SQRT2), (0, -1, 1.0),
          (0, 1, 1.0), (1, -1, _SQRT2), (1, 0, 1.0), (1, 1, _SQRT2))


def _octile(r: int, c: int, goal_r: int, goal_c: int) -> float:
    dr = abs(r - goal_r)
    dc = abs(c - goal_c)
    return dr + dc + _OCTILE * min(dr, dc)


def nearest_free_cell(grid: OccupancyGrid, cell: Tuple[int, int]) -> CellIndex:
    """
    Closest non-occupied cell in Chebyshev rings around `cell`

    Ties go to the lowest (row, col).

    Raises:
        NoFreeCell: every cell is occupied
    """
    cell = grid.geometry.clamp(cell)
    if not grid.is_occupied(*cell):
        return cell
    candidates = np.argwhere(~grid.occupied_mask())
    if candidates.size == 0:
        raise NoFreeCell("Occupancy grid has no non-occupied cell")
    rings = np.maximum(np.abs(candidates[:, 0] - cell[0]), np.abs(candidates[:, 1] - cell[1]))
    # argwhere is row-major, so the first minimum is the lowest (row, col)
    best = candidates[int(np.argmin(rings))]
    return CellIndex(int(best[0]), int(best[1]))


def safety_relocate(point: Tuple[float, float], grid: OccupancyGrid) -> WorldPoint:
    """Return the point itself if its cell is not occupied, else the nearest free cell center"""
    geometry = grid.geometry
    row, col = geometry.world_to_cell(point)
    if geometry.in_bounds(row, col) and not grid.is_occupied(row, col):
        return WorldPoint(float(point[0]), float(point[1]))
    return geometry.cell_to_world(nearest_free_cell(grid, (row, col)))


def plan_astar(grid: OccupancyGrid, start: Tuple[int, int], goal: Tuple[int, int],
               edf: Optional[np.ndarray] = None, clearance_weight: float = 0.0,
               safe_distance: float = 0.0, min_clearance: float = 1.0) -> Path:
    """
    A* from start to goal cell

    Step cost is the move length in cells plus
    clearance_weight * max(0, safe_distance - edf)^2 for the entered cell
    (distances in cells). With a positive weight, cells whose clearance is
    below min_clearance are not entered. Diagonal moves may not cut past an
    occupied orthogonal neighbour. An occupied goal is first relocated to the
    nearest free cell.

    Raises:
        StartOccupied: the start cell is occupied
        NoPath: the goal cannot be reached
    """
    geometry: GridGeometry = grid.geometry
    height, width = geometry.shape
    start = CellIndex(*start)
    if not geometry.in_bounds(*start) or grid.is_occupied(*start):
        raise StartOccupied(f"Start cell {tuple(start)} is occupied")
    goal = nearest_free_cell(grid, goal)

    occupied: List[bool] = grid.occupied_mask().ravel().tolist()
    blocked = occupied
    penalty: Optional[List[float]] = None
    if clearance_weight > 0.0:
        if edf is None:
            edf = grid.clearance_field()
        edf = np.asarray(edf, dtype=np.float64)
        penalty = (clearance_weight * np.maximum(0.0, safe_distance - edf) ** 2).ravel().tolist()
        blocked = (grid.occupied_mask() | (edf < min_clearance)).ravel().tolist()

    start_i = start.row * width + start.col
    goal_i = goal.row * width + goal.col
    if blocked is not occupied:
        blocked[goal_i] = False
    goal_r, goal_c = goal.row, goal.col

    g_score = {start_i: 0.0}
    parent = {}
    closed = set()
    h0 = _octile(start.row, start.col, goal_r, goal_c)
    heap: List[Tuple[float, float, int]] = [(h0, h0, start_i)]

    while heap:
        _, _, index = heapq.heappop(heap)
        if index in closed:
            continue
        if index == goal_i:
            cells = [index]
            while cells[-1] in parent:
                cells.append(parent[cells[-1]])
            cells.reverse()
            return Path(cells=tuple(CellIndex(*divmod(i, width)) for i in cells),
                        resolution=geometry.resolution, cost=g_score[goal_i])
        closed.add(index)

        r, c = divmod(index, width)
        base = g_score[index]
        for dr, dc, step in _MOVES:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < height and 0 <= nc < width):
                continue
            j = nr * width + nc
            if blocked[j] or j in closed:
                continue
            if dr and dc and (occupied[r * width + nc] or occupied[nr * width + c]):
                continue
            cost = base + step
            if penalty is not None:
                cost += penalty[j]
            if cost < g_score.get(j, math.inf):
                g_score[j] = cost
                parent[j] = index
                h = _octile(nr, nc, goal_r, goal_c)
                heapq.heappush(heap, (cost + h, h, j))

    raise NoPath(f"No path from {tuple(start)} to {tuple(goal)}")


def select_waypoint(path: Path, lookahead: float, geometry: GridGeometry) -> WorldPoint:
    """First path point at least `lookahead` meters along the path (the end if none)"""
    lengths = path.cumulative_lengths()
    for index in range(1, len(path)):
        if lengths[index] >= lookahead - 1e-12:
            return geometry.cell_to_world(path.cells[index])
    return geometry.cell_to_world(path.goal)


def path_blocked(path: Path, grid: OccupancyGrid) -> bool:
    """True if any cell of the path has since become occupied"""
    return any(grid.is_occupied(*cell) for cell in path.cells)
