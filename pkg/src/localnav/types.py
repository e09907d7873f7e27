"""
Value types shared by the simulator, the local navigator and verification
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple

from src.gridmap.geometry import CellIndex, GridGeometry, WorldPoint, wrap_angle


class DiscreteAction(str, Enum):
    MOVE_FORWARD = 'move_forward'
    TURN_LEFT = 'turn_left'
    TURN_RIGHT = 'turn_right'
    STOP = 'stop'


@dataclass(frozen=True)
class Pose:
    """Agent position and heading; heading is kept in [-pi, pi)"""

    position: WorldPoint
    heading: float

    def __post_init__(self):
        object.__setattr__(self, 'position', WorldPoint(float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, 'heading', wrap_angle(self.heading))

    @classmethod
    def at(cls, x: float, y: float, heading_deg: float = 0.0) -> 'Pose':
        return cls(WorldPoint(x, y), math.radians(heading_deg))

    @property
    def x(self) -> float:
        return self.position.x

    @property
    def y(self) -> float:
        return self.position.y

    def distance_to(self, point: Tuple[float, float]) -> float:
        return self.position.distance_to(point)

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.x, 'y': self.y, 'heading_deg': math.degrees(self.heading)}


_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Path:
    """Planner output: 8-adjacent cells from start to goal"""

    cells: Tuple[CellIndex, ...]
    resolution: float
    cost: float = 0.0

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def start(self) -> CellIndex:
        return self.cells[0]

    @property
    def goal(self) -> CellIndex:
        return self.cells[-1]

    def cumulative_lengths(self) -> List[float]:
        """Arc length in meters from the start to each cell"""
        lengths = [0.0]
        for prev, cell in zip(self.cells, self.cells[1:]):
            diagonal = prev.row != cell.row and prev.col != cell.col
            lengths.append(lengths[-1] + (_SQRT2 if diagonal else 1.0) * self.resolution)
        return lengths

    @property
    def length(self) -> float:
        return self.cumulative_lengths()[-1]

    def points(self, geometry: GridGeometry) -> List[WorldPoint]:
        return [geometry.cell_to_world(cell) for cell in self.cells]

    def suffix_from(self, cell: Tuple[int, int]) -> 'Path':
        """Remaining path from the path cell nearest to `cell` (Chebyshev, first on ties)"""
        gaps = [max(abs(c.row - cell[0]), abs(c.col - cell[1])) for c in self.cells]
        index = gaps.index(min(gaps))
        return Path(cells=self.cells[index:], resolution=self.resolution, cost=self.cost)

    def deviation(self, cell: Tuple[int, int]) -> int:
        """Chebyshev distance in cells from `cell` to the nearest path cell"""
        return min(max(abs(c.row - cell[0]), abs(c.col - cell[1])) for c in self.cells)
