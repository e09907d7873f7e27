"""
Navigation node sampling

Blue-noise candidate nodes over walkable space: the walkable mask is eroded by
a wall padding, every 8-connected component of what remains is sampled with
Bridson's Poisson disk algorithm, and a gap-filling pass tops up any padded
cell left farther than the radius from every node.
"""
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
import structlog
from scipy.spatial import cKDTree

from src.gridmap.geometry import CellIndex, GridGeometry, WorldPoint
from src.gridmap.masks import connected_components, erode_with_border
from src.rooms.segmentation import RoomSegmentation
from src.utils.errors import EmptyRoom, NoSamplableArea

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class NavNode:
    id: int
    position: WorldPoint
    cell: CellIndex
    region: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'x': self.position.x,
            'y': self.position.y,
            'row': self.cell.row,
            'col': self.cell.col,
            'region': self.region,
        }


@dataclass(frozen=True)
class NodeSet:
    """Ordered node collection with the sampling parameters that produced it"""

    nodes: Tuple[NavNode, ...]
    radius: float
    padding: float

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[NavNode]:
        return iter(self.nodes)

    @property
    def ids(self) -> List[int]:
        return [node.id for node in self.nodes]

    def get(self, node_id: int) -> Optional[NavNode]:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def nearest(self, point: Tuple[float, float]) -> NavNode:
        """Node closest to a world point (lower id on ties)"""
        if not self.nodes:
            raise ValueError("NodeSet is empty")
        return min(self.nodes, key=lambda n: (n.position.distance_to(point), n.id))

    def in_region(self, region_id: int) -> 'NodeSet':
        return replace(self, nodes=tuple(n for n in self.nodes if n.region == region_id))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'radius_m': self.radius,
            'padding_m': self.padding,
            'count': len(self.nodes),
            'nodes': [node.to_dict() for node in self.nodes],
        }


class _BridsonSampler:
    """Poisson disk sampler restricted to one component of the padded mask"""

    def __init__(self, component: np.ndarray, geometry: GridGeometry, radius: float,
                 k_attempts: int, rng: np.random.Generator):
        self.component = component
        self.geometry = geometry
        self.radius = radius
        self.k_attempts = k_attempts
        self.rng = rng
        self.bucket_size = radius / math.sqrt(2.0)
        self.buckets: Dict[Tuple[int, int], Tuple[float, float]] = {}
        self.points: List[Tuple[float, float]] = []

    def _bucket(self, point: Tuple[float, float]) -> Tuple[int, int]:
        return (math.floor((point[0] - self.geometry.origin_x) / self.bucket_size),
                math.floor((point[1] - self.geometry.origin_y) / self.bucket_size))

    def inside(self, point: Tuple[float, float]) -> bool:
        row, col = self.geometry.world_to_cell(point)
        return self.geometry.in_bounds(row, col) and bool(self.component[row, col])

    def fits(self, point: Tuple[float, float]) -> bool:
        bx, by = self._bucket(point)
        r2 = self.radius * self.radius
        for gx in range(bx - 2, bx + 3):
            for gy in range(by - 2, by + 3):
                other = self.buckets.get((gx, gy))
                if other is not None:
                    if (point[0] - other[0]) ** 2 + (point[1] - other[1]) ** 2 < r2:
                        return False
        return True

    def add(self, point: Tuple[float, float]):
        self.buckets[self._bucket(point)] = point
        self.points.append(point)

    def _around(self, point: Tuple[float, float]) -> Tuple[float, float]:
        distance = self.rng.uniform(self.radius, 2.0 * self.radius)
        angle = self.rng.uniform(0.0, 2.0 * math.pi)
        return (point[0] + distance * math.cos(angle), point[1] + distance * math.sin(angle))

    def run(self) -> List[Tuple[float, float]]:
        rows, cols = np.nonzero(self.component)
        start = int(self.rng.integers(rows.size))
        self.add(self.geometry.cell_to_world((int(rows[start]), int(cols[start]))))

        active = [0]
        while active:
            slot = int(self.rng.integers(len(active)))
            origin = self.points[active[slot]]
            for _ in range(self.k_attempts):
                candidate = self._around(origin)
                if self.inside(candidate) and self.fits(candidate):
                    self.add(candidate)
                    active.append(len(self.points) - 1)
                    break
            else:
                active[slot] = active[-1]
                active.pop()

        self._fill_gaps(rows, cols)
        return self.points

    def _fill_gaps(self, rows: np.ndarray, cols: np.ndarray):
        res = self.geometry.resolution
        centers = np.column_stack((self.geometry.origin_x + (cols + 0.5) * res,
                                   self.geometry.origin_y + (rows + 0.5) * res))
        distances, _ = cKDTree(np.asarray(self.points)).query(centers)
        added = 0
        for index in np.flatnonzero(distances >= self.radius).tolist():
            center = (float(centers[index, 0]), float(centers[index, 1]))
            if self.fits(center):
                self.add(center)
                added += 1
        if added:
            logger.debug("Gap-fill nodes added", count=added)


def sample_nodes(walkable: np.ndarray, geometry: GridGeometry, padding: float, radius: float,
                 k_attempts: int = 30, rng_seed: int = 0) -> NodeSet:
    """
    Multi-component Poisson disk sampling over the padded walkable mask

    Args:
        walkable: Walkable mask
        geometry: Grid geometry of the mask
        padding: Wall clearance in meters (map edge counts as wall)
        radius: Minimum node spacing in meters
        k_attempts: Candidates tried around an active point before retiring it
        rng_seed: Seed; component c uses default_rng([rng_seed, c])

    Returns:
        NodeSet with ids 1..n in component-label order

    Raises:
        NoSamplableArea: padding erosion left no cell
    """
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    if padding < 0:
        raise ValueError(f"padding must be >= 0, got {padding}")

    padded = erode_with_border(walkable, math.ceil(padding / geometry.resolution - 1e-9))
    if not padded.any():
        raise NoSamplableArea(f"Padding of {padding} m leaves no walkable cell")

    count, components = connected_components(padded)
    nodes: List[NavNode] = []
    for label in range(1, count + 1):
        sampler = _BridsonSampler(components == label, geometry, radius, k_attempts,
                                  np.random.default_rng([rng_seed, label]))
        for point in sampler.run():
            position = WorldPoint(float(point[0]), float(point[1]))
            nodes.append(NavNode(id=len(nodes) + 1, position=position,
                                 cell=geometry.world_to_cell(position)))

    logger.info("Nodes sampled", components=count, nodes=len(nodes),
                radius_m=radius, padding_m=padding)
    return NodeSet(nodes=tuple(nodes), radius=radius, padding=padding)


def assign_regions(nodes: NodeSet, seg: RoomSegmentation) -> NodeSet:
    """Tag each node with the room label under its cell"""
    tagged = tuple(replace(node, region=int(seg.labels[node.cell.row, node.cell.col]))
                   for node in nodes)
    return replace(nodes, nodes=tagged)


def nodes_in_room(nodes: NodeSet, seg: RoomSegmentation, room_id: int, rng_seed: int = 0) -> NodeSet:
    """
    Nodes whose region is room_id

    An empty room is resampled on its own at half the radius (with padding,
    then without); if that still yields nothing, a single node is placed on
    the room cell closest to its centroid. Fallback nodes get fresh ids above
    the existing ones.

    Raises:
        UnknownRoom: room_id is not in the segmentation
        EmptyRoom: no node could be placed at all
    """
    region = seg.region(room_id)
    selected = nodes.in_region(room_id)
    if len(selected):
        return selected

    room = seg.room_mask(room_id)
    next_id = max(nodes.ids, default=0) + 1
    for padding in (nodes.padding, 0.0):
        try:
            resampled = sample_nodes(room, seg.geometry, padding, nodes.radius / 2.0,
                                     rng_seed=rng_seed)
        except NoSamplableArea:
            continue
        fallback = tuple(replace(node, id=next_id + i, region=room_id)
                         for i, node in enumerate(resampled))
        logger.info("Empty room resampled", room_id=room_id, nodes=len(fallback), padding_m=padding)
        return replace(nodes, nodes=fallback)

    rows, cols = np.nonzero(room)
    if rows.size == 0:
        raise EmptyRoom(f"Room {room_id} has no cell to place a node on")
    mean_row, mean_col = region.centroid_cell
    best = int(np.argmin((rows - mean_row) ** 2 + (cols - mean_col) ** 2))
    cell = CellIndex(int(rows[best]), int(cols[best]))
    node = NavNode(id=next_id, position=seg.geometry.cell_to_world(cell), cell=cell, region=room_id)
    logger.info("Centroid node synthesized", room_id=room_id, node_id=next_id)
    return replace(nodes, nodes=(node,))
