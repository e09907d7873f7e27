"""
Room segmentation

Partitions the walkable part of a floor plan into numbered rooms: close small
wall gaps, take the distance-to-wall field, pick room cores as seeds, flood
the field from the seeds (watershed), then fold undersized fragments into
their best neighbour.
"""
import heapq
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import structlog
from scipy import ndimage

from src.config.run_config import RoomSettings
from src.gridmap.geometry import GridGeometry, WorldPoint
from src.gridmap.masks import (
    EIGHT_CONNECTED,
    compute_seeds,
    connected_components,
    edt_with_border,
    morphology,
)
from src.utils.errors import NoMarkers, NoWalkableSpace, UnknownRoom

logger = structlog.get_logger(__name__)

_NEIGHBOURS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class Region:
    """Metadata of one room"""

    id: int
    area: int
    centroid: WorldPoint
    centroid_cell: Tuple[float, float]
    bbox: Tuple[int, int, int, int]  # row_min, col_min, row_max, col_max (inclusive)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'area_cells': self.area,
            'centroid': [self.centroid.x, self.centroid.y],
            'bbox': list(self.bbox),
        }


@dataclass(frozen=True)
class RoomSegmentation:
    """Label grid over walkable cells plus per-room metadata"""

    geometry: GridGeometry
    labels: np.ndarray
    regions: Tuple[Region, ...]

    @classmethod
    def from_labels(cls, labels: np.ndarray, geometry: GridGeometry) -> 'RoomSegmentation':
        labels = np.asarray(labels, dtype=np.int32).copy()
        labels.setflags(write=False)
        regions = []
        for region_id in range(1, int(labels.max(initial=0)) + 1):
            rows, cols = np.nonzero(labels == region_id)
            if rows.size == 0:
                continue
            mean_row, mean_col = float(rows.mean()), float(cols.mean())
            regions.append(Region(
                id=region_id,
                area=int(rows.size),
                centroid=WorldPoint(geometry.origin_x + (mean_col + 0.5) * geometry.resolution,
                                    geometry.origin_y + (mean_row + 0.5) * geometry.resolution),
                centroid_cell=(mean_row, mean_col),
                bbox=(int(rows.min()), int(cols.min()), int(rows.max()), int(cols.max())),
            ))
        return cls(geometry=geometry, labels=labels, regions=tuple(regions))

    @property
    def count(self) -> int:
        return len(self.regions)

    @property
    def room_ids(self) -> List[int]:
        return [region.id for region in self.regions]

    def region(self, room_id: int) -> Region:
        for region in self.regions:
            if region.id == room_id:
                return region
        raise UnknownRoom(f"Room {room_id} is not in the segmentation (rooms 1..{self.count})")

    def largest_region(self) -> Region:
        # ties go to the lower id
        return max(self.regions, key=lambda r: (r.area, -r.id))

    def room_mask(self, room_id: int) -> np.ndarray:
        self.region(room_id)
        return self.labels == room_id

    def label_at(self, point: Tuple[float, float]) -> int:
        row, col = self.geometry.world_to_cell(point)
        if not self.geometry.in_bounds(row, col):
            return 0
        return int(self.labels[row, col])

    def nearest_label(self, point: Tuple[float, float]) -> int:
        """Label at the point, or of the closest labeled cell when the point is unlabeled"""
        label = self.label_at(point)
        if label:
            return label
        cell = self.geometry.clamp(self.geometry.world_to_cell(point))
        _, (rows, cols) = ndimage.distance_transform_edt(self.labels == 0, return_indices=True)
        return int(self.labels[rows[cell], cols[cell]])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'resolution': self.geometry.resolution,
            'origin': [self.geometry.origin_x, self.geometry.origin_y],
            'width': self.geometry.width,
            'height': self.geometry.height,
            'regions': [region.to_dict() for region in self.regions],
        }


def watershed(topography: np.ndarray, markers: np.ndarray, domain: np.ndarray) -> np.ndarray:
    """
    Priority-flood watershed

    Floods the domain from the marker cells, lowest topography first (pass the
    negated distance field to grow rooms from their cores outward). A domain
    cell takes the label of the first basin to reach it; equal levels go to
    the lower label. Cells outside the domain stay 0, as do domain cells that
    no marker can reach.

    Raises:
        NoMarkers: no positive marker inside the domain
    """
    domain = np.asarray(domain, dtype=bool)
    markers = np.where(domain, np.asarray(markers, dtype=np.int32), 0)
    if not (markers > 0).any():
        raise NoMarkers("Watershed needs at least one marker inside the domain")

    height, width = markers.shape
    level = np.asarray(topography, dtype=np.float64).ravel().tolist()
    inside = domain.ravel().tolist()
    out = markers.ravel().tolist()

    heap: List[Tuple[float, int, int, int]] = []
    counter = 0

    def push_neighbours(index: int, label: int):
        nonlocal counter
        row, col = divmod(index, width)
        for dr, dc in _NEIGHBOURS_8:
            r, c = row + dr, col + dc
            if 0 <= r < height and 0 <= c < width:
                j = r * width + c
                if inside[j] and out[j] == 0:
                    heapq.heappush(heap, (level[j], label, counter, j))
                    counter += 1

    for index in np.flatnonzero(markers.ravel()).tolist():
        push_neighbours(index, out[index])

    while heap:
        _, label, _, index = heapq.heappop(heap)
        if out[index]:
            continue
        out[index] = label
        push_neighbours(index, label)

    return np.asarray(out, dtype=np.int32).reshape(height, width)


def _compact(labels: np.ndarray) -> np.ndarray:
    ids = np.unique(labels[labels > 0])
    lookup = np.zeros(int(labels.max(initial=0)) + 1, dtype=np.int32)
    lookup[ids] = np.arange(1, ids.size + 1, dtype=np.int32)
    return lookup[labels]


def merge_small_rooms(labels: np.ndarray, min_area: float) -> np.ndarray:
    """
    Fold regions smaller than min_area (cells) into an adjacent region

    The smallest undersized region is merged first (lower id on ties) into the
    neighbour maximizing shared_boundary / (1 + centroid_distance), where
    shared_boundary counts the small region's cells 8-adjacent to the
    neighbour and distances are in cells. Regions without neighbours are left
    alone. Labels are compacted to 1..k afterwards.
    """
    labels = np.asarray(labels, dtype=np.int32).copy()
    isolated = set()
    merges = 0

    while True:
        ids, counts = np.unique(labels[labels > 0], return_counts=True)
        small = sorted((int(count), int(region_id)) for region_id, count in zip(ids, counts)
                       if count < min_area and int(region_id) not in isolated)
        if not small:
            break

        _, region_id = small[0]
        mask = labels == region_id
        ring = ndimage.binary_dilation(mask, structure=EIGHT_CONNECTED) & ~mask
        neighbours = sorted(int(n) for n in np.unique(labels[ring]) if n > 0)
        if not neighbours:
            isolated.add(region_id)
            continue

        rows, cols = np.nonzero(mask)
        centroid = (rows.mean(), cols.mean())
        best_score, best_id = -1.0, None
        for neighbour_id in neighbours:
            neighbour = labels == neighbour_id
            shared = int((mask & ndimage.binary_dilation(neighbour, structure=EIGHT_CONNECTED)).sum())
            n_rows, n_cols = np.nonzero(neighbour)
            distance = math.hypot(n_rows.mean() - centroid[0], n_cols.mean() - centroid[1])
            score = shared / (1.0 + distance)
            if score > best_score:
                best_score, best_id = score, neighbour_id

        labels[mask] = best_id
        merges += 1
        logger.debug("Merged small room", room_id=region_id, into=best_id,
                     area=int(mask.sum()), score=round(best_score, 4))

    if merges:
        logger.info("Small rooms merged", merges=merges, isolated=len(isolated))
    return _compact(labels)


def segment_rooms(wall_mask: np.ndarray, geometry: GridGeometry,
                  cfg: Optional[RoomSettings] = None) -> RoomSegmentation:
    """
    Segment walkable space into rooms

    Args:
        wall_mask: M0, true on walls
        geometry: Grid geometry of the mask
        cfg: Segmentation parameters (defaults from RoomSettings)

    Returns:
        RoomSegmentation covering every walkable cell

    Raises:
        NoWalkableSpace: the mask is all wall
    """
    cfg = cfg or RoomSettings()
    wall_mask = np.asarray(wall_mask, dtype=bool)
    walkable = ~wall_mask
    if not walkable.any():
        raise NoWalkableSpace("Wall mask leaves no walkable cell")

    closed = morphology(wall_mask, 'close', cfg.close_radius)
    dist = edt_with_border(closed)

    threshold_cells = None
    if cfg.distance_threshold_m is not None:
        threshold_cells = cfg.distance_threshold_m / geometry.resolution
    seeds = compute_seeds(dist, ~closed, sigma=cfg.blur_sigma, distance_threshold=threshold_cells)

    # Keep cores clear of the band around the walls; the band is flooded, not seeded
    band = morphology(closed, 'dilate', cfg.background_radius)
    cores = seeds & ~band
    if not cores.any():
        cores = seeds
    if not cores.any():
        cores = walkable

    marker_count, markers = connected_components(cores)
    labels = watershed(-dist, markers, walkable)

    # Walkable pockets no marker can reach still need a room
    pockets = walkable & (labels == 0)
    if pockets.any():
        _, extra = connected_components(pockets)
        labels = np.where(extra > 0, extra + labels.max(), labels).astype(np.int32)

    min_area_cells = cfg.min_room_area_m2 / (geometry.resolution ** 2)
    labels = merge_small_rooms(labels, min_area_cells)

    segmentation = RoomSegmentation.from_labels(labels, geometry)
    logger.info("Rooms segmented", markers=marker_count, rooms=segmentation.count,
                min_area_cells=round(min_area_cells, 1))
    return segmentation
