"""
Simulated sensors

Depth rays and camera frames are cast through the ground-truth grid with the
shared cell traversal. Leaving the grid counts as a hit.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.gridmap.geometry import GridGeometry
from src.localnav.types import Pose
from src.verification.camera import CameraIntrinsics, Frame

MIN_RANGE = 1e-6


@dataclass(frozen=True)
class DepthObservation:
    """Planar depth scan; bearings are relative to the heading"""

    bearings: Tuple[float, ...]
    ranges: Tuple[float, ...]
    hits: Tuple[bool, ...]
    fov: float
    max_range: float

    def __len__(self) -> int:
        return len(self.ranges)

    @property
    def rays(self) -> List[Tuple[float, float, bool]]:
        return list(zip(self.bearings, self.ranges, self.hits))


class Raycaster:
    """Casts rays against a fixed wall mask, optionally reporting instance cells first"""

    def __init__(self, geometry: GridGeometry, walls: np.ndarray,
                 instance_ids: Optional[np.ndarray] = None):
        self.geometry = geometry
        self._walls = np.asarray(walls, dtype=bool).tolist()
        self._instances = None if instance_ids is None else np.asarray(instance_ids).tolist()

    def cast(self, x: float, y: float, angle: float, max_range: float,
             with_instances: bool = True) -> Tuple[float, bool, int]:
        """
        First blocking cell along a ray

        Returns (range, hit, instance): range is the distance at which the
        blocking cell is entered (max_range when nothing blocks), instance the
        id of an instance cell met before any wall (0 if none).
        """
        height, width = self.geometry.height, self.geometry.width
        walls = self._walls
        instances = self._instances if with_instances else None
        for row, col, t in self.geometry.traverse_ray(x, y, angle, max_range):
            if not (0 <= row < height and 0 <= col < width):
                return max(t, MIN_RANGE), True, 0
            if instances is not None and t > 0.0 and instances[row][col]:
                return max(t, MIN_RANGE), True, instances[row][col]
            if walls[row][col]:
                return max(t, MIN_RANGE), True, 0
        return max_range, False, 0


def ray_bearings(fov: float, rays: int) -> np.ndarray:
    if rays == 1:
        return np.zeros(1)
    return np.linspace(-fov / 2.0, fov / 2.0, rays)


def render_depth(raycaster: Raycaster, pose: Pose, fov: float, max_range: float,
                 rays: int) -> DepthObservation:
    """Cast `rays` rays evenly over the FOV (edges included)"""
    bearings = ray_bearings(fov, rays)
    ranges: List[float] = []
    hits: List[bool] = []
    for bearing in bearings.tolist():
        distance, hit, _ = raycaster.cast(pose.x, pose.y, pose.heading + bearing, max_range,
                                          with_instances=False)
        ranges.append(distance)
        hits.append(hit)
    return DepthObservation(bearings=tuple(bearings.tolist()), ranges=tuple(ranges),
                            hits=tuple(hits), fov=fov, max_range=max_range)


def render_frame(raycaster: Raycaster, pose: Pose, intrinsics: CameraIntrinsics,
                 instances: Sequence = ()) -> Frame:
    """
    Egocentric depth and instance images

    Walls span every row of their column; instances stand on the floor and
    occupy the lower half of the image in front of whatever is behind them.
    """
    width, height = intrinsics.width, intrinsics.height
    depth = np.zeros((height, width), dtype=np.float64)
    ids = np.zeros((height, width), dtype=np.int32)
    horizon = height // 2

    for u in range(width):
        offset = intrinsics.column_angle(u)
        angle = pose.heading + offset
        distance, hit, instance = raycaster.cast(pose.x, pose.y, angle, intrinsics.max_depth)
        cos_offset = math.cos(offset)
        if instance:
            depth[horizon:, u] = distance * cos_offset
            ids[horizon:, u] = instance
            # Background above the object
            wall_distance, wall_hit, _ = raycaster.cast(pose.x, pose.y, angle, intrinsics.max_depth,
                                                       with_instances=False)
            if wall_hit:
                depth[:horizon, u] = wall_distance * cos_offset
        elif hit:
            depth[:, u] = distance * cos_offset

    return Frame(pose=pose, intrinsics=intrinsics, depth=depth, instance_ids=ids,
                 instances=tuple(instances))

