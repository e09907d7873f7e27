"""
Egocentric camera model

Pinhole columns over a horizontal field of view. A Frame is what the
simulator shows the detector: a depth image (meters along the optical axis,
0 = no return) and an instance-id image (0 = background).
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.config.run_config import CameraSettings
from src.localnav.types import Pose


@dataclass(frozen=True)
class CameraIntrinsics:
    hfov: float
    width: int
    height: int
    max_depth: float

    def __post_init__(self):
        if not 0.0 < self.hfov < math.pi:
            raise ValueError(f"Horizontal FOV must be in (0, pi), got {self.hfov}")
        if self.width < 1 or self.height < 1:
            raise ValueError("Image size must be positive")

    @classmethod
    def from_settings(cls, camera: CameraSettings, max_depth: float) -> 'CameraIntrinsics':
        return cls(math.radians(camera.hfov_deg), camera.width, camera.height, max_depth)

    @property
    def fx(self) -> float:
        return (self.width / 2.0) / math.tan(self.hfov / 2.0)

    @property
    def cx(self) -> float:
        return self.width / 2.0

    def column_angle(self, u: int) -> float:
        """Bearing of pixel column u relative to the heading (left is positive)"""
        return math.atan((self.cx - (u + 0.5)) / self.fx)


@dataclass(frozen=True)
class Frame:
    pose: Pose
    intrinsics: CameraIntrinsics
    depth: np.ndarray
    instance_ids: np.ndarray
    # instance_ids value i refers to instances[i - 1]
    instances: Tuple = ()

    def instance_mask(self, index: int) -> np.ndarray:
        return self.instance_ids == index + 1


@dataclass(frozen=True)
class Detection:
    category: str
    confidence: float
    mask: np.ndarray
    instance_id: Optional[str] = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"Confidence must be in [0, 1], got {self.confidence}")
        if self.confidence > 0 and not self.mask.any():
            raise ValueError("A detection with confidence > 0 needs a nonempty mask")
