"""
Global map rasters

A GridMap is the agent's prior top-down map: an 8-bit grayscale raster placed
in the world by a resolution and an origin. Masks, distance fields and label
grids derived from it are plain numpy arrays with the same shape.
"""
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Tuple, Union

import numpy as np
import structlog
from PIL import Image, UnidentifiedImageError

from src.gridmap.geometry import GridGeometry
from src.utils.errors import BadMetadata, DecodeError

logger = structlog.get_logger(__name__)

WallPolarity = Literal['high', 'low']


@dataclass(frozen=True)
class MapMeta:
    """Sidecar metadata for a map raster"""

    resolution: float
    origin: Tuple[float, float] = (0.0, 0.0)
    wall_polarity: WallPolarity = 'high'


@dataclass(frozen=True)
class GridMap:
    """Immutable global map; `values` has shape (height, width), dtype uint8"""

    geometry: GridGeometry
    values: np.ndarray
    wall_polarity: WallPolarity = 'high'

    def __post_init__(self):
        if self.values.shape != self.geometry.shape:
            raise BadMetadata(
                f"Raster shape {self.values.shape} does not match geometry {self.geometry.shape}")
        if self.values.dtype != np.uint8:
            object.__setattr__(self, 'values', np.clip(self.values, 0, 255).astype(np.uint8))
        self.values.setflags(write=False)

    @classmethod
    def from_array(cls, values: np.ndarray, resolution: float,
                   origin: Tuple[float, float] = (0.0, 0.0),
                   wall_polarity: WallPolarity = 'high') -> 'GridMap':
        values = np.array(values, copy=True)
        height, width = values.shape
        geometry = GridGeometry(width, height, resolution, float(origin[0]), float(origin[1]))
        return cls(geometry=geometry, values=values, wall_polarity=wall_polarity)

    @property
    def width(self) -> int:
        return self.geometry.width

    @property
    def height(self) -> int:
        return self.geometry.height

    @property
    def resolution(self) -> float:
        return self.geometry.resolution


def load_map(image_bytes: bytes, meta: MapMeta) -> GridMap:
    """
    Decode a grayscale raster (PGM, PNG, ...) into a GridMap

    Args:
        image_bytes: Encoded raster
        meta: Resolution, origin and wall polarity

    Returns:
        GridMap with values copied from the raster

    Raises:
        BadMetadata: resolution <= 0
        DecodeError: bytes are not a decodable image
    """
    if not meta.resolution > 0:
        raise BadMetadata(f"Resolution must be > 0, got {meta.resolution}")

    try:
        with Image.open(io.BytesIO(image_bytes)) as img:
            values = np.array(img.convert('L'), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise DecodeError(f"Could not decode map raster: {e}") from e

    return GridMap.from_array(values, meta.resolution, meta.origin, meta.wall_polarity)


def load_map_file(path: Union[str, Path], meta: MapMeta) -> GridMap:
    """Read and decode a map raster from disk"""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise DecodeError(f"Could not read map file {path}: {e}") from e

    grid_map = load_map(data, meta)
    logger.debug("Map loaded", path=str(path), width=grid_map.width,
                 height=grid_map.height, resolution=meta.resolution)
    return grid_map


def extract_wall_mask(grid_map: GridMap, wall_threshold: int = 128) -> np.ndarray:
    """
    Threshold the map into a wall mask M0

    With 'high' polarity a cell is wall iff value >= threshold; with 'low'
    polarity (dark walls on light floor) iff value < threshold.
    """
    if not 0 <= wall_threshold <= 255:
        raise ValueError(f"wall_threshold must be in [0, 255], got {wall_threshold}")
    if grid_map.wall_polarity == 'low':
        return grid_map.values < wall_threshold
    return grid_map.values >= wall_threshold


def save_label_raster(labels: np.ndarray, path: Union[str, Path]) -> Path:
    """Write a label grid as a 16-bit binary PGM (big-endian samples)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if labels.max(initial=0) > 65535:
        raise ValueError("Too many labels for a 16-bit raster")
    height, width = labels.shape
    header = f"P5\n{width} {height}\n65535\n".encode('ascii')
    path.write_bytes(header + labels.astype('>u2').tobytes())
    return path


def read_label_raster(path: Union[str, Path]) -> np.ndarray:
    """Read back a 16-bit PGM written by save_label_raster"""
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b'P5':
        raise DecodeError(f"Not a binary PGM: {path}")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    # The header ends with exactly one whitespace byte after maxval
    offset = len(data) - width * height * (2 if maxval > 255 else 1)
    dtype = '>u2' if maxval > 255 else 'u1'
    return np.frombuffer(data[offset:], dtype=dtype).reshape(height, width).astype(np.int32)
