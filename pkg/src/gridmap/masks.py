"""
Mask operations shared by segmentation, node sampling and planning

Masks are boolean arrays, distance fields float64 arrays in cell units and
label grids int32 arrays (0 = background). Every function here is pure.
"""
from typing import Literal, Optional, Tuple

import numpy as np
import structlog
from scipy import ndimage
from skimage.filters import threshold_otsu

from src.utils.errors import DegenerateField

logger = structlog.get_logger(__name__)

MorphOp = Literal['close', 'erode', 'dilate']

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def _square(radius: int) -> np.ndarray:
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)


def morphology(mask: np.ndarray, op: MorphOp, kernel_radius: int) -> np.ndarray:
    """
    Binary morphology with a square (2r+1) structuring element

    Cells outside the grid are neutral: they never add to a dilation and never
    erode their neighbours, so `close` is exactly dilate followed by erode.
    """
    if kernel_radius < 0:
        raise ValueError(f"kernel_radius must be >= 0, got {kernel_radius}")
    mask = np.asarray(mask, dtype=bool)
    if kernel_radius == 0:
        return mask.copy()

    structure = _square(kernel_radius)
    if op == 'dilate':
        return ndimage.binary_dilation(mask, structure=structure, border_value=0)
    if op == 'erode':
        return ndimage.binary_erosion(mask, structure=structure, border_value=1)
    if op == 'close':
        dilated = ndimage.binary_dilation(mask, structure=structure, border_value=0)
        return ndimage.binary_erosion(dilated, structure=structure, border_value=1)
    raise ValueError(f"Unknown morphology op: {op}")


def erode_with_border(mask: np.ndarray, kernel_radius: int) -> np.ndarray:
    """Erode treating everything outside the grid as false (map edge = wall)"""
    if kernel_radius <= 0:
        return np.asarray(mask, dtype=bool).copy()
    return ndimage.binary_erosion(np.asarray(mask, dtype=bool),
                                  structure=_square(kernel_radius), border_value=0)


def edt(mask: np.ndarray) -> np.ndarray:
    """
    Exact Euclidean distance (cells) from every cell to the nearest true cell

    Raises:
        DegenerateField: mask has no true cell
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise DegenerateField("Distance transform needs at least one true cell")
    return ndimage.distance_transform_edt(~mask).astype(np.float64)


def edt_with_border(mask: np.ndarray) -> np.ndarray:
    """Distance to the nearest true cell where the ring just outside the grid counts as true"""
    padded = np.pad(np.asarray(mask, dtype=bool), 1, constant_values=True)
    return ndimage.distance_transform_edt(~padded)[1:-1, 1:-1].astype(np.float64)


def compute_seeds(dist: np.ndarray, free: np.ndarray, sigma: float = 2.0,
                  distance_threshold: Optional[float] = None) -> np.ndarray:
    """
    Room-core seeds from a wall distance field

    The field is normalized to [0, 255], blurred (Gaussian, truncated at 3 sigma)
    and split with Otsu's threshold computed over the free cells. A constant
    field has no core structure; the whole free mask is returned then.

    Args:
        dist: Distance-to-wall field (cells)
        free: Walkable mask
        sigma: Blur sigma in cells
        distance_threshold: Optional constant threshold in cells replacing Otsu

    Returns:
        Seed mask, always a subset of `free`
    """
    free = np.asarray(free, dtype=bool)
    if dist.shape != free.shape:
        raise ValueError(f"Field shape {dist.shape} does not match mask shape {free.shape}")
    if not free.any():
        return free.copy()

    if distance_threshold is not None:
        return (dist >= distance_threshold) & free

    peak = float(dist.max())
    if peak <= 0.0 or np.ptp(dist[free]) <= 1e-9:
        return free.copy()

    normalized = dist * (255.0 / peak)
    blurred = ndimage.gaussian_filter(normalized, sigma=sigma, truncate=3.0)
    samples = blurred[free]
    if np.ptp(samples) <= 1e-9:
        return free.copy()

    threshold = threshold_otsu(samples)
    seeds = (blurred >= threshold) & free
    if not seeds.any():
        return free.copy()

    logger.debug("Seeds computed", otsu_threshold=float(threshold), seed_cells=int(seeds.sum()))
    return seeds


def connected_components(mask: np.ndarray) -> Tuple[int, np.ndarray]:
    """8-connected components labeled 1..count in scan order; background 0"""
    labels, count = ndimage.label(np.asarray(mask, dtype=bool), structure=EIGHT_CONNECTED)
    return int(count), labels.astype(np.int32)
