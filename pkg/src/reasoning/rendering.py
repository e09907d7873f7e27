"""
Annotated map rendering

Everything is drawn in raster space (row 0 at the top of the image). Walls
are dark and floor is light whatever the map's wall polarity; rooms get a
pale tint, room boundaries are white, and ids are yellow on a black box.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from src.gridmap.grid import GridMap
from src.nodes.sampling import NavNode
from src.rooms.segmentation import RoomSegmentation

BOUNDARY_COLOR = (255, 255, 255)
LABEL_COLOR = (255, 230, 0)
LABEL_BACKGROUND = (0, 0, 0)
MARKER_COLORS = {'blue': (0, 64, 255), 'red': (230, 0, 0)}

# Pale room tints; none of them is pure white
ROOM_TINTS = (
    (255, 214, 214), (214, 236, 255), (214, 255, 220), (255, 244, 204),
    (236, 218, 255), (204, 250, 250), (255, 224, 244), (232, 232, 200),
)
UNLABELED_CEILING = 200

BBox = Tuple[int, int, int, int]


@dataclass
class AnnotatedMap:
    """Rendered image plus where each id label was drawn (x0, y0, x1, y1 in pixels)"""

    image: Image.Image
    labels: Dict[int, BBox] = field(default_factory=dict)
    offset: Tuple[int, int] = (0, 0)
    scale: int = 1

    def pixel_of(self, cell: Tuple[float, float]) -> Tuple[float, float]:
        """Pixel (x, y) at the center of a grid cell"""
        row, col = cell
        return ((col - self.offset[1] + 0.5) * self.scale, (row - self.offset[0] + 0.5) * self.scale)

    def cell_of(self, pixel: Tuple[float, float]) -> Tuple[int, int]:
        """Grid (row, col) under a pixel (x, y)"""
        x, y = pixel
        return (int(math.floor(y / self.scale)) + self.offset[0],
                int(math.floor(x / self.scale)) + self.offset[1])


def map_schematic(grid_map: GridMap) -> np.ndarray:
    """RGB array with dark walls and light floor"""
    values = grid_map.values.astype(np.uint8)
    gray = values if grid_map.wall_polarity == 'low' else 255 - values
    return np.repeat(gray[:, :, None], 3, axis=2)


def room_boundaries(labels: np.ndarray) -> np.ndarray:
    """Labeled cells with a 4-neighbour carrying a different nonzero label"""
    labels = np.asarray(labels)
    boundary = np.zeros(labels.shape, dtype=bool)
    for shift_axis, forward in ((0, slice(1, None)), (1, slice(1, None))):
        ahead = [slice(None), slice(None)]
        behind = [slice(None), slice(None)]
        ahead[shift_axis] = forward
        behind[shift_axis] = slice(None, -1)
        a, b = labels[tuple(ahead)], labels[tuple(behind)]
        change = (a > 0) & (b > 0) & (a != b)
        boundary[tuple(ahead)] |= change
        boundary[tuple(behind)] |= change
    return boundary


def _upscale(pixels: np.ndarray, scale: int) -> Image.Image:
    image = Image.fromarray(np.ascontiguousarray(pixels.astype(np.uint8)))
    if scale > 1:
        image = image.resize((image.width * scale, image.height * scale), Image.Resampling.NEAREST)
    return image


def _draw_label(draw: ImageDraw.ImageDraw, font, text: str, center: Tuple[float, float]) -> BBox:
    left, top, right, bottom = draw.textbbox((0, 0), text, font=font)
    width, height = right - left, bottom - top
    x = int(round(center[0] - width / 2.0))
    y = int(round(center[1] - height / 2.0))
    box = (x - 1, y - 1, x + width + 1, y + height + 1)
    draw.rectangle(box, fill=LABEL_BACKGROUND)
    draw.text((x - left, y - top), text, fill=LABEL_COLOR, font=font)
    return box


def _annotate(canvas: AnnotatedMap, items: Iterable[Tuple[int, Tuple[float, float]]]) -> AnnotatedMap:
    draw = ImageDraw.Draw(canvas.image)
    font = ImageFont.load_default()
    for label, cell in items:
        canvas.labels[label] = _draw_label(draw, font, str(label), canvas.pixel_of(cell))
    return canvas


def _room_pixels(grid_map: GridMap, seg: RoomSegmentation) -> np.ndarray:
    pixels = map_schematic(grid_map).astype(np.float64)
    labels = seg.labels
    for index, region in enumerate(seg.regions):
        tint = np.array(ROOM_TINTS[index % len(ROOM_TINTS)], dtype=np.float64) / 255.0
        inside = labels == region.id
        pixels[inside] = pixels[inside] * tint
    unlabeled = labels == 0
    pixels[unlabeled] = np.minimum(pixels[unlabeled], UNLABELED_CEILING)
    pixels[room_boundaries(labels)] = BOUNDARY_COLOR
    return pixels


def render_room_map(grid_map: GridMap, seg: RoomSegmentation, scale: int = 1) -> AnnotatedMap:
    """
    Floor plan with tinted rooms, white room boundaries and room ids at the
    room centroids

    The image is (width * scale, height * scale) pixels, so the default scale
    gives one pixel per map cell. Prompts are rendered at
    reasoning.render_scale.
    """
    canvas = render_floor_plan(grid_map, seg, scale)
    return _annotate(canvas, ((region.id, region.centroid_cell) for region in seg.regions))


def render_floor_plan(grid_map: GridMap, seg: RoomSegmentation, scale: int = 1) -> AnnotatedMap:
    """Room-tinted floor plan without any id labels"""
    return AnnotatedMap(image=_upscale(_room_pixels(grid_map, seg), scale), scale=scale)


def crop_box(grid_map: GridMap, bbox: BBox, margin: int) -> BBox:
    """Inclusive (row_min, col_min, row_max, col_max) grown by margin and clipped to the map"""
    r0, c0, r1, c1 = bbox
    return (max(r0 - margin, 0), max(c0 - margin, 0),
            min(r1 + margin, grid_map.height - 1), min(c1 + margin, grid_map.width - 1))


def render_node_map(grid_map: GridMap, room_bbox: BBox, nodes: Iterable[NavNode], margin: int = 0,
                    scale: int = 1) -> Tuple[Image.Image, AnnotatedMap]:
    """
    Plain and node-annotated crops of one room

    Both crops cover the room's bounding box grown by `margin` cells; the
    annotated one has every node id drawn at its cell.
    """
    r0, c0, r1, c1 = crop_box(grid_map, room_bbox, margin)
    pixels = map_schematic(grid_map)[r0:r1 + 1, c0:c1 + 1]
    plain = _upscale(pixels, scale)
    canvas = AnnotatedMap(image=plain.copy(), offset=(r0, c0), scale=scale)
    inside = [(node.id, node.cell) for node in nodes if r0 <= node.cell.row <= r1 and c0 <= node.cell.col <= c1]
    return plain, _annotate(canvas, inside)


def render_node_overview(grid_map: GridMap, seg: RoomSegmentation, nodes: Iterable[NavNode],
                         scale: int = 1) -> AnnotatedMap:
    """Whole floor plan with room tints and every node id (no room ids)"""
    canvas = render_floor_plan(grid_map, seg, scale)
    return _annotate(canvas, ((node.id, node.cell) for node in nodes))


def render_candidate_crop(grid_map: GridMap, point: Tuple[float, float], color: str,
                          margin_m: float = 1.5, scale: int = 1) -> Image.Image:
    """
    Crop of the floor plan around a world point with a colored circle on it

    Args:
        color: 'blue' or 'red'
        margin_m: Half-size of the crop in meters
    """
    if color not in MARKER_COLORS:
        raise ValueError(f"Unknown marker color '{color}'")
    geometry = grid_map.geometry
    cell = geometry.clamp(geometry.world_to_cell(point))
    margin = max(int(round(margin_m / geometry.resolution)), 1)
    r0, c0, r1, c1 = crop_box(grid_map, (cell.row, cell.col, cell.row, cell.col), margin)
    image = _upscale(map_schematic(grid_map)[r0:r1 + 1, c0:c1 + 1], scale)

    x = (cell.col - c0 + 0.5) * scale
    y = (cell.row - r0 + 0.5) * scale
    radius = max(0.3 / geometry.resolution * scale, 3.0)
    draw = ImageDraw.Draw(image)
    draw.ellipse((x - radius, y - radius, x + radius, y + radius), outline=MARKER_COLORS[color],
                 width=max(scale, 2))
    return image
