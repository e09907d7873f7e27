"""
Procedural scenario generator

Builds seeded apartments on a grid of rectangular rooms: 2-cell walls, 1 m
doors along a random spanning tree (plus a few extra), one piece of furniture
per room with a category unique in the scene, and a start pose in a room other
than the target's. The goal kind cycles with the seed.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
import structlog
from PIL import Image

from src.reasoning.goal import GOAL_KINDS

logger = structlog.get_logger(__name__)

RESOLUTION = 0.1
WALL_CELLS = 2
DOOR_CELLS = 10
WALL_VALUE = 255
FURNITURE_VALUE = 96
EXTRA_DOOR_PROBABILITY = 0.3

CATEGORIES = (
    'bed', 'sofa', 'tv_monitor', 'toilet', 'dining_table', 'plant',
    'refrigerator', 'bathtub', 'desk', 'wardrobe', 'bookshelf', 'piano',
)
ADJECTIVES = ('large', 'small', 'white', 'wooden', 'grey', 'blue', 'old', 'modern')


def _find(parent: List[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def _door_edges(rows: int, cols: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    """Random spanning tree over the room grid plus some extra connections"""
    edges = []
    for i in range(rows):
        for j in range(cols):
            here = i * cols + j
            if j + 1 < cols:
                edges.append((here, here + 1))
            if i + 1 < rows:
                edges.append((here, here + cols))
    order = rng.permutation(len(edges))

    parent = list(range(rows * cols))
    doors = []
    for index in order.tolist():
        a, b = edges[index]
        root_a, root_b = _find(parent, a), _find(parent, b)
        if root_a != root_b:
            parent[root_a] = root_b
            doors.append((a, b))
        elif rng.random() < EXTRA_DOOR_PROBABILITY:
            doors.append((a, b))
    return sorted(doors)


def _room_spans(sizes: List[int]) -> List[Tuple[int, int]]:
    spans, start = [], WALL_CELLS
    for size in sizes:
        spans.append((start, start + size))
        start += size + WALL_CELLS
    return spans


def build_layout(seed: int) -> Dict[str, Any]:
    """
    Raster and room boxes for a seeded apartment

    Returns a dict with 'values' (uint8 raster), 'rooms' (list of
    (row0, col0, row1, col1) interior boxes, end-exclusive) and 'rng' (the
    generator, for the steps that follow).
    """
    rng = np.random.default_rng(seed)
    grid_cols = int(rng.integers(2, 4))
    grid_rows = int(rng.integers(1, 3))
    widths = [int(round(rng.uniform(3.0, 4.5) / RESOLUTION)) for _ in range(grid_cols)]
    heights = [int(round(rng.uniform(3.0, 4.5) / RESOLUTION)) for _ in range(grid_rows)]
    col_spans = _room_spans(widths)
    row_spans = _room_spans(heights)

    values = np.full((row_spans[-1][1] + WALL_CELLS, col_spans[-1][1] + WALL_CELLS),
                     WALL_VALUE, dtype=np.uint8)
    rooms = []
    for r0, r1 in row_spans:
        for c0, c1 in col_spans:
            values[r0:r1, c0:c1] = 0
            rooms.append((r0, c0, r1, c1))

    margin = 5
    for a, b in _door_edges(grid_rows, grid_cols, rng):
        ar0, ac0, ar1, ac1 = rooms[a]
        br0, bc0, br1, bc1 = rooms[b]
        if b == a + 1:
            offset = int(rng.integers(ar0 + margin, ar1 - margin - DOOR_CELLS + 1))
            values[offset:offset + DOOR_CELLS, ac1:bc0] = 0
        else:
            offset = int(rng.integers(ac0 + margin, ac1 - margin - DOOR_CELLS + 1))
            values[ar1:br0, offset:offset + DOOR_CELLS] = 0

    return {'values': values, 'rooms': rooms, 'rng': rng}


def _furniture_box(room: Tuple[int, int, int, int],
                   rng: np.random.Generator) -> Tuple[int, int, int, int]:
    r0, c0, r1, c1 = room
    height = int(rng.integers(6, 11))
    width = int(rng.integers(6, 11))
    inset = 6
    top = int(rng.integers(r0 + inset, r1 - inset - height + 1))
    left = int(rng.integers(c0 + inset, c1 - inset - width + 1))
    return top, left, top + height, left + width


def generate_scenario(seed: int, out_dir: Union[str, Path], max_steps: int = 500,
                      success_radius: float = 1.0) -> Path:
    """
    Write a procedural scenario (map PNG, optional goal image, scenario JSON)

    Returns:
        Path of the scenario JSON
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f'scene_{seed:03d}'

    layout = build_layout(seed)
    values, rooms, rng = layout['values'], layout['rooms'], layout['rng']

    categories = rng.permutation(len(CATEGORIES))[:len(rooms)].tolist()
    instances = []
    boxes = []
    for room_index, room in enumerate(rooms):
        top, left, bottom, right = _furniture_box(room, rng)
        values[top:bottom, left:right] = FURNITURE_VALUE
        boxes.append((top, left, bottom, right))
        category = CATEGORIES[categories[room_index]]
        adjective = ADJECTIVES[int(rng.integers(len(ADJECTIVES)))]
        x0, y0 = left * RESOLUTION, top * RESOLUTION
        x1, y1 = right * RESOLUTION, bottom * RESOLUTION
        instances.append({
            'id': f'{category}_{room_index}',
            'category': category,
            'description': f'the {adjective} {category.replace("_", " ")}',
            'polygon': [[round(x0, 4), round(y0, 4)], [round(x1, 4), round(y0, 4)],
                        [round(x1, 4), round(y1, 4)], [round(x0, 4), round(y1, 4)]],
        })

    target_room = int(rng.integers(len(rooms)))
    start_room = int(rng.choice([i for i in range(len(rooms)) if i != target_room]))
    r0, c0, r1, c1 = rooms[start_room]
    inset = 6
    start_row = int(rng.integers(r0 + inset, r1 - inset))
    start_col = int(rng.integers(c0 + inset, c1 - inset))
    heading = 30 * int(rng.integers(12))

    Image.fromarray(values).save(out_dir / f'{name}.png')

    target = instances[target_room]
    kind = GOAL_KINDS[seed % len(GOAL_KINDS)]
    goal: Dict[str, Any] = {'kind': kind, 'text': ''}
    if kind == 'object_category':
        goal['text'] = target['category']
    elif kind == 'text_description':
        goal['text'] = target['description']
    else:
        top, left, bottom, right = boxes[target_room]
        pad = 15
        crop = values[max(top - pad, 0):bottom + pad, max(left - pad, 0):right + pad]
        image_name = f'{name}_goal.png'
        Image.fromarray(crop).convert('RGB').save(out_dir / image_name)
        goal['image'] = image_name
        target['image'] = image_name

    scenario = {
        'id': name,
        'map': f'{name}.png',
        'resolution': RESOLUTION,
        'origin': [0.0, 0.0],
        'wall_polarity': 'high',
        'start': {'x': round((start_col + 0.5) * RESOLUTION, 4),
                  'y': round((start_row + 0.5) * RESOLUTION, 4),
                  'heading_deg': heading},
        'goal': goal,
        'instances': instances,
        'success_radius': success_radius,
        'max_steps': max_steps,
    }
    path = out_dir / f'{name}.json'
    path.write_text(json.dumps(scenario, indent=2), encoding='utf-8')
    logger.info("Scenario generated", scenario_id=name, rooms=len(rooms), goal_kind=kind,
                target=target['id'])
    return path


def generate_batch(count: int, out_dir: Union[str, Path], first_seed: int = 0,
                   max_steps: int = 500) -> List[Path]:
    return [generate_scenario(seed, out_dir, max_steps=max_steps)
            for seed in range(first_seed, first_seed + count)]
