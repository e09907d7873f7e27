"""
Scenario files

A scenario is a JSON document naming the ground-truth map, the start pose,
the goal and the object instances. Paths inside it are relative to the
scenario file.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match
from PIL import Image
from skimage.draw import polygon as draw_polygon
from skimage.measure import points_in_poly

from src.gridmap.geometry import CellIndex, GridGeometry
from src.gridmap.grid import GridMap, MapMeta, extract_wall_mask, load_map_file
from src.localnav.types import Pose
from src.reasoning.goal import GOAL_KINDS, GoalSpec
from src.utils.errors import DecodeError, SchemaError, StartInWall

logger = structlog.get_logger(__name__)

_POINT = {'type': 'array', 'items': {'type': 'number'}, 'minItems': 2, 'maxItems': 2}

SCENARIO_SCHEMA: Dict[str, Any] = {
    'type': 'object',
    'required': ['map', 'resolution', 'start', 'goal', 'instances'],
    'additionalProperties': False,
    'properties': {
        'id': {'type': 'string', 'minLength': 1},
        'map': {'type': 'string', 'minLength': 1},
        'resolution': {'type': 'number', 'exclusiveMinimum': 0},
        'origin': _POINT,
        'wall_polarity': {'enum': ['high', 'low']},
        'start': {
            'type': 'object',
            'required': ['x', 'y', 'heading_deg'],
            'additionalProperties': False,
            'properties': {
                'x': {'type': 'number'},
                'y': {'type': 'number'},
                'heading_deg': {'type': 'number'},
            },
        },
        'goal': {
            'type': 'object',
            'required': ['kind', 'text'],
            'additionalProperties': False,
            'properties': {
                'kind': {'enum': list(GOAL_KINDS)},
                'text': {'type': 'string'},
                'image': {'type': 'string', 'minLength': 1},
            },
            'if': {'properties': {'kind': {'const': 'instance_image'}}},
            'then': {'required': ['image']},
            'else': {'not': {'required': ['image']}},
        },
        'instances': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'required': ['id', 'category'],
                'additionalProperties': False,
                'anyOf': [{'required': ['point']}, {'required': ['polygon']}],
                'properties': {
                    'id': {'type': 'string', 'minLength': 1},
                    'category': {'type': 'string', 'minLength': 1},
                    'description': {'type': 'string'},
                    'point': _POINT,
                    'polygon': {'type': 'array', 'items': _POINT, 'minItems': 3},
                    'image': {'type': 'string', 'minLength': 1},
                },
            },
        },
        # Axis-aligned [x_min, y_min, x_max, y_max] boxes missing from the agent's map
        'obstacles': {
            'type': 'array',
            'items': {'type': 'array', 'items': {'type': 'number'}, 'minItems': 4, 'maxItems': 4},
        },
        'success_radius': {'type': 'number', 'exclusiveMinimum': 0},
        'max_steps': {'type': 'integer', 'minimum': 1},
    },
}

_validator = Draft7Validator(SCENARIO_SCHEMA)


def _segment_distances(xs: np.ndarray, ys: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    best = np.full(xs.shape, np.inf)
    for (ax, ay), (bx, by) in zip(vertices, np.roll(vertices, -1, axis=0)):
        dx, dy = bx - ax, by - ay
        length2 = dx * dx + dy * dy
        if length2 == 0.0:
            t = np.zeros_like(xs)
        else:
            t = np.clip(((xs - ax) * dx + (ys - ay) * dy) / length2, 0.0, 1.0)
        best = np.minimum(best, np.hypot(xs - (ax + t * dx), ys - (ay + t * dy)))
    return best


@dataclass(frozen=True)
class Instance:
    """An object in the scene; footprint is a point or a polygon in world meters"""

    id: str
    category: str
    description: Optional[str] = None
    point: Optional[Tuple[float, float]] = None
    polygon: Optional[Tuple[Tuple[float, float], ...]] = None
    image: Optional[str] = None

    @property
    def center(self) -> Tuple[float, float]:
        if self.polygon:
            vertices = np.asarray(self.polygon, dtype=np.float64)
            return float(vertices[:, 0].mean()), float(vertices[:, 1].mean())
        return float(self.point[0]), float(self.point[1])

    def distance_field(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Distance from each (x, y) to the nearest footprint point; 0 inside a polygon"""
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        if not self.polygon:
            return np.hypot(xs - self.point[0], ys - self.point[1])
        vertices = np.asarray(self.polygon, dtype=np.float64)
        distances = _segment_distances(xs, ys, vertices)
        inside = points_in_poly(np.column_stack((xs.ravel(), ys.ravel())), vertices)
        distances[inside.reshape(xs.shape)] = 0.0
        return distances

    def distance_to(self, point: Tuple[float, float]) -> float:
        return float(self.distance_field(np.array([point[0]]), np.array([point[1]]))[0])

    def footprint_cells(self, geometry: GridGeometry) -> List[CellIndex]:
        """Cells whose centers fall inside the footprint (the center cell for points or slivers)"""
        if self.polygon:
            vertices = np.asarray(self.polygon, dtype=np.float64)
            rows, cols = draw_polygon((vertices[:, 1] - geometry.origin_y) / geometry.resolution - 0.5,
                                      (vertices[:, 0] - geometry.origin_x) / geometry.resolution - 0.5,
                                      shape=geometry.shape)
            if rows.size:
                return [CellIndex(int(r), int(c)) for r, c in zip(rows, cols)]
        cell = geometry.world_to_cell(self.center)
        return [cell] if geometry.in_bounds(*cell) else []


def _same_text(a: Optional[str], b: Optional[str]) -> bool:
    return a is not None and b is not None and a.strip().lower() == b.strip().lower()


def matches_goal(instance: Instance, goal: GoalSpec) -> bool:
    """Whether an instance satisfies the goal"""
    if goal.kind == 'object_category':
        return _same_text(instance.category, goal.text)
    if goal.kind == 'text_description':
        return _same_text(instance.description or instance.category, goal.text)
    return (instance.image is not None and goal.image_path is not None
            and Path(instance.image).resolve() == Path(goal.image_path).resolve())


@dataclass(frozen=True)
class Scenario:
    id: str
    path: Optional[Path]
    map: GridMap
    start: Pose
    goal: GoalSpec
    instances: Tuple[Instance, ...]
    # None: taken from the run config
    success_radius: Optional[float] = None
    max_steps: Optional[int] = None
    obstacles: Tuple[Tuple[float, float, float, float], ...] = ()
    wall_threshold: int = 128
    raw: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def geometry(self) -> GridGeometry:
        return self.map.geometry

    @property
    def targets(self) -> List[Instance]:
        return [instance for instance in self.instances if matches_goal(instance, self.goal)]

    def agent_wall_mask(self) -> np.ndarray:
        """M0: walls as drawn on the prior map"""
        return extract_wall_mask(self.map, self.wall_threshold)

    def truth_wall_mask(self) -> np.ndarray:
        """Ground-truth walls: the map's walls plus unmapped obstacles"""
        walls = self.agent_wall_mask().copy()
        geometry = self.geometry
        for x_min, y_min, x_max, y_max in self.obstacles:
            r0, c0 = geometry.clamp(geometry.world_to_cell((x_min, y_min)))
            r1, c1 = geometry.clamp(geometry.world_to_cell((x_max, y_max)))
            walls[min(r0, r1):max(r0, r1) + 1, min(c0, c1):max(c0, c1) + 1] = True
        return walls


def _resolve(base: Path, relative: str) -> Path:
    candidate = Path(relative)
    return candidate if candidate.is_absolute() else base / candidate


def parse_scenario(data: Dict[str, Any], base_dir: Union[str, Path] = '.',
                   wall_threshold: int = 128, scenario_id: Optional[str] = None,
                   source: Optional[Path] = None) -> Scenario:
    """
    Validate a scenario document and load what it references

    Raises:
        SchemaError: document does not match the schema, files are missing or
            the goal matches no instance
        StartInWall: start position is on a ground-truth wall
    """
    error = best_match(_validator.iter_errors(data))
    if error is not None:
        location = '/'.join(str(p) for p in error.absolute_path) or '<root>'
        raise SchemaError(f"Scenario invalid at {location}: {error.message}")

    base_dir = Path(base_dir)
    meta = MapMeta(resolution=float(data['resolution']),
                   origin=tuple(data.get('origin', (0.0, 0.0))),
                   wall_polarity=data.get('wall_polarity', 'high'))
    try:
        grid_map = load_map_file(_resolve(base_dir, data['map']), meta)
    except DecodeError as e:
        raise SchemaError(f"Scenario map could not be loaded: {e}") from e

    goal_data = data['goal']
    goal_image, goal_image_path = None, None
    if 'image' in goal_data:
        goal_image_path = str(_resolve(base_dir, goal_data['image']))
        try:
            with Image.open(goal_image_path) as img:
                goal_image = img.convert('RGB')
        except OSError as e:
            raise SchemaError(f"Goal image could not be loaded: {e}") from e
    try:
        goal = GoalSpec(kind=goal_data['kind'], text=goal_data['text'],
                        image=goal_image, image_path=goal_image_path)
    except ValueError as e:
        raise SchemaError(f"Invalid goal: {e}") from e

    instances = tuple(
        Instance(id=item['id'], category=item['category'],
                 description=item.get('description'),
                 point=tuple(item['point']) if 'point' in item else None,
                 polygon=tuple(tuple(v) for v in item['polygon']) if 'polygon' in item else None,
                 image=str(_resolve(base_dir, item['image'])) if 'image' in item else None)
        for item in data['instances'])

    start = data['start']
    scenario = Scenario(
        id=data.get('id') or scenario_id or 'scenario',
        path=source,
        map=grid_map,
        start=Pose.at(start['x'], start['y'], start['heading_deg']),
        goal=goal,
        instances=instances,
        success_radius=data.get('success_radius'),
        max_steps=data.get('max_steps'),
        obstacles=tuple(tuple(float(v) for v in box) for box in data.get('obstacles', ())),
        wall_threshold=wall_threshold,
        raw=data,
    )

    if not scenario.targets:
        raise SchemaError(f"Goal {goal.kind}:{goal.text!r} matches no instance")

    row, col = scenario.geometry.world_to_cell(scenario.start.position)
    if not scenario.geometry.in_bounds(row, col) or scenario.truth_wall_mask()[row, col]:
        raise StartInWall(f"Start ({start['x']}, {start['y']}) is not on walkable ground")

    return scenario


def load_scenario(path: Union[str, Path], wall_threshold: int = 128) -> Scenario:
    """Read, validate and load a scenario file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"Could not read scenario {path}: {e}") from e

    scenario = parse_scenario(data, path.parent, wall_threshold, scenario_id=path.stem, source=path)
    logger.debug("Scenario loaded", scenario_id=scenario.id, goal_kind=scenario.goal.kind,
                 instances=len(scenario.instances))
    return scenario


def list_scenarios(directory: Union[str, Path]) -> List[Path]:
    """Scenario files in a directory, sorted by name"""
    return sorted(p for p in Path(directory).glob('*.json') if p.is_file())