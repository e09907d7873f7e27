"""
Shared fixtures: small synthetic floor plans and scenario builders
"""
import json

import numpy as np
import pytest
from PIL import Image

from src.config.run_config import RunConfig
from src.gridmap.grid import GridMap
from src.simulator.scenario import parse_scenario

WALL = 255
FLOOR = 0


def _frame(height: int, width: int) -> np.ndarray:
    values = np.full((height, width), FLOOR, dtype=np.uint8)
    values[0, :] = WALL
    values[-1, :] = WALL
    values[:, 0] = WALL
    values[:, -1] = WALL
    return values


def two_room_values() -> np.ndarray:
    """40x20 cells: two rooms split at column 20 with a door on rows 8-11"""
    values = _frame(20, 40)
    values[:, 20] = WALL
    values[8:12, 20] = FLOOR
    return values


def three_room_values() -> np.ndarray:
    """60x40 cells: a west hall and two east rooms, each joined by a door"""
    values = _frame(40, 60)
    values[:, 30] = WALL
    values[20, 30:] = WALL
    values[8:12, 30] = FLOOR
    values[28:32, 30] = FLOOR
    return values


def one_room_values() -> np.ndarray:
    return _frame(16, 16)


@pytest.fixture
def two_room_map():
    return GridMap.from_array(two_room_values(), resolution=0.25)


@pytest.fixture
def three_room_map():
    return GridMap.from_array(three_room_values(), resolution=0.25)


@pytest.fixture
def one_room_map():
    return GridMap.from_array(one_room_values(), resolution=0.25)


@pytest.fixture
def run_config():
    return RunConfig()


def write_map_png(directory, values: np.ndarray, name: str = 'map.png') -> str:
    Image.fromarray(np.ascontiguousarray(values)).save(directory / name)
    return name


def scenario_document(map_name: str, **overrides) -> dict:
    """Two-room scenario: start in the west room, a bed in the east room"""
    document = {
        'id': 'two_room_bed',
        'map': map_name,
        'resolution': 0.25,
        'start': {'x': 2.0, 'y': 2.5, 'heading_deg': 0.0},
        'goal': {'kind': 'object_category', 'text': 'bed'},
        'instances': [
            {'id': 'bed_1', 'category': 'bed', 'point': [8.0, 2.5]},
            {'id': 'chair_1', 'category': 'chair', 'point': [3.0, 1.0]},
        ],
        'success_radius': 1.0,
        'max_steps': 300,
    }
    document.update(overrides)
    return document


@pytest.fixture
def scenario_dir(tmp_path):
    write_map_png(tmp_path, two_room_values())
    return tmp_path


@pytest.fixture
def make_scenario(scenario_dir):
    """Build a two-room Scenario, overriding any top-level document field"""
    def _make(**overrides):
        return parse_scenario(scenario_document('map.png', **overrides), scenario_dir)
    return _make


@pytest.fixture
def scenario_file(scenario_dir):
    """Write a scenario JSON next to the map and return its path"""
    def _write(name: str = 'two_room_bed', **overrides):
        overrides.setdefault('id', name)
        path = scenario_dir / f"{name}.json"
        path.write_text(json.dumps(scenario_document('map.png', **overrides)), encoding='utf-8')
        return path
    return _write
