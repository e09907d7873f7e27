"""
Trajectory overlay for finished episodes
"""
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from PIL import Image, ImageDraw

from src.reasoning.rendering import map_schematic
from src.simulator.scenario import Scenario

OBSTACLE_COLOR = (90, 90, 160)
INSTANCE_COLOR = (160, 220, 160)
TARGET_COLOR = (30, 160, 30)
PATH_COLOR = (0, 90, 255)
START_COLOR = (0, 200, 0)
END_COLOR = (220, 0, 0)
GOAL_COLOR = (255, 140, 0)


def render_trajectory(scenario: Scenario, records: Sequence[Dict[str, Any]],
                      global_target: Optional[Tuple[float, float]] = None, scale: int = 4) -> Image.Image:
    """
    Floor plan with obstacles, object footprints (targets darker), the
    executed path, start and end markers and the global target cross
    """
    geometry = scenario.geometry
    pixels = map_schematic(scenario.map)
    truth = scenario.truth_wall_mask() & ~scenario.agent_wall_mask()
    pixels[truth] = OBSTACLE_COLOR
    targets = {instance.id for instance in scenario.targets}
    for instance in scenario.instances:
        color = TARGET_COLOR if instance.id in targets else INSTANCE_COLOR
        for row, col in instance.footprint_cells(geometry):
            pixels[row, col] = color

    image = Image.fromarray(np.ascontiguousarray(pixels.astype(np.uint8)))
    image = image.resize((image.width * scale, image.height * scale), Image.Resampling.NEAREST)
    draw = ImageDraw.Draw(image)

    def to_pixel(x: float, y: float) -> Tuple[float, float]:
        return ((x - geometry.origin_x) / geometry.resolution * scale,
                (y - geometry.origin_y) / geometry.resolution * scale)

    points = [to_pixel(*scenario.start.position)] + [to_pixel(r['x'], r['y']) for r in records]
    if len(points) > 1:
        draw.line(points, fill=PATH_COLOR, width=max(scale // 2, 1))
    marker = max(scale, 3)
    for (x, y), color in ((points[0], START_COLOR), (points[-1], END_COLOR)):
        draw.ellipse((x - marker, y - marker, x + marker, y + marker), fill=color)
    if global_target is not None:
        x, y = to_pixel(*global_target)
        draw.line((x - marker, y - marker, x + marker, y + marker), fill=GOAL_COLOR, width=2)
        draw.line((x - marker, y + marker, x + marker, y - marker), fill=GOAL_COLOR, width=2)
    return image
