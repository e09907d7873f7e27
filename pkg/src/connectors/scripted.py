"""
Scripted reasoning backends

They read the stage and candidates from the message metadata and answer in
the format the prompts ask for. The oracle always points at the true target;
the adversarial backend always points as far away from it as the candidates
allow. Both are stateless.

For direct coordinate queries the candidates are the true target center and
every room centroid, answered as a pixel on the rendered floor plan.
"""
import math
from typing import Dict, List, Sequence, Tuple

import structlog

from src.connectors.base import ReasoningBackend
from src.reasoning.prompts import PromptMessage

logger = structlog.get_logger(__name__)


class ScriptedBackend(ReasoningBackend):
    """Answers from the ground-truth target instances"""

    name = 'scripted'

    def __init__(self, targets: Sequence):
        if not targets:
            raise ValueError("Scripted backends need at least one target instance")
        self.targets = list(targets)

    def _target_distance(self, point: Tuple[float, float]) -> float:
        return min(target.distance_to(point) for target in self.targets)

    def _rank(self, candidates: Dict[int, Tuple[float, float]]) -> List[int]:
        """Candidate ids from closest to farthest (lower id on ties)"""
        return sorted(candidates, key=lambda key: (self._target_distance(candidates[key]), key))

    def _pick(self, ranked: List[int]) -> int:
        raise NotImplementedError

    def _pick_room(self, message: PromptMessage) -> int:
        seg = message.metadata['segmentation']
        rooms = message.metadata['candidates']
        truth = seg.nearest_label(self.targets[0].center)
        ranked = [truth] + sorted(
            (room for room in rooms if room != truth),
            key=lambda room: (math.dist(seg.region(room).centroid, self.targets[0].center), room))
        return self._pick(ranked)

    def _pick_pixel(self, message: PromptMessage) -> Tuple[int, int]:
        seg = message.metadata['segmentation']
        points = {0: tuple(self.targets[0].center)}
        points.update((region.id, tuple(region.centroid)) for region in seg.regions)
        choice = self._pick(self._rank(points))
        x, y = message.metadata['canvas'].pixel_of(message.metadata['geometry'].world_to_cell(points[choice]))
        return int(x), int(y)

    def query(self, messages: List[PromptMessage]) -> str:
        message = messages[-1]
        stage = message.stage
        if stage == 'room':
            return f"Room {self._pick_room(message)}"
        if stage == 'direct':
            return "Coordinate: ({}, {})".format(*self._pick_pixel(message))
        candidates = message.metadata.get('candidates') or {}
        if not candidates:
            return "I cannot tell."
        choice = self._pick(self._rank(candidates))
        if stage == 'discriminator':
            return f"Decision: Model {choice}"
        return f"node {choice}"


class OracleBackend(ScriptedBackend):
    name = 'oracle'

    def _pick(self, ranked: List[int]) -> int:
        return ranked[0]


class AdversarialBackend(ScriptedBackend):
    name = 'adversarial'

    def _pick(self, ranked: List[int]) -> int:
        return ranked[-1]
