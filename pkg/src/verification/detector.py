"""
Object detectors

A detector looks at one egocentric Frame and reports the goal object as a
pixel mask, or nothing. The oracle reads the simulator's instance image, so an
instance is only ever reported where the camera actually sees it.
"""
from abc import ABC, abstractmethod
from typing import Optional

import structlog

from src.reasoning.goal import GoalSpec
from src.simulator.scenario import matches_goal
from src.verification.camera import Detection, Frame

logger = structlog.get_logger(__name__)


class Detector(ABC):
    """Base class for detectors; implementations must be safe to share across episodes"""

    name = 'base'

    @abstractmethod
    def detect(self, frame: Frame, goal: GoalSpec) -> Optional[Detection]:
        pass


class OracleDetector(Detector):
    """
    Ground-truth detector

    Fires on a goal-matching instance that has at least one visible pixel in
    the frame and whose footprint is within `max_range` meters of the camera.
    Among several, the closest one wins.
    """

    name = 'oracle'

    def __init__(self, max_range: float = 3.0):
        self.max_range = max_range

    def detect(self, frame: Frame, goal: GoalSpec) -> Optional[Detection]:
        best = None
        for index, instance in enumerate(frame.instances):
            if not matches_goal(instance, goal):
                continue
            mask = frame.instance_mask(index)
            if not mask.any():
                continue
            distance = instance.distance_to(frame.pose.position)
            if distance > self.max_range:
                continue
            if best is None or distance < best[0]:
                best = (distance, instance, mask)

        if best is None:
            return None
        distance, instance, mask = best
        logger.debug("Object detected", instance_id=instance.id, distance=round(distance, 3),
                     pixels=int(mask.sum()))
        return Detection(category=instance.category, confidence=1.0, mask=mask, instance_id=instance.id)


DETECTORS = {
    OracleDetector.name: OracleDetector,
}


def build_detector(name: str = 'oracle', max_range: float = 3.0) -> Detector:
    """
    Build a detector by its CLI name

    Raises:
        ValueError: unknown detector name
    """
    if name not in DETECTORS:
        raise ValueError(f"Unknown detector '{name}', expected one of {sorted(DETECTORS)}")
    return DETECTORS[name](max_range=max_range)
