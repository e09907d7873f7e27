"""
Target verification and final approach

Once the agent is near the global target it looks around (a full in-place
scan), keeps detecting while it closes in to the second proximity
threshold, scans once more, and on any detection back-projects the mask to a
world point and drives to it before stopping. Exactly one stop action ends
every episode that still has budget left.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from src.config.run_config import RunConfig
from src.gridmap.geometry import WorldPoint
from src.localnav.navigator import LocalNavigator
from src.localnav.occupancy import OccupancyGrid, update_occupancy
from src.localnav.planner import safety_relocate
from src.localnav.types import DiscreteAction, Pose
from src.reasoning.goal import GoalSpec
from src.utils.errors import AllDepthInvalid, EmptyMask, NavKitError
from src.verification.camera import CameraIntrinsics, Detection, Frame
from src.verification.detector import Detector

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Sighting:
    detection: Detection
    frame: Frame


@dataclass
class FinalStatus:
    detected: bool = False
    detected_in: Optional[str] = None
    centroid: Optional[WorldPoint] = None
    approached: bool = False
    stopped: bool = False
    steps: int = 0

    def to_dict(self):
        return {
            'detected': self.detected,
            'detected_in': self.detected_in,
            'centroid': list(self.centroid) if self.centroid is not None else None,
            'approached': self.approached,
            'stopped': self.stopped,
            'steps': self.steps,
        }


def _confident(detection: Optional[Detection], threshold: float) -> bool:
    return detection is not None and detection.confidence >= threshold


def scan_360(sim, detector: Detector, goal: GoalSpec, turns: int = 12, threshold: float = 0.5,
             step_limit: Optional[int] = None, grid: Optional[OccupancyGrid] = None) -> Optional[Sighting]:
    """
    Turn in place, detecting at the initial heading and after every turn

    Stops at the first confident detection, after `turns` turns, or when the
    simulator step count reaches step_limit. Scans feed the occupancy grid
    when one is given.
    """
    step_limit = sim.max_steps if step_limit is None else step_limit
    frame = sim.frame()
    detection = detector.detect(frame, goal)
    if _confident(detection, threshold):
        return Sighting(detection, frame)

    for turn in range(turns):
        if sim.done or sim.steps >= step_limit:
            logger.debug("Scan cut short by budget", turns=turn)
            break
        pose, depth, _ = sim.step(DiscreteAction.TURN_LEFT, phase='scan')
        if grid is not None:
            update_occupancy(grid, depth, pose)
        frame = sim.frame()
        detection = detector.detect(frame, goal)
        if _confident(detection, threshold):
            logger.info("Target sighted during scan", turns=turn + 1, category=detection.category)
            return Sighting(detection, frame)
    return None


def localize_3d(detection: Detection, depth: np.ndarray, intrinsics: CameraIntrinsics,
                pose: Pose) -> WorldPoint:
    """
    Ground-plane centroid of the detection mask

    Each masked pixel with a finite positive depth z is placed at forward
    distance z and lateral offset (cx - (u + 0.5)) / fx * z, rotated into the
    world frame by the pose, and the points are averaged.

    Raises:
        EmptyMask: the mask selects no pixel
        AllDepthInvalid: no masked pixel has a usable depth
    """
    mask = np.asarray(detection.mask, dtype=bool)
    if not mask.any():
        raise EmptyMask("Detection mask is empty")
    depth = np.asarray(depth, dtype=np.float64)
    valid = mask & np.isfinite(depth) & (depth > 0.0)
    if not valid.any():
        raise AllDepthInvalid("No masked pixel has a valid depth")

    _, cols = np.nonzero(valid)
    forward = depth[valid]
    lateral = (intrinsics.cx - (cols + 0.5)) / intrinsics.fx * forward
    cos_h, sin_h = math.cos(pose.heading), math.sin(pose.heading)
    xs = pose.x + forward * cos_h - lateral * sin_h
    ys = pose.y + forward * sin_h + lateral * cos_h
    return WorldPoint(float(xs.mean()), float(ys.mean()))


def verify_and_approach(sim, grid: OccupancyGrid, p_global: Tuple[float, float], goal: GoalSpec,
                        detector: Detector, cfg: Optional[RunConfig] = None,
                        navigator: Optional[LocalNavigator] = None) -> FinalStatus:
    """
    Two-tier verification around p_global followed by the final approach and stop

    The stop is issued whenever the episode has not already ended, with or
    without a detection.
    """
    cfg = cfg or RunConfig()
    verify = cfg.verify
    navigator = navigator or LocalNavigator(sim, grid, cfg)
    budget_end = sim.max_steps - 1
    status = FinalStatus()

    def approach_limit() -> int:
        return min(budget_end, sim.steps + verify.approach_step_limit)

    sighting = scan_360(sim, detector, goal, verify.scan_turns, verify.confidence_threshold,
                        budget_end, grid)
    if sighting is not None:
        status.detected_in = 'scan_prox1'
    else:
        seen = []

        def detect_now() -> bool:
            frame = sim.frame()
            detection = detector.detect(frame, goal)
            if _confident(detection, verify.confidence_threshold):
                seen.append(Sighting(detection, frame))
                return True
            return False

        navigator.go_to(p_global, cfg.nav.prox2_m, approach_limit(), phase='approach',
                        interrupt=detect_now)
        if seen:
            sighting = seen[-1]
            status.detected_in = 'approach'
        else:
            sighting = scan_360(sim, detector, goal, verify.scan_turns, verify.confidence_threshold,
                                budget_end, grid)
            if sighting is not None:
                status.detected_in = 'scan_prox2'

    if sighting is not None:
        status.detected = True
        try:
            centroid = localize_3d(sighting.detection, sighting.frame.depth,
                                   sighting.frame.intrinsics, sighting.frame.pose)
        except NavKitError as e:
            logger.warning("Could not localize detection", error=str(e))
            centroid = None
        if centroid is not None:
            status.centroid = centroid
            target = safety_relocate(centroid, grid)
            logger.info("Approaching detected object", x=round(target.x, 3), y=round(target.y, 3),
                        detected_in=status.detected_in)
            result = navigator.go_to(target, verify.stop_radius_m, approach_limit(),
                                     phase='final_approach', need_sight=False)
            status.approached = result.reached
    else:
        logger.info("Target not found near global goal", steps=sim.steps)

    if not sim.done:
        sim.step(DiscreteAction.STOP, phase='stop')
    status.stopped = sim.stopped
    status.steps = sim.steps
    return status
