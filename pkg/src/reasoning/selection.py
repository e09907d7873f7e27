"""
Global target selection

Coarse to fine: a backend first picks the room that most likely holds the
goal on the annotated floor plan, then the best node inside that room on a
cropped view. Two such pipelines can be run as an ensemble, with a third
query settling disagreements. Unusable answers are retried with a corrective
note and finally replaced by a deterministic fallback, so selection always
yields a valid target while the transport works.

The direct mode skips rooms and nodes altogether and asks for a pixel on the
floor plan, which is mapped back to the world.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import structlog

from src.config.run_config import ReasoningSettings
from src.gridmap.geometry import WorldPoint
from src.gridmap.grid import GridMap
from src.nodes.sampling import NavNode, NodeSet, nodes_in_room
from src.reasoning.goal import GoalSpec
from src.reasoning.parsing import (parse_coordinate_response, parse_discriminator_response,
                                   parse_node_response, parse_room_response)
from src.reasoning.prompts import (PromptMessage, build_direct_prompt, build_discriminator_prompt,
                                   build_node_prompt, build_room_prompt, build_single_stage_prompt,
                                   retry_suffix)
from src.reasoning.rendering import (render_candidate_crop, render_floor_plan, render_node_map,
                                     render_node_overview, render_room_map)
from src.rooms.segmentation import RoomSegmentation
from src.utils.errors import ParseFailure

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class GlobalTarget:
    point: WorldPoint
    room: int
    node: int
    provenance: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': self.point.x,
            'y': self.point.y,
            'room': self.room,
            'node': self.node,
            'provenance': self.provenance,
        }


def _backend_name(backend) -> str:
    return getattr(backend, 'name', type(backend).__name__)


def _ask(backend, message: PromptMessage, parse: Callable[[str], Any], accept: Callable[[Any], bool],
         retries: int, form: str, rejected: str = 'is not one of the numbered candidates') -> Optional[Any]:
    """
    Query until an acceptable answer comes back; None once retries are spent

    BackendError from the transport is not caught.
    """
    prompt = message
    for attempt in range(retries + 1):
        text = backend.query([prompt])
        try:
            answer = parse(text)
        except ParseFailure:
            reason = 'no answer line was found'
        else:
            if accept(answer):
                logger.info("Answer accepted", stage=message.stage, answer=answer, attempt=attempt,
                            backend=_backend_name(backend))
                return answer
            reason = f'{answer} {rejected}'
        logger.warning("Unusable answer", stage=message.stage, attempt=attempt, reason=reason,
                       backend=_backend_name(backend))
        prompt = message.with_suffix(retry_suffix(reason, form))
    return None


def select_room(backend, grid_map: GridMap, seg: RoomSegmentation, goal: GoalSpec,
                retries: int = 2, scale: int = 1) -> int:
    """Room id chosen by the backend; the largest room when no usable answer comes back"""
    room_ids = set(seg.room_ids)
    if len(room_ids) == 1:
        return next(iter(room_ids))

    room_map = render_room_map(grid_map, seg, scale)
    message = build_room_prompt(goal, room_map.image,
                                metadata={'stage': 'room', 'candidates': sorted(room_ids),
                                          'segmentation': seg})
    room_id = _ask(backend, message, parse_room_response, room_ids.__contains__, retries, 'Room X')
    if room_id is None:
        room_id = seg.largest_region().id
        logger.warning("Falling back to largest room", room_id=room_id)
    return room_id


def _centroid_node(candidates: NodeSet, seg: RoomSegmentation, room_id: int) -> NavNode:
    return candidates.nearest(seg.region(room_id).centroid)


def select_node(backend, grid_map: GridMap, seg: RoomSegmentation, nodes: NodeSet, room_id: int,
                goal: GoalSpec, retries: int = 2, settings: Optional[ReasoningSettings] = None,
                rng_seed: int = 0, provenance: Optional[str] = None) -> GlobalTarget:
    """
    Best node of one room

    A room with a single node returns it without a query. Otherwise the
    answer must be one of the room's node ids; the fallback is the node
    nearest the room centroid.
    """
    settings = settings or ReasoningSettings()
    provenance = provenance or f'single:{_backend_name(backend)}'
    candidates = nodes_in_room(nodes, seg, room_id, rng_seed=rng_seed)

    def target(node: NavNode) -> GlobalTarget:
        return GlobalTarget(point=node.position, room=room_id, node=node.id, provenance=provenance)

    if len(candidates) == 1:
        return target(candidates.nodes[0])

    margin = int(round(settings.room_crop_margin_m / seg.geometry.resolution))
    plain, annotated = render_node_map(grid_map, seg.region(room_id).bbox, candidates, margin,
                                       settings.render_scale)
    message = build_node_prompt(goal, plain, annotated.image,
                                metadata={'stage': 'node', 'room': room_id,
                                          'candidates': {n.id: n.position for n in candidates}})
    valid = set(candidates.ids)
    node_id = _ask(backend, message, parse_node_response, valid.__contains__, retries, 'node X')
    if node_id is None:
        node = _centroid_node(candidates, seg, room_id)
        logger.warning("Falling back to centroid node", room_id=room_id, node_id=node.id)
        return target(node)
    return target(candidates.get(node_id))


def reason_global(backend, grid_map: GridMap, seg: RoomSegmentation, nodes: NodeSet, goal: GoalSpec,
                  settings: Optional[ReasoningSettings] = None, rng_seed: int = 0) -> GlobalTarget:
    """Room selection followed by node selection inside the chosen room"""
    settings = settings or ReasoningSettings()
    room_id = select_room(backend, grid_map, seg, goal, settings.retries, settings.render_scale)
    result = select_node(backend, grid_map, seg, nodes, room_id, goal, settings.retries, settings, rng_seed)
    logger.info("Global target selected", room=result.room, node=result.node,
                x=round(result.point.x, 3), y=round(result.point.y, 3), provenance=result.provenance)
    return result


def reason_single_stage(backend, grid_map: GridMap, seg: RoomSegmentation, nodes: NodeSet,
                        goal: GoalSpec, settings: Optional[ReasoningSettings] = None,
                        rng_seed: int = 0) -> GlobalTarget:
    """
    One query over the whole map with every node numbered

    Falls back to the node nearest the largest room's centroid.
    """
    settings = settings or ReasoningSettings()
    provenance = f'single_stage:{_backend_name(backend)}'
    if len(nodes) == 1:
        chosen = nodes.nodes[0]
    else:
        overview = render_node_overview(grid_map, seg, nodes, settings.render_scale)
        message = build_single_stage_prompt(goal, overview.image,
                                            metadata={'stage': 'single_stage',
                                                      'candidates': {n.id: n.position for n in nodes}})
        valid = set(nodes.ids)
        node_id = _ask(backend, message, parse_node_response, valid.__contains__, settings.retries,
                       'node X')
        if node_id is None:
            chosen = nodes.nearest(seg.largest_region().centroid)
            logger.warning("Falling back to largest room centroid node", node_id=chosen.id)
        else:
            chosen = nodes.get(node_id)
    room = chosen.region or seg.nearest_label(chosen.position)
    return GlobalTarget(point=chosen.position, room=room, node=chosen.id, provenance=provenance)


def reason_direct(backend, grid_map: GridMap, seg: RoomSegmentation, goal: GoalSpec,
                  settings: Optional[ReasoningSettings] = None) -> GlobalTarget:
    """
    One query for a pixel coordinate on the unlabeled floor plan

    The pixel is mapped to the center of the cell under it. The answer must
    fall inside the image; the fallback is the largest room's centroid. The
    target carries node 0 since no node was chosen.
    """
    settings = settings or ReasoningSettings()
    canvas = render_floor_plan(grid_map, seg, settings.render_scale)
    width, height = canvas.image.size
    message = build_direct_prompt(goal, canvas.image,
                                  metadata={'stage': 'direct', 'canvas': canvas,
                                            'geometry': grid_map.geometry, 'segmentation': seg})

    def inside(pixel) -> bool:
        return 0 <= pixel[0] < width and 0 <= pixel[1] < height

    pixel = _ask(backend, message, parse_coordinate_response, inside, settings.retries,
                 'Coordinate: (x, y)', rejected='lies outside the floor plan image')
    if pixel is None:
        point = seg.largest_region().centroid
        logger.warning("Falling back to largest room centroid", x=round(point.x, 3), y=round(point.y, 3))
    else:
        point = grid_map.geometry.cell_to_world(canvas.cell_of(pixel))
    return GlobalTarget(point=point, room=seg.nearest_label(point), node=0,
                        provenance=f'direct:{_backend_name(backend)}')


def reason(backend, grid_map: GridMap, seg: RoomSegmentation, nodes: NodeSet, goal: GoalSpec,
           settings: Optional[ReasoningSettings] = None, rng_seed: int = 0) -> GlobalTarget:
    """Dispatch on settings.mode"""
    settings = settings or ReasoningSettings()
    if settings.mode == 'single_stage':
        return reason_single_stage(backend, grid_map, seg, nodes, goal, settings, rng_seed)
    if settings.mode == 'direct':
        return reason_direct(backend, grid_map, seg, goal, settings)
    return reason_global(backend, grid_map, seg, nodes, goal, settings, rng_seed)


def ensemble_select(backend_a, backend_b, discriminator, grid_map: GridMap, seg: RoomSegmentation,
                    nodes: NodeSet, goal: GoalSpec, settings: Optional[ReasoningSettings] = None,
                    rng_seed: int = 0) -> GlobalTarget:
    """
    Two independent selections; a discriminator settles disagreement

    Both units run concurrently. When they pick the same point the
    discriminator is not queried. Otherwise it sees a blue-marked crop around
    Model 1's point and a red-marked crop around Model 2's; an unusable
    verdict keeps Model 1.
    """
    settings = settings or ReasoningSettings()
    with ThreadPoolExecutor(max_workers=2) as pool:
        future_a = pool.submit(reason, backend_a, grid_map, seg, nodes, goal, settings, rng_seed)
        future_b = pool.submit(reason, backend_b, grid_map, seg, nodes, goal, settings, rng_seed)
        target_a, target_b = future_a.result(), future_b.result()

    if target_a.node == target_b.node and target_a.point == target_b.point:
        logger.info("Ensemble units agree", node=target_a.node)
        return GlobalTarget(target_a.point, target_a.room, target_a.node, 'ensemble:agree')

    crop_a = render_candidate_crop(grid_map, target_a.point, 'blue', settings.crop_margin_m,
                                   settings.render_scale)
    crop_b = render_candidate_crop(grid_map, target_b.point, 'red', settings.crop_margin_m,
                                   settings.render_scale)
    message = build_discriminator_prompt(goal, crop_a, crop_b,
                                         metadata={'stage': 'discriminator',
                                                   'candidates': {1: target_a.point, 2: target_b.point}})
    text = discriminator.query([message])
    try:
        decision = parse_discriminator_response(text)
    except ParseFailure:
        logger.warning("Discriminator verdict unusable, keeping Model 1",
                       backend=_backend_name(discriminator))
        decision = 1

    chosen = target_a if decision == 1 else target_b
    logger.info("Ensemble decided", decision=decision, node_a=target_a.node, node_b=target_b.node)
    return GlobalTarget(chosen.point, chosen.room, chosen.node, f'ensemble:model{decision}')
