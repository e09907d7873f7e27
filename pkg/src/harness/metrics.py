"""
Success rate and SPL
"""
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from src.reasoning.goal import GOAL_KINDS, KIND_LABELS
from src.utils.errors import EmptyBatch

logger = structlog.get_logger(__name__)

SPL_WARN_RATIO = 1.05
UNKNOWN_LABEL = 'Unknown'


def episode_spl(success: bool, optimal_length: Optional[float], executed_length: float) -> float:
    """
    optimal / executed for a successful episode, clamped to 1; 0 otherwise

    A ratio above 1.05 means the optimal-path oracle is coarser than the
    executed path and is logged.
    """
    if not success or optimal_length is None or not math.isfinite(optimal_length):
        return 0.0
    if executed_length <= 0.0:
        return 1.0
    ratio = optimal_length / executed_length
    if ratio > SPL_WARN_RATIO:
        logger.warning("SPL ratio above 1", ratio=round(ratio, 4), optimal=optimal_length,
                       executed=executed_length)
    return min(ratio, 1.0)


def _scored(results: Iterable) -> Tuple[List, int]:
    kept, excluded = [], 0
    for result in results:
        optimal = result.optimal_length
        if optimal is not None and math.isinf(optimal):
            excluded += 1
            continue
        kept.append(result)
    return kept, excluded


def compute_metrics(results: Sequence) -> Dict[str, float]:
    """
    Success rate and SPL (both in percent) over a set of episode results

    Episodes whose target is unreachable from the start (infinite optimal
    length) are left out and counted under 'excluded'.

    Raises:
        EmptyBatch: no scorable episode
    """
    kept, excluded = _scored(results)
    if not kept:
        raise EmptyBatch("No episodes to score")
    successes = sum(1 for result in kept if result.success)
    return {
        'episodes': len(kept),
        'successes': successes,
        'excluded': excluded,
        'SR': 100.0 * successes / len(kept),
        'SPL': 100.0 * sum(result.spl for result in kept) / len(kept),
    }


def metrics_by_kind(results: Sequence) -> List[Tuple[str, Dict[str, float]]]:
    """
    (label, metrics) per goal kind present, then 'Overall'

    Episodes without a known goal kind (scenarios that failed to load) get an
    'Unknown' row just before Overall.
    """
    groups = []
    labeled = [(KIND_LABELS[kind], [result for result in results if result.goal_kind == kind])
               for kind in GOAL_KINDS]
    labeled.append((UNKNOWN_LABEL, [result for result in results if result.goal_kind not in GOAL_KINDS]))
    for label, members in labeled:
        try:
            groups.append((label, compute_metrics(members)))
        except EmptyBatch:
            continue
    groups.append(('Overall', compute_metrics(results)))
    return groups
