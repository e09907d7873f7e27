"""
Response parsers

Answers are read from the last non-empty line first, then from the last
match anywhere in the response. Parsers either return an answer or raise
ParseFailure; they never fail any other way.
"""
import re
from typing import Pattern, Tuple, Union

from src.utils.errors import ParseFailure

_FLAGS = re.IGNORECASE | re.ASCII

ROOM_PATTERN = re.compile(r'room\s+(\d+)', _FLAGS)
NODE_PATTERN = re.compile(r'node\s+(\d+)', _FLAGS)
# Tolerates the bracketed form copied from the prompt ("Decision: [Model 2]")
DECISION_PATTERN = re.compile(r'decision:\s*\[?\s*model\s*([12])', _FLAGS)
COORDINATE_PATTERN = re.compile(r'coordinate:?\s*\(?\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)', _FLAGS)


def _last_match(text: str, pattern: Pattern, what: str) -> Union[str, Tuple[str, ...]]:
    if not isinstance(text, str):
        raise ParseFailure(f"Expected response text, got {type(text).__name__}")
    lines = [line for line in text.splitlines() if line.strip()]
    if lines:
        found = pattern.findall(lines[-1])
        if found:
            return found[-1]
    found = pattern.findall(text)
    if found:
        return found[-1]
    raise ParseFailure(f"No {what} answer found in response")


def parse_room_response(text: str) -> int:
    return int(_last_match(text, ROOM_PATTERN, 'room'))


def parse_node_response(text: str) -> int:
    return int(_last_match(text, NODE_PATTERN, 'node'))


def parse_coordinate_response(text: str) -> Tuple[float, float]:
    """Pixel (x, y) from the last 'Coordinate: (x, y)'"""
    x, y = _last_match(text, COORDINATE_PATTERN, 'coordinate')
    return float(x), float(y)


def parse_discriminator_response(text: str) -> int:
    """Last 'Decision: Model k' in the text (k in 1, 2)"""
    found = DECISION_PATTERN.findall(text) if isinstance(text, str) else []
    if not found:
        raise ParseFailure("No decision found in discriminator response")
    return int(found[-1])
