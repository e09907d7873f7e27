"""
Error types for navkit

Library code raises these; the episode runner and CLI convert them into
tagged result records so a batch never aborts on a single bad episode.
"""
import re


class NavKitError(Exception):
    """Base class for every navkit error"""

    @property
    def tag(self) -> str:
        """Stable snake_case identifier used in result records"""
        return re.sub(r'(?<!^)(?=[A-Z])', '_', type(self).__name__).lower()


# Map I/O and grid primitives
class DecodeError(NavKitError):
    """Raster bytes could not be decoded"""


class BadMetadata(NavKitError, ValueError):
    """Map metadata is invalid (e.g. non-positive resolution)"""


class DegenerateField(NavKitError):
    """A field has no usable structure (no true cells, constant values)"""


# Rooms and nodes
class NoMarkers(NavKitError):
    """Watershed was given no positive marker inside its domain"""


class NoWalkableSpace(NavKitError):
    """The wall mask leaves no walkable cell"""


class NoSamplableArea(NavKitError):
    """Padding erosion removed all walkable space"""


class EmptyRoom(NavKitError):
    """No node could be placed in a room, even after fallback"""


class UnknownRoom(NavKitError, ValueError):
    """Room id is not part of the segmentation"""


# Reasoning
class ParseFailure(NavKitError, ValueError):
    """Model response did not contain the expected answer line"""


class BackendError(NavKitError):
    """Reasoning backend transport failed after retries"""


# Local navigation
class NoPath(NavKitError):
    """Goal unreachable in the current occupancy map"""


class StartOccupied(NavKitError):
    """Planner start cell is occupied"""


class NoFreeCell(NavKitError):
    """Occupancy grid has no non-occupied cell"""


# Verification
class EmptyMask(NavKitError):
    """Detection mask has no pixels"""


class AllDepthInvalid(NavKitError):
    """No masked pixel carries a valid depth"""


# Simulator and harness
class SchemaError(NavKitError):
    """Scenario file does not match the schema"""


class StartInWall(NavKitError):
    """Scenario start pose lies in a wall cell"""


class EpisodeOver(NavKitError):
    """Action issued after the episode terminated"""


class EmptyBatch(NavKitError):
    """No scenarios or results to aggregate"""
