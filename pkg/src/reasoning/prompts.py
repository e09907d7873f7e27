"""
Prompt templates for map reasoning

Templates are kept verbatim; only {goal_object} is substituted. Images are
attached in the order the prompt text refers to them.
"""
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Literal, Optional, Sequence

from PIL import Image

from src.reasoning.goal import GoalSpec

GOAL_PLACEHOLDER = '{goal_object}'

ROOM_PROMPT: str = \
'''You are an AI assistant for a robot's navigation system. Your task is to identify a certain room.

CONTEXT:
You will be provided with a top-down floor plan showing furniture and layout with room segmentation. (The floor plan is segmented to at least one room/region with numbered room annotations. The boundaries of different rooms are noted in white.)

GOAL:
Identify the room number that contains the {goal_object}.

INSTRUCTIONS:

1.  If you can find the object directly from map, describe the object's location using text.


2.  Analyze the Goal Object: Determine the room number where the {goal_object} can be found.
 If you cannot find {goal_object} on the top-down view, then please consider the most-possible room that the
{goal_object} may locate at. (e.g., a "bed" is in a bedroom)


3.  Verify the Room: Scan the top-down view to make sure that the
{goal_object} indeed locates in the chosen room.  If {goal_object} cannot be found, make sure the chosen room is the most appropriate room to search. Note that you should consider the precise semantics of {goal_object} during verification. (e.g., "sofa chair" is different from "sofa")


Note that you should choose the room that contains the {goal_object} instead of the room that is the closest to the {goal_object}!

Repeat the instruction until the verification (3.) is passed.

Provide your answer in the last line in the form of: "Room X" where X is your chosen number. (e.g. Room 1)

Goal Object: {goal_object}'''


NODE_PROMPT: str = \
'''CONTEXT:
You are given two images:

1.  Map Image: A top-down schematic of the room's layout.

2.  Node Image: The same map with numbered navigation nodes.

GOAL:
{goal_object}

INSTRUCTIONS:

1.  Analyze the Goal: Consider the common placement of a {goal_object}. For example, a "TV" is opposite to sofa in the living room; a "book" is on a shelf or table. Note the precise semantics of {goal_object} and do not misunderstand the target. (e.g., sofa chair is different from sofa).

2.  Locate on Map: Scan the Map Image to find the {goal_object} or the most logical place it would be (e.g., find the dining table if the goal is a "plate").

3.  Select Best Node: Based on your location analysis, choose the single best node from the Node Image. The best node is determined by this priority:

    *   Priority 1: A node located directly on the object.

    *   Priority 2: If no node is on the object, the node closest to the object.

    *   Priority 3: If the object cannot be found on the topdown-view, the node that provides the best vantage point to search the inferred area.

    4.  Verify The Node: Make sure the selected node satisfy the above requirements.

Repeat the instructions until the verification (4.) is passed.

Goal Object: {goal_object}
Provide your answer in the last line in the form of: "node X" where X is your chosen number.
(e.g. node 100)'''


DISCRIMINATOR_PROMPT: str = \
'''You are an expert navigation system evaluator. I need you to analyze a controversial episode where two different AI models disagreed on the success of an object navigation task.

Target Object: {goal_object}

Images Provided:
You will see two separate images:

1. First Image (Model 1): Shows an area around Model 1's target selection with a BLUE circle marking the chosen target location.

2. Second Image (Model 2): Shows a area around Model 2's target selection with a RED circle marking the chosen target location.


Your Task:
Please analyze these navigation scenarios and determine which model made the better decision. Consider:

1. Target Identification: Which model identified a more plausible target location for "{goal_object}"? Look at the environment around each colored circle, find the corresponding node that is closer to the {goal_object}.

2. Accessibility: If two nodes are both at a plausible position of the {goal_object}, which target location appears more accessible and reachable in a real navigation scenario? (i.e. more close to the navigable/walkable area and more close to the open space. (e.g. Two chairs. The one that is closer to the open area is more suitable than the one that is closer to the wall.))
Please respond with:
1. Your analysis of both models' target selections based on the environmental context
2. Which model you believe made the better decision (Model 1 or Model 2)
3. Key reasoning points for your decision

Output Format:
Decision: [Model 1 or Model 2]'''


# Used only by the single-stage ablation
SINGLE_STAGE_PROMPT: str = \
'''CONTEXT:
You are given a top-down floor plan of the whole environment with numbered navigation nodes.

GOAL:
{goal_object}

INSTRUCTIONS:

1.  Locate the {goal_object} on the floor plan, or the most logical place it would be.

2.  Choose the single node located directly on the {goal_object}, or else the node closest to it.

Goal Object: {goal_object}
Provide your answer in the last line in the form of: "node X" where X is your chosen number.
(e.g. node 100)'''


# Used only by the direct coordinate ablation
DIRECT_PROMPT: str = \
'''CONTEXT:
You are given a top-down floor plan of the whole environment. Pixel positions are measured from the top-left corner of the image: x grows to the right and y grows downward.

GOAL:
{goal_object}

INSTRUCTIONS:

1.  Locate the {goal_object} on the floor plan, or the most logical place it would be.

2.  Give the pixel position of that place.

Goal Object: {goal_object}
Provide your answer in the last line in the form of: "Coordinate: (x, y)" where x and y are pixel positions.
(e.g. Coordinate: (120, 64))'''


GOAL_IMAGE_NOTE = '\n\nThe goal object is shown in the last attached image.'
IMAGE_SIZE_NOTE = '\n\nThe floor plan image is {width} x {height} pixels.'

RETRY_SUFFIX = ('\n\nYour previous answer could not be used ({reason}). '
                'Answer again and give the final answer in the last line in the form of: "{form}".')

TEMPLATES = {
    'room': ROOM_PROMPT,
    'node': NODE_PROMPT,
    'discriminator': DISCRIMINATOR_PROMPT,
    'single_stage': SINGLE_STAGE_PROMPT,
    'direct': DIRECT_PROMPT,
}


def resolve_prompt_template(template_name: str) -> str:
    if template_name in TEMPLATES:
        return TEMPLATES[template_name]
    raise ValueError(f"Template not found: {template_name}")


def fill_template(template: str, goal_object: str) -> str:
    return template.replace(GOAL_PLACEHOLDER, goal_object)


@dataclass(frozen=True)
class PromptMessage:
    """
    One chat message for a reasoning backend

    `metadata` is never transmitted; it carries the stage and the candidate
    ids (and, for scripted backends, the objects needed to answer them).
    """

    text: str
    images: List[Image.Image] = field(default_factory=list)
    role: Literal['system', 'user'] = 'user'
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def stage(self) -> Optional[str]:
        return self.metadata.get('stage')

    def with_suffix(self, suffix: str) -> 'PromptMessage':
        return replace(self, text=self.text + suffix)


def _goal_images(goal: GoalSpec) -> List[Image.Image]:
    return [goal.image] if goal.kind == 'instance_image' and goal.image is not None else []


def _build(template_name: str, goal: GoalSpec, images: List[Image.Image],
           metadata: Optional[Dict[str, Any]], notes: Sequence[str] = ()) -> PromptMessage:
    text = fill_template(resolve_prompt_template(template_name), goal.prompt_text) + ''.join(notes)
    extra = _goal_images(goal)
    if extra:
        text += GOAL_IMAGE_NOTE
    metadata = dict(metadata or {})
    metadata.setdefault('stage', template_name)
    return PromptMessage(text=text, images=[img for img in images if img is not None] + extra,
                         metadata=metadata)


def build_room_prompt(goal: GoalSpec, room_map: Optional[Image.Image] = None,
                      metadata: Optional[Dict[str, Any]] = None) -> PromptMessage:
    """Room localization prompt with the annotated floor plan (and the goal image for image goals)"""
    return _build('room', goal, [room_map], metadata)


def build_node_prompt(goal: GoalSpec, map_image: Optional[Image.Image] = None,
                      node_image: Optional[Image.Image] = None,
                      metadata: Optional[Dict[str, Any]] = None) -> PromptMessage:
    """Node selection prompt; images go Map Image, Node Image, then the goal image if any"""
    return _build('node', goal, [map_image, node_image], metadata)


def build_single_stage_prompt(goal: GoalSpec, node_map: Optional[Image.Image] = None,
                              metadata: Optional[Dict[str, Any]] = None) -> PromptMessage:
    return _build('single_stage', goal, [node_map], metadata)


def build_direct_prompt(goal: GoalSpec, floor_plan: Optional[Image.Image] = None,
                        metadata: Optional[Dict[str, Any]] = None) -> PromptMessage:
    """Coordinate prompt over the unlabeled floor plan; the image size is stated in the text"""
    notes = []
    if floor_plan is not None:
        notes.append(IMAGE_SIZE_NOTE.format(width=floor_plan.width, height=floor_plan.height))
    return _build('direct', goal, [floor_plan], metadata, notes)


def build_discriminator_prompt(goal: GoalSpec, crop_a: Optional[Image.Image] = None,
                               crop_b: Optional[Image.Image] = None,
                               metadata: Optional[Dict[str, Any]] = None) -> PromptMessage:
    """Discriminator prompt with the blue (Model 1) crop first and the red (Model 2) crop second"""
    text = fill_template(DISCRIMINATOR_PROMPT, goal.prompt_text)
    metadata = dict(metadata or {})
    metadata.setdefault('stage', 'discriminator')
    return PromptMessage(text=text, images=[img for img in (crop_a, crop_b) if img is not None],
                         metadata=metadata)


def retry_suffix(reason: str, form: str) -> str:
    return RETRY_SUFFIX.format(reason=reason, form=form)
