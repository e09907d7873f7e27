"""
Navigation goals
"""
from dataclasses import dataclass
from typing import Literal, Optional

from PIL import Image

GoalKind = Literal['object_category', 'instance_image', 'text_description']

GOAL_KINDS = ('object_category', 'instance_image', 'text_description')

# Report labels per goal kind
KIND_LABELS = {
    'object_category': 'ObjNav',
    'instance_image': 'ImgNav',
    'text_description': 'TextNav',
}

IMAGE_GOAL_PLACEHOLDER = 'the object shown in the goal image'


@dataclass(frozen=True)
class GoalSpec:
    """
    What the agent is looking for

    `text` is the category for object goals and the description for text
    goals; image goals carry the goal image and an optional caption.
    """

    kind: GoalKind
    text: str = ''
    image: Optional[Image.Image] = None
    image_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in GOAL_KINDS:
            raise ValueError(f"Unknown goal kind: {self.kind}")
        if self.kind == 'instance_image' and self.image is None:
            raise ValueError("instance_image goals require a goal image")
        if self.kind != 'instance_image' and self.image is not None:
            raise ValueError(f"{self.kind} goals do not take an image")
        if self.kind != 'instance_image' and not self.text.strip():
            raise ValueError(f"{self.kind} goals require text")

    @property
    def label(self) -> str:
        return KIND_LABELS[self.kind]

    @property
    def prompt_text(self) -> str:
        """Text substituted for {goal_object} in prompts"""
        if self.text.strip():
            return self.text
        return IMAGE_GOAL_PLACEHOLDER

    def to_dict(self):
        return {'kind': self.kind, 'text': self.text, 'image': self.image_path}
