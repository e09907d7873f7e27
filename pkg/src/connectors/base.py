"""
Reasoning backend interface

A backend answers a list of PromptMessages with text. Scripted backends
answer from the scenario's ground truth; the http backend calls a hosted
multimodal chat model.
"""
from abc import ABC, abstractmethod
from typing import List, Optional

import structlog

from src.config.run_config import ReasoningSettings
from src.reasoning.prompts import PromptMessage

logger = structlog.get_logger(__name__)


class ReasoningBackend(ABC):
    """Base class for reasoning backends; query must be safe to call from several threads"""

    name = 'base'

    @abstractmethod
    def query(self, messages: List[PromptMessage]) -> str:
        """
        Answer a conversation

        Raises:
            BackendError: the backend could not be reached
        """


def build_backend(name: str, settings: Optional[ReasoningSettings] = None, scenario=None,
                  model: Optional[str] = None) -> ReasoningBackend:
    """
    Build a backend by its CLI name

    Args:
        name: 'oracle', 'adversarial' or 'http'
        settings: Reasoning settings (endpoint, timeouts, token variable)
        scenario: Ground truth for the scripted backends
        model: Model name overriding settings.model (http only)

    Raises:
        ValueError: unknown name, or a scripted backend without a scenario
    """
    settings = settings or ReasoningSettings()
    if name in ('oracle', 'adversarial'):
        from src.connectors.scripted import AdversarialBackend, OracleBackend
        if scenario is None:
            raise ValueError(f"The {name} backend needs a scenario to read the ground truth from")
        backend_class = OracleBackend if name == 'oracle' else AdversarialBackend
        return backend_class(scenario.targets)
    if name == 'http':
        from src.connectors.http_chat import HttpChatBackend
        return HttpChatBackend.from_settings(settings, model=model)
    raise ValueError(f"Unknown reasoning backend '{name}'")
