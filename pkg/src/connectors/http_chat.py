"""
Hosted chat model connector

Talks to a chat-completions style endpoint: each message becomes a list of
content parts (text first, then base64 PNG images in prompt order), and the
bearer token is resolved through the secrets manager.
"""
import base64
import io
import time
from typing import Any, Dict, List, Optional

import requests
import structlog
from PIL import Image

from src.config.run_config import ReasoningSettings
from src.connectors.base import ReasoningBackend
from src.reasoning.prompts import PromptMessage
from src.utils.errors import BackendError
from src.utils.secrets import get_secret

logger = structlog.get_logger(__name__)

RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}


def encode_image(image: Image.Image, max_side: int = 1024) -> str:
    """PNG data URL, downscaled so the longest side is at most max_side"""
    image = image.convert('RGB')
    if max(image.size) > max_side:
        image = image.copy()
        image.thumbnail((max_side, max_side), Image.Resampling.LANCZOS)
    buffer = io.BytesIO()
    image.save(buffer, format='PNG')
    return 'data:image/png;base64,' + base64.b64encode(buffer.getvalue()).decode('ascii')


class HttpChatBackend(ReasoningBackend):
    """Connector for a hosted multimodal chat model"""

    name = 'http'

    def __init__(self, endpoint: str, model: str, api_token: Optional[str] = None,
                 timeout: float = 60.0, retries: int = 2, image_max_side: int = 1024,
                 retry_delay: float = 1.0):
        """
        Initialize the connector

        Args:
            endpoint: Full URL of the chat completions endpoint
            model: Model name sent with every request
            api_token: Bearer token (no Authorization header when None)
            timeout: Per-request timeout in seconds
            retries: Extra attempts after a timeout, connection error or retryable status
            image_max_side: Longest image side sent to the model
            retry_delay: Seconds to wait before the first retry (doubled each time)
        """
        if not endpoint:
            raise ValueError("The http backend needs an endpoint URL")
        if not model:
            raise ValueError("The http backend needs a model name")
        self.endpoint = endpoint
        self.model = model
        self.api_token = api_token
        self.timeout = timeout
        self.retries = retries
        self.image_max_side = image_max_side
        self.retry_delay = retry_delay
        self.name = f'http:{model}'

    @classmethod
    def from_settings(cls, settings: ReasoningSettings, model: Optional[str] = None) -> 'HttpChatBackend':
        return cls(endpoint=settings.endpoint, model=model or settings.model,
                   api_token=get_secret(settings.api_token_env), timeout=settings.timeout_s,
                   retries=settings.transport_retries, image_max_side=settings.image_max_side)

    def _headers(self) -> Dict[str, str]:
        headers = {'Content-Type': 'application/json'}
        if self.api_token:
            headers['Authorization'] = f'Bearer {self.api_token}'
        return headers

    def build_payload(self, messages: List[PromptMessage]) -> Dict[str, Any]:
        body = []
        for message in messages:
            parts: List[Dict[str, Any]] = [{'type': 'text', 'text': message.text}]
            for image in message.images:
                parts.append({'type': 'image_url',
                              'image_url': {'url': encode_image(image, self.image_max_side)}})
            body.append({'role': message.role, 'content': parts})
        return {'model': self.model, 'messages': body}

    @staticmethod
    def _extract_text(data: Dict[str, Any]) -> str:
        try:
            content = data['choices'][0]['message']['content']
        except (KeyError, IndexError, TypeError) as e:
            raise BackendError(f"Unexpected response shape: {e}") from e
        if isinstance(content, list):
            return '\n'.join(part.get('text', '') for part in content if isinstance(part, dict))
        return content if isinstance(content, str) else ''

    def query(self, messages: List[PromptMessage]) -> str:
        payload = self.build_payload(messages)
        stage = messages[-1].stage if messages else None
        delay = self.retry_delay

        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(delay)
                delay *= 2
            try:
                response = requests.post(self.endpoint, json=payload, headers=self._headers(),
                                         timeout=self.timeout)
            except requests.exceptions.Timeout:
                logger.error("Chat backend timeout", model=self.model, stage=stage, attempt=attempt)
                continue
            except requests.exceptions.RequestException as e:
                logger.error("Chat backend request failed", model=self.model, stage=stage,
                             attempt=attempt, error=str(e))
                continue

            if response.status_code == 200:
                try:
                    data = response.json()
                except ValueError as e:
                    raise BackendError(f"Chat backend returned invalid JSON: {e}") from e
                text = self._extract_text(data)
                logger.debug("Chat backend answered", model=self.model, stage=stage, chars=len(text))
                return text

            logger.error("Chat backend error", model=self.model, stage=stage, attempt=attempt,
                         status_code=response.status_code, response=response.text[:200])
            if response.status_code not in RETRYABLE_STATUS:
                raise BackendError(f"Chat backend returned {response.status_code}: {response.text[:100]}")

        raise BackendError(f"Chat backend unreachable after {self.retries + 1} attempts")
