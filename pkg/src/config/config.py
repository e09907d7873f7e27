"""
Configuration management for navkit

Environment-level settings (logging, hosted model endpoint). Per-run
navigation parameters live in `src.config.run_config.RunConfig`.
"""
import os
from typing import Optional


class Config:
    """Application configuration"""

    # Hosted reasoning backend
    NAVKIT_ENDPOINT = os.getenv('NAVKIT_ENDPOINT')
    NAVKIT_MODEL = os.getenv('NAVKIT_MODEL')
    NAVKIT_API_TOKEN_ENV = os.getenv('NAVKIT_API_TOKEN_ENV', 'NAVKIT_API_TOKEN')

    # Output
    NAVKIT_OUTPUT_DIR = os.getenv('NAVKIT_OUTPUT_DIR', 'runs')

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE')
    LOG_JSON = os.getenv('LOG_JSON', 'True').lower() == 'true'

    @classmethod
    def api_token(cls, env_name: Optional[str] = None) -> Optional[str]:
        """
        Resolve the bearer token for the hosted backend

        Args:
            env_name: Environment variable / secrets key holding the token

        Returns:
            Token string or None if not configured
        """
        from src.utils.secrets import get_secret
        return get_secret(env_name or cls.NAVKIT_API_TOKEN_ENV)

