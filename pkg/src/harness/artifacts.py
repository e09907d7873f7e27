"""
Run Artifacts

Manages the output directory of a run: status tracking, the serialized
configuration, per-episode artifact folders and trajectory logs.
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import structlog
from PIL import Image

from src.config.run_config import RunConfig

logger = structlog.get_logger(__name__)


class RunArtifacts:
    """Manages the files of one run directory"""

    def __init__(self, base_path: Union[str, Path] = 'runs'):
        """
        Initialize RunArtifacts

        Args:
            base_path: Run directory (created if missing)
        """
        self.base_path = Path(base_path)
        self.base_path.mkdir(parents=True, exist_ok=True)
        logger.debug("RunArtifacts initialized", base_path=str(self.base_path))

    @property
    def status_path(self) -> Path:
        return self.base_path / 'status.json'

    @property
    def config_path(self) -> Path:
        return self.base_path / 'config.json'

    def episode_dir(self, scenario_id: str) -> Path:
        """Per-episode folder (created on first use)"""
        path = self.base_path / 'episodes' / scenario_id
        path.mkdir(parents=True, exist_ok=True)
        return path

    def trajectory_path(self, scenario_id: str) -> Path:
        return self.base_path / 'trajectories' / f'{scenario_id}.jsonl'

    def get_status(self) -> Optional[Dict[str, Any]]:
        """
        Read status.json

        Returns:
            Status dict or None if not written yet or unreadable
        """
        if not self.status_path.exists():
            return None
        try:
            with open(self.status_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except Exception as e:
            logger.error("Error reading run status", error=str(e), status_path=str(self.status_path))
            return None

    def write_status(self, status: str, **details: Any) -> Dict[str, Any]:
        """
        Update status.json, keeping earlier fields

        Args:
            status: 'running', 'complete' or 'failed'
            **details: Extra fields to record (episode counts, error, ...)
        """
        record = self.get_status() or {}
        now = datetime.now().isoformat()
        if status == 'running':
            record.setdefault('started_at', now)
        else:
            record['completed_at'] = now
        record['status'] = status
        record.update(details)
        with open(self.status_path, 'w', encoding='utf-8') as f:
            json.dump(record, f, indent=2)
        logger.info("Run status updated", status=status, run_dir=str(self.base_path))
        return record

    def write_config(self, cfg: RunConfig) -> Path:
        self.config_path.write_text(cfg.model_dump_json(indent=2), encoding='utf-8')
        return self.config_path

    def write_trajectory(self, scenario_id: str, records: Iterable[Dict[str, Any]]) -> Path:
        """One JSON object per executed action"""
        path = self.trajectory_path(scenario_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True) + '\n')
        return path

    def read_trajectory(self, scenario_id: str) -> list:
        path = self.trajectory_path(scenario_id)
        if not path.exists():
            return []
        with open(path, 'r', encoding='utf-8') as f:
            return [json.loads(line) for line in f if line.strip()]

    def write_json(self, scenario_id: str, name: str, payload: Dict[str, Any]) -> Path:
        path = self.episode_dir(scenario_id) / name
        path.write_text(json.dumps(payload, indent=2), encoding='utf-8')
        return path

    def save_image(self, scenario_id: str, name: str, image: Image.Image) -> Path:
        path = self.episode_dir(scenario_id) / name
        image.save(path)
        return path
