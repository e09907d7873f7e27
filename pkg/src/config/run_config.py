"""
Run configuration

Every navigation, reasoning and simulation parameter with its default.
Values come from (highest priority first) explicit overrides, the JSON config
file, NAVKIT_* environment variables (nested with `__`), then the defaults
below. The resolved config is written next to every set of results.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class MapSettings(_Section):
    wall_threshold: int = Field(128, ge=0, le=255)


class RoomSettings(_Section):
    close_radius: int = Field(1, ge=0)
    blur_sigma: float = Field(2.0, gt=0)
    background_radius: int = Field(3, ge=0)
    min_room_area_m2: float = Field(2.0, ge=0)
    # Optional constant seed threshold in meters; replaces Otsu when set
    distance_threshold_m: Optional[float] = Field(None, gt=0)


class NodeSettings(_Section):
    radius_m: float = Field(0.5, gt=0)
    padding_m: float = Field(0.25, ge=0)
    k_attempts: int = Field(30, ge=1)


class ReasoningSettings(_Section):
    backend: Literal['oracle', 'adversarial', 'http'] = 'oracle'
    mode: Literal['hierarchical', 'single_stage', 'direct'] = 'hierarchical'
    endpoint: Optional[str] = None
    model: Optional[str] = None
    ensemble: bool = False
    ensemble_models: Optional[List[str]] = None
    discriminator_model: Optional[str] = None
    api_token_env: str = 'NAVKIT_API_TOKEN'
    retries: int = Field(2, ge=0)
    transport_retries: int = Field(2, ge=0)
    timeout_s: float = Field(60.0, gt=0)
    image_max_side: int = Field(1024, ge=16)
    crop_margin_m: float = Field(1.5, gt=0)
    room_crop_margin_m: float = Field(0.5, ge=0)
    render_scale: int = Field(4, ge=1)


class NavSettings(_Section):
    replan_interval: int = Field(10, ge=1)
    waypoint_distance_m: float = Field(1.0, ge=0)
    prox1_m: float = Field(1.5, gt=0)
    prox2_m: float = Field(0.75, gt=0)
    clearance_weight: float = Field(2.0, ge=0)
    safe_distance_m: float = Field(0.5, ge=0)
    min_clearance_cells: float = Field(1.0, ge=0)
    verification_reserve_steps: int = Field(40, ge=1)
    path_deviation_cells: int = Field(3, ge=1)


class VfhSettings(_Section):
    sectors: int = Field(36, ge=4)
    window_m: float = Field(1.5, gt=0)
    density_threshold: float = Field(3.0, gt=0)
    safety_radius_m: float = Field(0.2, ge=0)
    target_weight: float = 5.0
    heading_weight: float = 2.0
    forward_tolerance_deg: float = Field(15.0, gt=0)


class SensorSettings(_Section):
    fov_deg: float = Field(90.0, gt=0, lt=360)
    max_range_m: float = Field(5.0, gt=0)
    rays: int = Field(128, ge=1)


class CameraSettings(_Section):
    hfov_deg: float = Field(90.0, gt=0, lt=180)
    width: int = Field(128, ge=1)
    height: int = Field(96, ge=2)


class VerifySettings(_Section):
    detector: Literal['oracle'] = 'oracle'
    detector_range_m: float = Field(3.0, gt=0)
    confidence_threshold: float = Field(0.5, ge=0, le=1)
    stop_radius_m: float = Field(0.5, gt=0)
    scan_turns: int = Field(12, ge=1)
    approach_step_limit: int = Field(40, ge=1)


class SimSettings(_Section):
    step_size_m: float = Field(0.25, gt=0)
    turn_deg: float = Field(30.0, gt=0)
    success_radius_m: float = Field(1.0, gt=0)
    max_steps: int = Field(500, ge=1)
    success_metric: Literal['euclidean', 'geodesic'] = 'euclidean'


class HarnessSettings(_Section):
    seed: int = 0
    jobs: int = Field(1, ge=1)
    dump_artifacts: bool = False


class RunConfig(BaseSettings):
    """Complete parameter set for one run (segmentation through metrics)"""

    model_config = SettingsConfigDict(
        env_prefix='NAVKIT_',
        env_nested_delimiter='__',
        extra='forbid',
    )

    map: MapSettings = MapSettings()
    rooms: RoomSettings = RoomSettings()
    nodes: NodeSettings = NodeSettings()
    reasoning: ReasoningSettings = ReasoningSettings()
    nav: NavSettings = NavSettings()
    vfh: VfhSettings = VfhSettings()
    sensor: SensorSettings = SensorSettings()
    camera: CameraSettings = CameraSettings()
    verify: VerifySettings = VerifySettings()
    sim: SimSettings = SimSettings()
    harness: HarnessSettings = HarnessSettings()

    @classmethod
    def from_file(cls, path: Optional[str] = None,
                  overrides: Optional[Dict[str, Any]] = None) -> 'RunConfig':
        """
        Build a RunConfig from an optional JSON file plus dotted overrides

        Args:
            path: JSON config file (any subset of the fields)
            overrides: mapping like {'reasoning.backend': 'http', 'harness.jobs': 4};
                None values are skipped so unset CLI flags keep file/env values

        Returns:
            Validated RunConfig
        """
        data: Dict[str, Any] = {}
        if path:
            with open(Path(path), 'r', encoding='utf-8') as f:
                data = json.load(f)

        for dotted, value in (overrides or {}).items():
            if value is None:
                continue
            section, _, key = dotted.partition('.')
            data.setdefault(section, {})[key] = value

        return cls(**data)

    @classmethod
    def from_json(cls, payload: str) -> 'RunConfig':
        """Rebuild an exact copy (no environment lookup) from model_dump_json output"""
        return cls.model_validate(json.loads(payload))
