"""
    Run configuration of the agent runtime
"""
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.model.runtime_constants import RuntimeConstants as rc
from app.model.vision.tracker_config import TrackerConfig


class BackendConfig(BaseModel):
    """
        Which detector backend feeds the vision agent
    """

    model_config = ConfigDict(extra="forbid")

    kind : Literal["replay", "synthetic", "external"]
    path : Path | None = None
    descriptor : str | None = None

    @model_validator(mode="after")
    def check_path(self) -> "BackendConfig":
        if self.kind in ("replay", "synthetic") and self.path is None:
            raise ValueError(f"a {self.kind} backend needs a path")
        return self


class VisionConfig(BaseModel):
    """
        Frame loop settings
    """

    model_config = ConfigDict(extra="forbid")

    frame_rate : float = Field(default=rc.FRAME_RATE, gt=0.0)
    resolution : tuple[int, int] = rc.RESOLUTION
    autostart : bool = False
    preview : bool = False

    @field_validator("resolution", mode="before")
    @classmethod
    def parse_resolution(cls, value):
        if isinstance(value, str):
            return parse_resolution(value)
        return value


class ReportingConfig(BaseModel):
    """
        LLM reporting settings
    """

    model_config = ConfigDict(extra="forbid")

    enabled : bool = True
    client : Literal["ollama", "mock"] = "ollama"
    base_url : str = rc.LLM_BASE_URL
    model : str = rc.LLM_MODEL
    deadline_s : float = Field(default=rc.REPORT_DEADLINE_S, gt=0.0)
    max_in_flight : int = Field(default=rc.REPORT_MAX_IN_FLIGHT, ge=1)
    queue_cap : int = Field(default=rc.REPORT_QUEUE_CAP, ge=1)
    prompt_cap : int = Field(default=rc.PROMPT_CAP, ge=1)
    mock_delay_s : float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def check_endpoint(self) -> "ReportingConfig":
        if self.enabled and (self.base_url.strip() == "" or self.model.strip() == ""):
            raise ValueError("base_url and model are required when reporting is enabled")
        return self


class ChannelConfig(BaseModel):
    """
        Which chat channel carries reports and commands
    """

    model_config = ConfigDict(extra="forbid")

    kind : Literal["mock", "console", "slack"]
    channel_id : str | None = None
    direct_post : bool = False

    @model_validator(mode="after")
    def check_channel_id(self) -> "ChannelConfig":
        if self.kind == "slack" and not self.channel_id:
            raise ValueError("a slack channel needs channel_id")
        return self


class RouterConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    queue_capacity : int = Field(default=rc.ROUTER_QUEUE_CAPACITY, ge=1)
    background_capacity : int = Field(default=rc.BACKGROUND_QUEUE_CAPACITY, ge=1)


class RunSection(BaseModel):
    """
        Output locations and the seed of the run
    """

    model_config = ConfigDict(extra="forbid")

    snapshot_dir : Path = Path(rc.SNAPSHOT_DIR)
    metrics_out : Path = Path(rc.METRICS_OUT)
    seed : int = Field(default=0, ge=0)
    log_file : Path | None = None


class RunConfig(BaseModel):
    """
        Complete, validated run configuration
    """

    model_config = ConfigDict(extra="forbid")

    backend : BackendConfig
    channel : ChannelConfig
    vision : VisionConfig = VisionConfig()
    tracker : TrackerConfig = TrackerConfig()
    reporting : ReportingConfig = ReportingConfig()
    router : RouterConfig = RouterConfig()
    run : RunSection = RunSection()


def parse_resolution(value : str) -> tuple[int, int]:
    """
        Parse WIDTHxHEIGHT
    """
    parts = value.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"resolution must look like 640x480, got {value!r}")
    width, height = int(parts[0]), int(parts[1])
    if width <= 0 or height <= 0:
        raise ValueError(f"resolution must be positive, got {value!r}")
    return width, height
