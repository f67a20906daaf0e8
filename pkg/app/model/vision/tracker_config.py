"""
    Tracking and trigger thresholds
"""
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.model.runtime_constants import RuntimeConstants as rc


class TrackerConfig(BaseModel):
    """
        Thresholds of the passive tracker and the dwell trigger
    """

    model_config = ConfigDict(extra="forbid")

    theta : float = Field(default=rc.TRACKER_THETA, gt=0.0, lt=1.0)
    l_max : int = Field(default=rc.TRACKER_L_MAX, ge=1)
    dwell_seconds : float = Field(default=rc.TRACKER_DWELL_S, gt=0.0)
    cooldown_seconds : float = Field(default=rc.TRACKER_COOLDOWN_S, ge=0.0)
    confidence : float = Field(default=rc.TRACKER_CONFIDENCE, ge=0.0, le=1.0)
    target_labels : frozenset[str] = frozenset(rc.TRACKER_TARGET_LABELS)

    @field_validator("target_labels", mode="before")
    @classmethod
    def split_labels(cls, value):
        if isinstance(value, str):
            value = [label.strip() for label in value.split(",") if label.strip() != ""]
        if len(value) == 0:
            raise ValueError("at least one target label is required")
        return frozenset(value)
