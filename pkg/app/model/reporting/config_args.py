"""
    Configuration entries attached to snapshot events
"""
from pydantic import BaseModel, ConfigDict


class ConfigArgs(BaseModel):
    """
        Run configuration relevant to reporting: labels, resolution,
        thresholds and the detector descriptor
    """

    model_config = ConfigDict(frozen=True)

    entries : dict[str, str | int | float | bool | list[str]] = {}
