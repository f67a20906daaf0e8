"""
    Frame handed to a detector backend
"""
from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class Frame(BaseModel):
    """
        One camera frame. pixels is an HxWx3 uint8 array, absent for
        detection-only replay
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    index : int = Field(ge=0)
    timestamp : float
    width : int = Field(gt=0)
    height : int = Field(gt=0)
    pixels : Any = None
