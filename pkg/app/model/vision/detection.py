"""
    A single detector output
"""
from pydantic import BaseModel, ConfigDict, Field

from app.model.vision.bbox import BBox


class Detection(BaseModel):
    """
        Box, class label and confidence reported by a detector backend
    """

    model_config = ConfigDict(frozen=True)

    box : BBox
    label : str = Field(min_length=1)
    confidence : float = Field(ge=0.0, le=1.0)
