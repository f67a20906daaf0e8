"""
    Scripted objects for the synthetic detector backend
"""
from pydantic import BaseModel, Field

from app.model.vision.bbox import BBox


class Trajectory(BaseModel):
    """
        One object moving linearly from start_frame to end_frame
    """

    name : str
    label : str = Field(min_length=1)
    start_frame : int = Field(ge=0)
    end_frame : int = Field(ge=0)
    box : BBox
    velocity : tuple[float, float] = (0.0, 0.0)
    confidence : float = Field(default=0.9, ge=0.0, le=1.0)


class SyntheticScript(BaseModel):
    """
        The trajectories plus the deterministic dropout settings
    """

    trajectories : list[Trajectory] = []
    dropout : float = Field(default=0.0, ge=0.0, le=1.0)
    seed : int = Field(default=0, ge=0)
