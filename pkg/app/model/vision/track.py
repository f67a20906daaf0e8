"""
    Persistent object identities kept by the passive tracker
"""
from pydantic import BaseModel, Field

from app.model.vision.bbox import BBox


class Track(BaseModel):
    """
        One tracked object. lost_count counts consecutive unmatched frames
    """

    id : int = Field(gt=0)
    box : BBox
    label : str
    lost_count : int = Field(default=0, ge=0)
    first_seen : float
    last_matched : float
    last_reported : float | None = None


class TrackerState(BaseModel):
    """
        Tracks in creation order and the next identity to issue
    """

    tracks : list[Track] = []
    next_id : int = 1

    def get(self, track_id : int) -> Track | None:
        for track in self.tracks:
            if track.id == track_id:
                return track
        return None
