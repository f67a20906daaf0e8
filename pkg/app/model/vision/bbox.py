"""
    Axis aligned bounding box in pixel coordinates
"""
from pydantic import BaseModel, ConfigDict, model_validator


class BBox(BaseModel):
    """
        Box given by its top left (x1, y1) and bottom right (x2, y2) corners
    """

    model_config = ConfigDict(frozen=True)

    x1 : float
    y1 : float
    x2 : float
    y2 : float

    @model_validator(mode="after")
    def check_corners(self) -> "BBox":
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise ValueError(f"corners out of order: ({self.x1}, {self.y1}, {self.x2}, {self.y2})")
        return self

    @classmethod
    def of(cls, x1 : float, y1 : float, x2 : float, y2 : float) -> "BBox":
        return cls(x1=x1, y1=y1, x2=x2, y2=y2)

    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)

    def clip(self, width : float, height : float) -> "BBox":
        """
            Clip the box to a width x height canvas
        """
        x1 = min(max(self.x1, 0.0), width)
        y1 = min(max(self.y1, 0.0), height)
        x2 = min(max(self.x2, 0.0), width)
        y2 = min(max(self.y2, 0.0), height)
        return BBox.of(x1, y1, x2, y2)

    def shifted(self, dx : float, dy : float) -> "BBox":
        return BBox.of(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)
