"""
    Values an operator may change at runtime with the configure command
"""
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.model.harness.run_config import parse_resolution

CONFIGURE_KEYS : tuple[str, ...] = ("labels", "resolution", "theta", "conf", "dwell", "cooldown", "preview", "model")


class ConfigureParams(BaseModel):
    """
        Validated configure parameters, None for keys the command did not set.
        labels and resolution keep their text form so they fit in an event payload
    """

    model_config = ConfigDict(extra="forbid")

    labels : str | None = None
    resolution : str | None = None
    theta : float | None = Field(default=None, gt=0.0, lt=1.0)
    conf : float | None = Field(default=None, ge=0.0, le=1.0)
    dwell : float | None = Field(default=None, gt=0.0)
    cooldown : float | None = Field(default=None, ge=0.0)
    preview : bool | None = None
    model : str | None = None

    @field_validator("labels")
    @classmethod
    def normalise_labels(cls, value):
        if value is None:
            return value
        labels = sorted({label.strip() for label in value.split(",") if label.strip() != ""})
        if len(labels) == 0:
            raise ValueError("at least one label is required")
        return ",".join(labels)

    @field_validator("resolution")
    @classmethod
    def normalise_resolution(cls, value):
        if value is None:
            return value
        width, height = parse_resolution(value)
        return f"{width}x{height}"

    @field_validator("model")
    @classmethod
    def check_model(cls, value):
        if value is not None and value.strip() == "":
            raise ValueError("model name must not be empty")
        return value

    def applied(self) -> dict[str, str | float | bool]:
        return self.model_dump(exclude_none=True)
