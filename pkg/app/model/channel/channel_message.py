"""
    Messages exchanged with the chat channel
"""
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, model_validator


class Direction(Enum):
    INBOUND = "inbound"
    OUTBOUND = "outbound"


class ChannelMessage(BaseModel):
    """
        One chat message. Outbound messages need text or an attachment
    """

    direction : Direction
    text : str = ""
    attachment : Path | None = None
    channel_id : str = ""
    sender : str = ""
    timestamp : float = 0.0

    @model_validator(mode="after")
    def check_content(self) -> "ChannelMessage":
        if self.direction is Direction.OUTBOUND and self.text == "" and self.attachment is None:
            raise ValueError("outbound message needs text or an attachment")
        return self
