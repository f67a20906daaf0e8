"""
    Events exchanged through the message router
"""
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class AgentId(BaseModel):
    """
        Name of a registered agent
    """

    model_config = ConfigDict(frozen=True)

    name : str = Field(min_length=1)

    def __str__(self) -> str:
        return self.name


class DeliveryMode(Enum):
    """
        inline handlers run on the dispatch path, background deliveries go
        to the subscriber's own bounded queue
    """
    INLINE = "inline"
    BACKGROUND = "background"


class Subscription(BaseModel):
    """
        One (agent, event type) subscription
    """

    model_config = ConfigDict(frozen=True)

    agent : AgentId
    event_type : str
    mode : DeliveryMode


class Event(BaseModel):
    """
        Typed, timestamped message. seq and source are filled in by the router
        when the event is published
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    event_type : str = Field(min_length=1)
    timestamp : float
    payload : dict[str, Any] = {}
    source : str | None = None
    seq : int | None = None

    def iso_timestamp(self) -> str:
        return iso_time(self.timestamp)


def iso_time(timestamp : float) -> str:
    """
        Render clock seconds as ISO-8601 in UTC with millisecond precision
    """
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).isoformat(timespec="milliseconds")
