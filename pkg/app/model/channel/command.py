"""
    Operator command parsed from a chat message
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict


class CommandKind(Enum):
    START = "start"
    STOP = "stop"
    STATUS = "status"
    CONFIGURE = "configure"
    HELP = "help"
    QUIT = "quit"
    UNKNOWN = "unknown"


class Command(BaseModel):
    """
        params is only filled for configure, raw only for unknown
    """

    model_config = ConfigDict(frozen=True)

    kind : CommandKind
    params : dict[str, str] = {}
    raw : str = ""
