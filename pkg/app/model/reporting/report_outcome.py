"""
    Result of resolving one snapshot event
"""
from enum import Enum

from pydantic import BaseModel


class OutcomeKind(Enum):
    """
        How a consumed snapshot ended
    """
    DELIVERED = "delivered"
    TIMEOUT = "timeout"
    DROPPED = "dropped"
    LLM_ERROR = "llm_error"


class ReportOutcome(BaseModel):
    """
        One outcome per consumed snapshot event
    """

    snapshot_seq : int
    outcome : OutcomeKind
    latency_ms : float
    detail : str = ""
