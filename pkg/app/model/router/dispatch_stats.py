"""
    Counters returned by a dispatch loop
"""
from pydantic import BaseModel


class DispatchStats(BaseModel):
    """
        What one run of the dispatch loop did
    """

    dispatched : int = 0
    deliveries : int = 0
    dropped : int = 0
    handler_errors : int = 0
    latency_us : list[float] = []
