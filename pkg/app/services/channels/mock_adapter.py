"""
    In-memory channel adapter for tests and scenarios
"""
import itertools
import threading

from app.model.channel.channel_message import ChannelMessage
from app.model.exceptions.channel_exceptions import ChannelUnavailableException
from app.services.channels.channel_adapter import ChannelAdapter
from app.services.clock import Clock


class MockAdapter(ChannelAdapter):
    """
        Keeps posted messages in order. fail_next(n) makes the next n posts
        raise ChannelUnavailableException
    """

    descriptor : str = "mock"

    def __init__(self, clock : Clock, channel_id : str = "mock") -> None:
        super().__init__(clock, channel_id)
        self._posted : list[ChannelMessage] = []
        self._lock = threading.Lock()
        self._ids = itertools.count(1)
        self._failures = 0

    def fail_next(self, count : int) -> None:
        with self._lock:
            self._failures = count

    def post(self, message : ChannelMessage) -> str:
        with self._lock:
            if self._failures > 0:
                self._failures -= 1
                raise ChannelUnavailableException("mock channel is down")
            self._posted.append(message)
            return f"mock-{next(self._ids)}"

    def collect(self) -> list[ChannelMessage]:
        with self._lock:
            return list(self._posted)


def mock_adapter(clock : Clock, channel_id : str = "mock") -> MockAdapter:
    return MockAdapter(clock, channel_id)
