"""
    Wall clock and simulated clock used by every agent
"""
import threading
import time


class SystemClock:
    """
        Wall-time clock for daemon mode
    """

    def now(self) -> float:
        return time.time()

    def sleep(self, seconds : float) -> None:
        if seconds > 0:
            time.sleep(seconds)

    def fork(self) -> "SystemClock":
        return self


class SimulatedClock:
    """
        Deterministic clock for scenarios. It never waits, sleep() only
        moves virtual time forwards
    """

    def __init__(self, start : float = 0.0) -> None:
        self._now = start
        self._lock = threading.Lock()

    def now(self) -> float:
        return self._now

    def advance_to(self, target : float) -> None:
        """
            Move the clock to target. Moving backwards is a scenario authoring error
        """
        with self._lock:
            if target < self._now:
                raise ValueError(f"Cannot move clock backwards from {self._now} to {target}")
            self._now = target

    def sleep(self, seconds : float) -> None:
        if seconds > 0:
            self.advance_to(self._now + seconds)

    def fork(self) -> "SimulatedClock":
        """
            Private clock starting at the current time, used to time one
            background job without moving the shared clock
        """
        return SimulatedClock(self._now)


Clock = SystemClock | SimulatedClock


class Deadline:
    """
        Absolute expiry on a clock, handed to LLM clients
    """

    clock : Clock
    expires_at : float

    def __init__(self, clock : Clock, seconds : float) -> None:
        self.clock = clock
        self.expires_at = clock.now() + seconds

    def remaining(self) -> float:
        return max(0.0, self.expires_at - self.clock.now())

    def expired(self) -> bool:
        return self.remaining() <= 0.0
