"""
    Discrete event scheduler driving scenarios on the simulated clock
"""
import heapq
import itertools
from collections.abc import Callable

from app.services.clock import SimulatedClock


class Priority:
    """
        Order of callbacks scheduled for the same virtual time
    """
    COMPLETION : int = 0
    COMMAND : int = 1
    FRAME : int = 2


class SimulationScheduler:
    """
        Runs callbacks in (time, priority, insertion) order and moves the
        clock to each callback's time before running it
    """

    def __init__(self, clock : SimulatedClock) -> None:
        self.clock = clock
        self._heap : list[tuple[float, int, int, Callable[[], None]]] = []
        self._counter = itertools.count()

    def schedule_at(self, time : float, priority : int, callback : Callable[[], None]) -> None:
        if time < self.clock.now():
            raise ValueError(f"cannot schedule at {time}, clock is already at {self.clock.now()}")
        heapq.heappush(self._heap, (time, priority, next(self._counter), callback))

    def pending(self) -> int:
        return len(self._heap)

    def next_time(self) -> float | None:
        return self._heap[0][0] if self._heap else None

    def run_until(self, end_time : float, after_each : Callable[[], None] | None = None) -> int:
        """
            Run every callback scheduled at or before end_time, including the
            ones scheduled while running
            :return: the number of callbacks run
        """
        ran = 0
        while self._heap and self._heap[0][0] <= end_time:
            time, _, _, callback = heapq.heappop(self._heap)
            self.clock.advance_to(time)
            callback()
            ran += 1
            if after_each is not None:
                after_each()
        return ran
