import math

import pytest

from app.services.clock import Deadline, SimulatedClock, SystemClock
from app.services.simulation_scheduler import Priority, SimulationScheduler


def test_callbacks_run_in_time_then_priority_order(clock):
    scheduler = SimulationScheduler(clock)
    ran = []
    scheduler.schedule_at(1.0, Priority.FRAME, lambda: ran.append(("frame", clock.now())))
    scheduler.schedule_at(1.0, Priority.COMMAND, lambda: ran.append(("command", clock.now())))
    scheduler.schedule_at(0.5, Priority.FRAME, lambda: ran.append(("early", clock.now())))
    scheduler.schedule_at(1.0, Priority.COMPLETION, lambda: ran.append(("completion", clock.now())))

    assert scheduler.run_until(10) == 4
    assert ran == [("early", 0.5), ("completion", 1.0), ("command", 1.0), ("frame", 1.0)]
    assert scheduler.pending() == 0


def test_same_priority_keeps_insertion_order(clock):
    scheduler = SimulationScheduler(clock)
    ran = []
    for name in "abc":
        scheduler.schedule_at(2.0, Priority.FRAME, lambda name=name: ran.append(name))
    scheduler.run_until(2.0)
    assert ran == ["a", "b", "c"]


def test_run_until_stops_at_the_end_time(clock):
    scheduler = SimulationScheduler(clock)
    scheduler.schedule_at(5.0, Priority.FRAME, lambda: None)
    scheduler.schedule_at(15.0, Priority.FRAME, lambda: None)

    assert scheduler.run_until(10) == 1
    assert clock.now() == 5.0
    assert scheduler.next_time() == 15.0


def test_callbacks_may_schedule_more(clock):
    scheduler = SimulationScheduler(clock)
    ran = []

    def tick():
        ran.append(clock.now())
        if clock.now() < 3:
            scheduler.schedule_at(clock.now() + 1, Priority.COMPLETION, tick)

    scheduler.schedule_at(0.0, Priority.FRAME, tick)
    settled = []
    scheduler.run_until(math.inf, after_each=lambda: settled.append(clock.now()))
    assert ran == [0.0, 1.0, 2.0, 3.0]
    assert settled == ran


def test_the_past_cannot_be_scheduled(clock):
    scheduler = SimulationScheduler(clock)
    clock.advance_to(3.0)
    with pytest.raises(ValueError):
        scheduler.schedule_at(2.0, Priority.FRAME, lambda: None)


def test_simulated_clock():
    clock = SimulatedClock(2.0)
    clock.sleep(3.0)
    clock.sleep(-1.0)
    assert clock.now() == 5.0
    with pytest.raises(ValueError):
        clock.advance_to(4.0)

    fork = clock.fork()
    fork.sleep(60)
    assert (clock.now(), fork.now()) == (5.0, 65.0)


def test_deadline(clock):
    deadline = Deadline(clock, 10)
    clock.advance_to(4)
    assert deadline.remaining() == 6
    clock.advance_to(12)
    assert deadline.remaining() == 0
    assert deadline.expired()


def test_system_clock_forks_to_itself():
    clock = SystemClock()
    assert clock.fork() is clock
