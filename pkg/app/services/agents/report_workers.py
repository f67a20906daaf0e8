"""
    Execution contexts that consume the reporting agent's queue
"""
import logging
import threading

from app.services.agents.reporting_agent import ReportingAgent, ReportResolution
from app.services.clock import SimulatedClock
from app.services.simulation_scheduler import Priority, SimulationScheduler


class ThreadedReportWorkers:
    """
        max_in_flight worker threads, each resolving one snapshot at a time
    """

    def __init__(self, agent : ReportingAgent, max_in_flight : int) -> None:
        self.agent = agent
        self.max_in_flight = max_in_flight
        self._stopping = threading.Event()
        self._threads : list[threading.Thread] = []
        self._lock = threading.Lock()

    def start(self) -> None:
        for index in range(self.max_in_flight):
            thread = threading.Thread(target=self._work, name=f"reporting-worker-{index}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def _work(self) -> None:
        while not self._stopping.is_set():
            event = self.agent.queue.take(timeout=0.1)
            if event is None:
                continue

            with self._lock:
                self.agent.in_flight += 1
            try:
                self.agent.handle_snapshot_event(event)
            except Exception as e:
                logging.error("Reporting worker failed on snapshot %s: %s", event.seq, e)
                self.agent.record_dropped(event, f"worker failure: {e}")
            finally:
                with self._lock:
                    self.agent.in_flight -= 1

    def stop(self, drain_s : float) -> None:
        """
            Let in-flight jobs finish for up to drain_s, then record what is
            still queued as dropped
        """
        self._stopping.set()
        self.agent.queue.close()
        for thread in self._threads:
            thread.join(timeout=drain_s)
            if thread.is_alive():
                logging.warning("%s still busy after %.0fs drain", thread.name, drain_s)

        self.agent.drop_pending("still queued at shutdown")


class SimulatedReportWorkers:
    """
        Worker pool for scenarios. A job started at virtual time t runs its LLM
        call on a private fork of the clock and completes at the time that fork
        reached, as a scheduler callback
    """

    def __init__(self, agent : ReportingAgent, max_in_flight : int,
                 scheduler : SimulationScheduler, clock : SimulatedClock) -> None:
        self.agent = agent
        self.max_in_flight = max_in_flight
        self.scheduler = scheduler
        self.clock = clock
        self.accept_until : float | None = None

    def pump(self) -> int:
        """
            Start queued jobs while slots are free
            :return: the number of jobs started
        """
        started = 0
        while self.agent.in_flight < self.max_in_flight:
            if self.accept_until is not None and self.clock.now() > self.accept_until:
                break
            event = self.agent.queue.poll()
            if event is None:
                break

            self.agent.in_flight += 1
            resolution = self.agent.resolve(event, self.clock.fork())
            self.scheduler.schedule_at(resolution.finished_at, Priority.COMPLETION,
                                       lambda resolution=resolution: self._finish(resolution))
            started += 1
        return started

    def _finish(self, resolution : ReportResolution) -> None:
        self.agent.in_flight -= 1
        self.agent.complete(resolution)

    def stop(self, drain_s : float) -> None:
        """
            Queued jobs may still start during the next drain_s virtual seconds
        """
        self.accept_until = self.clock.now() + drain_s

    def finish(self) -> None:
        self.agent.drop_pending("still queued at shutdown")
