"""
    Controller to co-ordinate a live run on the wall clock
"""
import logging
import signal
import threading

from app.model.exceptions.channel_exceptions import AdapterInitException, AuthFailureException
from app.model.exceptions.config_exceptions import SnapshotDirException
from app.model.exceptions.vision_exceptions import InvalidScriptException, ParseErrorException
from app.model.harness.run_config import RunConfig
from app.model.runtime_constants import RuntimeConstants as rc
from app.services.agents.report_workers import ThreadedReportWorkers
from app.services.clock import SystemClock
from app.services.metrics_sink import write_metrics
from app.services.system import System, bootstrap

EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_FAULT = 3


class DaemonController:
    """
        Co-ordinate the threads of a live run: router dispatch, reporting
        workers, the frame loop and the channel listener
    """

    config : RunConfig
    system : System

    def __init__(self, config : RunConfig) -> None:
        self.config = config
        self.clock = SystemClock()
        self._stop_dispatch = threading.Event()
        self._stop_frames = threading.Event()
        self._threads : list[threading.Thread] = []
        self.workers : ThreadedReportWorkers | None = None

    def start(self) -> None:
        """
            Bootstrap the system and start its threads
        """
        self.system = bootstrap(self.config, self.clock, interactive=True)

        dispatch = threading.Thread(target=self.system.router.run_dispatch, args=(self._stop_dispatch,),
                                    name="router-dispatch", daemon=True)
        frames = threading.Thread(target=self.system.vision.run_frames, args=(self._stop_frames,),
                                  name="vision-frames", daemon=True)
        self._threads = [dispatch, frames]
        for thread in self._threads:
            thread.start()

        if self.system.reporting is not None:
            self.workers = ThreadedReportWorkers(self.system.reporting, self.config.reporting.max_in_flight)
            self.workers.start()

    def wait(self, status_interval : float = rc.STATUS_INTERVAL_S) -> None:
        """
            Block until a quit command, logging a status line periodically
        """
        while not self.system.control.shutdown_requested.wait(status_interval):
            logging.info("status: %s", self.system.control.status_text())

    def request_shutdown(self, *_) -> None:
        self.system.control.shutdown_requested.set()

    def shutdown(self) -> None:
        """
            Stop adapters, then vision, then drain reporting, then the router,
            and flush the metrics
        """
        system = self.system
        system.adapter.stop()

        self._stop_frames.set()
        self._threads[1].join(timeout=5)
        system.vision.stop()

        if self.workers is not None:
            self.workers.stop(self.config.reporting.deadline_s)

        self._stop_dispatch.set()
        self._threads[0].join(timeout=5)

        # the final dispatch flush can queue snapshots after the workers stopped
        if system.reporting is not None:
            system.reporting.drop_pending("queued after the reporting drain")

        write_metrics(system.metrics.snapshot(), self.config.run.metrics_out)


def run_daemon(config : RunConfig) -> int:
    """
        Run until interrupted or told to quit
        :return: the process exit code
    """
    controller = DaemonController(config)
    try:
        controller.start()
    except (AdapterInitException, AuthFailureException, SnapshotDirException,
            ParseErrorException, InvalidScriptException, OSError) as e:
        logging.error("Bootstrap failed: %s", e)
        return EXIT_RUNTIME_FAULT

    if threading.current_thread() is threading.main_thread():
        signal.signal(signal.SIGTERM, controller.request_shutdown)

    try:
        controller.wait()
    except KeyboardInterrupt:
        logging.info("Interrupted")

    try:
        controller.shutdown()
    except OSError as e:
        logging.error("Shutdown failed: %s", e)
        return EXIT_RUNTIME_FAULT
    return EXIT_OK
