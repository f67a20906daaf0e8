"""
    Vision agent: frames in, dwell triggered snapshot events out
"""
import logging
import threading
from pathlib import Path

from app.model.exceptions.router_exceptions import QueueFullException
from app.model.exceptions.vision_exceptions import SnapshotWriteException
from app.model.harness.run_config import VisionConfig
from app.model.reporting.config_args import ConfigArgs
from app.model.router.event import AgentId, DeliveryMode, Event
from app.model.runtime_constants import AgentNames, EventTypes
from app.model.vision.frame import Frame
from app.model.vision.track import TrackerState
from app.model.vision.tracker_config import TrackerConfig
from app.services.clock import Clock
from app.services.detectors.detector_backend import DetectorBackend
from app.services.message_router import MessageRouter
from app.services.snapshot_services import save_snapshot
from app.services.tracker_services import evaluate_triggers, passive_tracker_update

# configure keys the vision agent applies, mapped to tracker fields
TRACKER_KEYS = {"theta": "theta", "conf": "confidence", "dwell": "dwell_seconds",
                "cooldown": "cooldown_seconds", "labels": "target_labels"}


class VisionAgent:
    """
        Runs detect, filter, track and trigger on every frame while started.

        The tracker state belongs to whichever context calls process_frame.
        Start, stop and configure commands arrive on the dispatch context; they
        only flip flags or queue updates that the next frame picks up.
    """

    agent_id : AgentId

    def __init__(self, router : MessageRouter,
                 backend : DetectorBackend,
                 tracker : TrackerConfig,
                 vision : VisionConfig,
                 snapshot_dir : Path,
                 clock : Clock) -> None:
        self.router = router
        self.backend = backend
        self.tracker = tracker
        self.vision = vision
        self.snapshot_dir = Path(snapshot_dir)
        self.clock = clock
        self.state = TrackerState()
        self.running = False

        self._lock = threading.Lock()
        self._pending_updates : dict = {}
        self._first_timestamp : float | None = None
        self._frames = 0

    def attach(self) -> None:
        self.agent_id = self.router.register_agent(AgentNames.VISION, self.handle_event)
        self.router.subscribe(self.agent_id, EventTypes.COMMAND, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.SHUTDOWN, DeliveryMode.INLINE)

    def handle_event(self, event : Event) -> None:
        if event.event_type == EventTypes.SHUTDOWN:
            self.stop()
            return

        match event.payload.get("action"):
            case "start":
                self.start()
            case "stop":
                self.stop()
            case "configure":
                with self._lock:
                    self._pending_updates.update({k: v for k, v in event.payload.items() if k != "action"})

    def start(self) -> None:
        if self.running:
            return
        self.running = True
        logging.info("Vision agent started with backend %s", self.backend.descriptor)
        self._publish_status("running")

    def stop(self) -> None:
        if not self.running:
            return
        self.running = False
        logging.info("Vision agent stopped after %d frames", self._frames)
        self._publish_status("stopped")

    def _publish_status(self, state : str) -> None:
        event = self.router.make_event(EventTypes.STATUS, {"agent": AgentNames.VISION, "state": state},
                                       source=self.agent_id)
        try:
            self.router.send_to_agent(AgentNames.ROUTER, event, source=self.agent_id)
        except QueueFullException as e:
            logging.warning("Status event not published: %s", e)

    def apply_updates(self) -> None:
        """
            Apply configure commands received since the previous frame
        """
        with self._lock:
            updates, self._pending_updates = self._pending_updates, {}
        if not updates:
            return

        tracker_update = {TRACKER_KEYS[k]: v for k, v in updates.items() if k in TRACKER_KEYS}
        if tracker_update:
            self.tracker = TrackerConfig.model_validate(self.tracker.model_dump() | tracker_update)

        vision_update = {k: v for k, v in updates.items() if k in ("resolution", "preview")}
        if vision_update:
            self.vision = VisionConfig.model_validate(self.vision.model_dump() | vision_update)

        logging.info("Vision configuration updated: %s", updates)

    def config_args(self) -> ConfigArgs:
        """
            Current configuration as attached to snapshot events
        """
        width, height = self.vision.resolution
        return ConfigArgs(entries={
            "labels": sorted(self.tracker.target_labels),
            "resolution": f"{width}x{height}",
            "theta": self.tracker.theta,
            "conf": self.tracker.confidence,
            "dwell": self.tracker.dwell_seconds,
            "cooldown": self.tracker.cooldown_seconds,
            "preview": self.vision.preview,
            "detector": self.backend.descriptor,
        })

    def make_frame(self, index : int, timestamp : float) -> Frame:
        width, height = self.vision.resolution
        return Frame(index=index, timestamp=timestamp, width=width, height=height)

    def process_frame(self, frame : Frame) -> int:
        """
            Run one frame through the pipeline. Detections outside the target
            labels or below the confidence floor are dropped before tracking,
            and each snapshot payload carries only the detections that passed
            :return: the number of snapshot events published
        """
        self.apply_updates()
        metrics = self.router.metrics

        try:
            detections = self.backend.detect(frame)
        except Exception as e:
            metrics.increment("errors.backend")
            logging.error("Backend %s failed on frame %d: %s", self.backend.descriptor, frame.index, e)
            return 0

        tracker = self.tracker
        detections = [d for d in detections if d.label in tracker.target_labels and d.confidence >= tracker.confidence]

        passive_tracker_update(self.state, detections, tracker, frame.timestamp)
        triggered = evaluate_triggers(self.state, tracker, frame.timestamp)

        emitted = 0
        for track_id in triggered:
            metrics.increment("triggers")
            try:
                path = save_snapshot(frame, detections, self.state, self.snapshot_dir, track_id)
            except SnapshotWriteException as e:
                metrics.increment("errors.snapshot_write")
                logging.error("Snapshot for track %d not written: %s", track_id, e)
                continue

            event = self.router.make_event(EventTypes.SNAPSHOT,
                                           {"path": path,
                                            "detections": list(detections),
                                            "timestamp": frame.timestamp,
                                            "args": self.config_args()},
                                           source=self.agent_id)
            try:
                self.router.send_to_agent(AgentNames.ROUTER, event, source=self.agent_id)
            except QueueFullException as e:
                logging.error("Snapshot of track %d rejected: %s", track_id, e)
                continue
            emitted += 1

        self._record_frame(frame)
        return emitted

    def _record_frame(self, frame : Frame) -> None:
        if self._first_timestamp is None:
            self._first_timestamp = frame.timestamp
        self._frames += 1

        elapsed = (frame.timestamp - self._first_timestamp) + 1.0 / self.vision.frame_rate
        self.router.metrics.increment("frames_processed")
        self.router.metrics.set_gauge("achieved_fps", round(self._frames / elapsed, 3))

    def run_frames(self, stop : threading.Event) -> None:
        """
            Frame loop for daemon mode: one frame every 1 / frame_rate seconds
            while started, idle otherwise
        """
        period = 1.0 / self.vision.frame_rate
        index = 0

        while not stop.is_set():
            if not self.running:
                stop.wait(period)
                continue

            started = self.clock.now()
            self.process_frame(self.make_frame(index, started))
            index += 1
            stop.wait(max(0.0, started + period - self.clock.now()))
