"""
    Reporting agent: turns snapshot events into captions and report events
"""
import logging
from collections import Counter
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from app.model.exceptions.llm_exceptions import (EmptyCaptionException, LlmErrorException,
                                                 LlmTimeoutException, LlmUnavailableException)
from app.model.exceptions.router_exceptions import QueueFullException
from app.model.harness.run_config import ReportingConfig
from app.model.reporting.config_args import ConfigArgs
from app.model.reporting.llm_request import LlmRequest
from app.model.reporting.report_outcome import OutcomeKind, ReportOutcome
from app.model.router.event import AgentId, DeliveryMode, Event, Subscription, iso_time
from app.model.runtime_constants import AgentNames, EventTypes, RuntimeConstants as rc
from app.model.vision.detection import Detection
from app.services.clock import Clock, Deadline
from app.services.llm.llm_client import LlmClient
from app.services.message_router import MessageRouter, SubscriberQueue

PROMPT_TEMPLATE = ("You are a surveillance reporting assistant. At {timestamp}, the detector observed: "
                   "{summary}. System configuration: {args_str}. "
                   "Write one concise alert sentence for the operator.")


def format_args(args : ConfigArgs) -> str:
    """
        Single line key=value list, keys sorted, entries separated by "; "
    """
    entries = []
    for key in sorted(args.entries):
        value = args.entries[key]
        if isinstance(value, list):
            value = ",".join(str(item) for item in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        entries.append(f"{key}={value}")
    return "; ".join(entries)


def summarize_detections(detections : list[Detection]) -> str:
    """
        Per-label counts with the highest confidence, labels in alphabetical order
    """
    if len(detections) == 0:
        return "no objects"

    counts = Counter(detection.label for detection in detections)
    best : dict[str, float] = {}
    for detection in detections:
        best[detection.label] = max(best.get(detection.label, 0.0), detection.confidence)

    return ", ".join(f"{label} x{counts[label]} (max conf {best[label]:.2f})" for label in sorted(counts))


def build_prompt(path : Path, detections : list[Detection], timestamp : float, args_str : str) -> str:
    """
        Fill the prompt template. The image itself is never part of the prompt,
        only the structured detections
    """
    return PROMPT_TEMPLATE.format(timestamp=iso_time(timestamp),
                                  summary=summarize_detections(detections),
                                  args_str=args_str if args_str != "" else "defaults")


def generate_caption(path : Path,
                     detections : list[Detection],
                     timestamp : float,
                     args_str : str,
                     client : LlmClient,
                     deadline : Deadline,
                     model : str = rc.LLM_MODEL,
                     prompt_cap : int = rc.PROMPT_CAP) -> str:
    """
        Build the prompt and ask the LLM once. A refused connection is retried
        once after a short backoff, a timeout never is.

        :return: the trimmed caption
    """
    request = LlmRequest(model=model, prompt=build_prompt(path, detections, timestamp, args_str)[:prompt_cap])

    try:
        caption = client.generate(request, deadline)
    except LlmUnavailableException:
        if deadline.remaining() <= rc.LLM_RETRY_BACKOFF_S:
            raise
        logging.warning("LLM unavailable, retrying once in %.0fs", rc.LLM_RETRY_BACKOFF_S)
        deadline.clock.sleep(rc.LLM_RETRY_BACKOFF_S)
        caption = client.generate(request, deadline)

    caption = caption.strip()
    if caption == "":
        raise EmptyCaptionException(f"{client.descriptor} returned an empty caption")
    return caption


class ReportResolution(BaseModel):
    """
        Result of the LLM phase of one snapshot, waiting to be completed
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    event : Event
    outcome : OutcomeKind
    finished_at : float
    caption : str = ""
    detail : str = ""


class ReportingAgent:
    """
        Resolves snapshot events off the dispatch path.

        resolve() runs the LLM call on a worker context and complete() records
        the outcome and publishes the report. Exactly one outcome is recorded
        for every snapshot handed to the agent's queue, including the ones
        dropped from it.
    """

    agent_id : AgentId
    subscription : Subscription
    queue : SubscriberQueue

    def __init__(self, router : MessageRouter, client : LlmClient, config : ReportingConfig, clock : Clock) -> None:
        self.router = router
        self.client = client
        self.config = config
        self.clock = clock
        self.model = config.model
        self.in_flight = 0
        self.dispatch_context_calls = 0

    def attach(self) -> None:
        """
            Register with the router and subscribe to snapshots in background mode
        """
        self.agent_id = self.router.register_agent(AgentNames.REPORTING, self.handle_event)
        self.subscription = self.router.subscribe(self.agent_id, EventTypes.SNAPSHOT, DeliveryMode.BACKGROUND,
                                                  capacity=self.config.queue_cap, on_drop=self.record_dropped)
        self.queue = self.router.background_queue(self.subscription)
        self.router.subscribe(self.agent_id, EventTypes.COMMAND, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.SHUTDOWN, DeliveryMode.INLINE)

    def handle_event(self, event : Event) -> None:
        if event.event_type == EventTypes.COMMAND and event.payload.get("action") == "configure":
            model = event.payload.get("model")
            if isinstance(model, str) and model != "":
                logging.info("Reporting model changed from %s to %s", self.model, model)
                self.model = model
        elif event.event_type == EventTypes.SHUTDOWN:
            logging.info("Reporting agent shutting down, %d snapshots pending", len(self.queue))

    def pending(self) -> int:
        return len(self.queue)

    def resolve(self, event : Event, clock : Clock) -> ReportResolution:
        """
            Run the caption generation for one snapshot event on the given clock
        """
        if self.router.in_dispatch_context():
            self.dispatch_context_calls += 1
            logging.error("Snapshot %s resolved on the dispatch context", event.seq)

        try:
            payload = event.payload
            path = Path(payload["path"])
            detections = payload["detections"]
            timestamp = float(payload["timestamp"])
            args = payload.get("args", ConfigArgs())
        except (KeyError, TypeError, ValueError) as e:
            return ReportResolution(event=event, outcome=OutcomeKind.LLM_ERROR, finished_at=clock.now(),
                                    detail=f"malformed snapshot payload: {e}")

        deadline = Deadline(clock, self.config.deadline_s)
        try:
            caption = generate_caption(path, detections, timestamp, format_args(args), self.client, deadline,
                                       model=self.model, prompt_cap=self.config.prompt_cap)
        except LlmTimeoutException as e:
            logging.warning("Report for snapshot %s timed out: %s", event.seq, e)
            return ReportResolution(event=event, outcome=OutcomeKind.TIMEOUT, finished_at=clock.now(), detail=str(e))
        except (LlmUnavailableException, LlmErrorException, EmptyCaptionException) as e:
            logging.error("Report for snapshot %s failed: %s", event.seq, e)
            return ReportResolution(event=event, outcome=OutcomeKind.LLM_ERROR, finished_at=clock.now(),
                                    detail=str(e))

        return ReportResolution(event=event, outcome=OutcomeKind.DELIVERED, finished_at=clock.now(), caption=caption)

    def complete(self, resolution : ReportResolution) -> ReportOutcome:
        """
            Publish the report of a successful resolution and record the outcome
        """
        outcome = resolution.outcome
        detail = resolution.detail

        if outcome is OutcomeKind.DELIVERED:
            report = self.router.make_event(EventTypes.REPORT,
                                            {"path": Path(resolution.event.payload["path"]),
                                             "caption": resolution.caption},
                                            source=self.agent_id)
            try:
                self.router.send_to_agent(AgentNames.ROUTER, report, source=self.agent_id)
            except QueueFullException as e:
                outcome, detail = OutcomeKind.DROPPED, str(e)

        return self._record(resolution.event, outcome, resolution.finished_at, detail)

    def handle_snapshot_event(self, event : Event) -> ReportOutcome:
        """
            Resolve and complete a snapshot on the calling worker context
        """
        return self.complete(self.resolve(event, self.clock))

    def record_dropped(self, event : Event, detail : str = "dropped from the reporting queue") -> ReportOutcome:
        return self._record(event, OutcomeKind.DROPPED, self.clock.now(), detail)

    def drop_pending(self, detail : str) -> int:
        """
            Record every snapshot still queued as dropped
            :return: the number of snapshots dropped
        """
        events = self.queue.drain()
        for event in events:
            self.record_dropped(event, detail)
        return len(events)

    def _record(self, event : Event, kind : OutcomeKind, finished_at : float, detail : str) -> ReportOutcome:
        outcome = ReportOutcome(snapshot_seq=event.seq if event.seq is not None else 0,
                                outcome=kind,
                                latency_ms=round(max(0.0, finished_at - event.timestamp) * 1000.0, 3),
                                detail=detail)
        self.router.metrics.record_outcome(outcome)
        logging.info("Snapshot %s resolved: %s after %.0f ms", outcome.snapshot_seq, kind.value, outcome.latency_ms)
        return outcome
