"""
    Builds the router and the agents for a run configuration
"""
import logging
import os
import sys
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from app.model.exceptions.channel_exceptions import AdapterInitException
from app.model.exceptions.config_exceptions import SnapshotDirException
from app.model.harness.run_config import ChannelConfig, ReportingConfig, RunConfig
from app.services.agents.audit_agent import AuditAgent
from app.services.agents.communication_agent import CommunicationAgent
from app.services.agents.control_agent import ControlAgent
from app.services.agents.reporting_agent import ReportingAgent
from app.services.agents.vision_agent import VisionAgent
from app.services.channels.channel_adapter import ChannelAdapter
from app.services.channels.console_adapter import ConsoleAdapter
from app.services.channels.mock_adapter import MockAdapter
from app.services.channels.slack_adapter import slack_adapter
from app.services.clock import Clock
from app.services.detectors.detector_backend import DetectorBackend, create_backend
from app.services.llm.llm_client import LlmClient
from app.services.llm.mock_llm_client import MockLlmClient
from app.services.llm.ollama_client import OllamaClient
from app.services.message_router import MessageRouter
from app.services.metrics_sink import MetricsSink


class System(BaseModel):
    """
        Handle on a bootstrapped runtime
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config : RunConfig
    clock : Clock
    metrics : MetricsSink
    router : MessageRouter
    adapter : ChannelAdapter
    vision : VisionAgent
    reporting : ReportingAgent | None
    communication : CommunicationAgent
    control : ControlAgent
    audit : AuditAgent | None = None

    def report_load(self) -> tuple[int, int]:
        if self.reporting is None:
            return 0, 0
        return self.reporting.pending(), self.reporting.in_flight


def prepare_snapshot_dir(path : Path) -> Path:
    """
        Create the snapshot directory and check that it is writable
    """
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise SnapshotDirException(f"cannot create snapshot directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise SnapshotDirException(f"snapshot directory {path} is not writable")
    return path


def build_llm_client(config : ReportingConfig) -> LlmClient:
    """
        Factory method returning the configured LLM client
    """
    match config.client:
        case "mock":
            return MockLlmClient(delay_s=config.mock_delay_s)
        case _:
            return OllamaClient(config.base_url)


def build_adapter(config : ChannelConfig, clock : Clock, interactive : bool = False) -> ChannelAdapter:
    """
        Factory method returning the configured channel adapter. The console
        adapter only reads standard input in interactive runs
    """
    match config.kind:
        case "mock":
            return MockAdapter(clock, config.channel_id or "mock")
        case "console":
            return ConsoleAdapter(clock, input_stream=sys.stdin if interactive else None)
        case "slack":
            return slack_adapter(clock, config.channel_id)
        case _:
            raise AdapterInitException(f"unknown channel kind {config.kind!r}")


def bootstrap(config : RunConfig,
              clock : Clock,
              adapter : ChannelAdapter | None = None,
              backend : DetectorBackend | None = None,
              llm_client : LlmClient | None = None,
              audit : bool = False,
              interactive : bool = False) -> System:
    """
        Construct the router, register the agents with their subscriptions and
        start the control agent's channel listener. The vision agent waits for
        a start command unless vision.autostart is set
    """
    snapshot_dir = prepare_snapshot_dir(config.run.snapshot_dir)
    metrics = MetricsSink()
    router = MessageRouter(clock, metrics,
                           queue_capacity=config.router.queue_capacity,
                           background_capacity=config.router.background_capacity,
                           snapshot_dir=snapshot_dir)

    backend = backend if backend is not None else create_backend(config.backend, config.run.seed)
    adapter = adapter if adapter is not None else build_adapter(config.channel, clock, interactive)

    vision = VisionAgent(router, backend, config.tracker, config.vision, snapshot_dir, clock)
    vision.attach()

    reporting = None
    if config.reporting.enabled:
        client = llm_client if llm_client is not None else build_llm_client(config.reporting)
        reporting = ReportingAgent(router, client, config.reporting, clock)
        reporting.attach()

    direct_post = config.channel.direct_post and not config.reporting.enabled
    communication = CommunicationAgent(router, adapter, direct_post=direct_post)
    communication.attach()

    control = ControlAgent(router, adapter, clock)
    control.attach()

    audit_agent = None
    if audit:
        audit_agent = AuditAgent(router)
        audit_agent.attach()

    system = System(config=config, clock=clock, metrics=metrics, router=router, adapter=adapter,
                    vision=vision, reporting=reporting, communication=communication, control=control,
                    audit=audit_agent)
    control.report_load = system.report_load

    control.listen()
    logging.info("Bootstrapped %s backend, %s channel, reporting %s",
                 backend.descriptor, adapter.descriptor, "enabled" if reporting is not None else "disabled")

    if config.vision.autostart:
        vision.start()
    return system
