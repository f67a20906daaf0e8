"""
    Control agent: operator commands from the chat channel
"""
import logging
import threading
from collections.abc import Callable

from app.model.channel.channel_message import ChannelMessage, Direction
from app.model.channel.command import Command, CommandKind
from app.model.exceptions.channel_exceptions import AuthFailureException, ChannelUnavailableException
from app.model.exceptions.config_exceptions import ConfigValidationException
from app.model.exceptions.router_exceptions import QueueFullException
from app.model.reporting.report_outcome import OutcomeKind
from app.model.router.event import AgentId, DeliveryMode, Event
from app.model.runtime_constants import AgentNames, EventTypes
from app.services.channels.channel_adapter import ChannelAdapter
from app.services.clock import Clock
from app.services.command_parser import HELP_TEXT, parse_command, validate_configure
from app.services.message_router import MessageRouter


class ControlAgent:
    """
        Parses inbound messages, publishes command events and answers the
        operator. Commands are published for inline delivery so they are
        handled even when the reporting queue is saturated.

        report_load returns (queued, in flight) snapshots of the reporting agent.
    """

    agent_id : AgentId

    def __init__(self, router : MessageRouter,
                 adapter : ChannelAdapter,
                 clock : Clock,
                 report_load : Callable[[], tuple[int, int]] | None = None) -> None:
        self.router = router
        self.adapter = adapter
        self.clock = clock
        self.report_load = report_load if report_load is not None else (lambda: (0, 0))
        self.vision_state = "stopped"
        self.shutdown_requested = threading.Event()

    def attach(self) -> None:
        self.agent_id = self.router.register_agent(AgentNames.CONTROL, self.handle_event)
        self.router.subscribe(self.agent_id, EventTypes.STATUS, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.SHUTDOWN, DeliveryMode.INLINE)

    def listen(self) -> None:
        """
            Start the adapter's inbound stream into handle_inbound
        """
        self.adapter.start(self.handle_inbound)

    def handle_event(self, event : Event) -> None:
        if event.event_type == EventTypes.STATUS and event.payload.get("agent") == AgentNames.VISION:
            self.vision_state = str(event.payload.get("state", self.vision_state))
        elif event.event_type == EventTypes.SHUTDOWN:
            logging.info("Control agent received shutdown")
            self.shutdown_requested.set()

    def handle_inbound(self, message : ChannelMessage) -> ChannelMessage:
        """
            Handle one operator message
            :return: the reply posted to the channel
        """
        command = parse_command(message.text)
        logging.info("Command from %s: %s", message.sender or "operator", command.kind.value)

        reply = self.execute(command)
        outbound = ChannelMessage(direction=Direction.OUTBOUND,
                                  text=reply,
                                  channel_id=self.adapter.channel_id,
                                  sender=AgentNames.CONTROL,
                                  timestamp=self.clock.now())
        try:
            self.adapter.post(outbound)
        except (ChannelUnavailableException, AuthFailureException) as e:
            self.router.metrics.increment("errors.channel_send")
            logging.error("Reply to %r not posted: %s", message.text, e)

        metrics = self.router.metrics
        metrics.increment("commands_processed")
        metrics.observe("reply_latency_ms", round(max(0.0, self.clock.now() - message.timestamp) * 1000.0, 3))
        return outbound

    def execute(self, command : Command) -> str:
        """
            Publish what the command asks for
            :return: the reply text
        """
        match command.kind:
            case CommandKind.START:
                if self.vision_state == "running":
                    return "vision agent already running"
                return self._publish({"action": "start"}, "vision agent started")
            case CommandKind.STOP:
                if self.vision_state != "running":
                    return "vision agent already stopped"
                return self._publish({"action": "stop"}, "vision agent stopped")
            case CommandKind.CONFIGURE:
                try:
                    params = validate_configure(command.params).applied()
                except ConfigValidationException as e:
                    return f"configure rejected, {e.field}: {e.reason}"
                applied = " ".join(f"{key}={value}" for key, value in params.items())
                return self._publish({"action": "configure", **params}, f"configuration applied: {applied}")
            case CommandKind.STATUS:
                return self.status_text()
            case CommandKind.QUIT:
                return self._publish({"reason": "operator quit"}, "shutting down", EventTypes.SHUTDOWN)
            case CommandKind.HELP:
                return HELP_TEXT
            case _:
                return f"unrecognised command {command.raw!r}\n{HELP_TEXT}"

    def _publish(self, payload : dict, reply : str, event_type : str = EventTypes.COMMAND) -> str:
        event = self.router.make_event(event_type, payload, source=self.agent_id)
        try:
            self.router.send_to_agent(AgentNames.ROUTER, event, source=self.agent_id)
        except QueueFullException as e:
            logging.error("Command not published: %s", e)
            return "system busy, command not accepted"
        return reply

    def status_text(self) -> str:
        metrics = self.router.metrics
        queued, in_flight = self.report_load()
        outcomes = " ".join(f"{kind.value}={metrics.count('report.' + kind.value)}" for kind in OutcomeKind)
        return (f"vision {self.vision_state}, achieved_fps={metrics.gauge('achieved_fps'):.3f}, "
                f"frames={metrics.count('frames_processed')}, "
                f"snapshots={metrics.count('events.snapshot.published')}, "
                f"pending_reports={queued}, in_flight={in_flight}, {outcomes}")
