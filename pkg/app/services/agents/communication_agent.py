"""
    Communication agent: posts reports to the chat channel
"""
import logging
import os
from pathlib import Path

from app.model.channel.channel_message import ChannelMessage, Direction
from app.model.exceptions.channel_exceptions import (AttachmentMissingException, AuthFailureException,
                                                     ChannelUnavailableException)
from app.model.router.event import AgentId, DeliveryMode, Event, iso_time
from app.model.runtime_constants import AgentNames, EventTypes
from app.services.agents.reporting_agent import summarize_detections
from app.services.channels.channel_adapter import ChannelAdapter
from app.services.message_router import MessageRouter

SNAPSHOT_UNAVAILABLE = "[snapshot unavailable]"


def is_readable(path : Path) -> bool:
    return path.is_file() and os.access(path, os.R_OK)


class CommunicationAgent:
    """
        Every report event ends as exactly one of: posted with its image, posted
        as text with a notice, or a send failure after one retry
    """

    agent_id : AgentId

    def __init__(self, router : MessageRouter, adapter : ChannelAdapter, direct_post : bool = False) -> None:
        self.router = router
        self.adapter = adapter
        self.direct_post = direct_post

    def attach(self) -> None:
        self.agent_id = self.router.register_agent(AgentNames.COMMUNICATION, self.handle_event)
        self.router.subscribe(self.agent_id, EventTypes.REPORT, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.COMMAND, DeliveryMode.INLINE)
        self.router.subscribe(self.agent_id, EventTypes.SHUTDOWN, DeliveryMode.INLINE)
        if self.direct_post:
            self.router.subscribe(self.agent_id, EventTypes.SNAPSHOT, DeliveryMode.INLINE)

    def handle_event(self, event : Event) -> None:
        match event.event_type:
            case EventTypes.REPORT:
                self.handle_report_event(event)
            case EventTypes.SNAPSHOT:
                self.handle_snapshot_event(event)
            case EventTypes.COMMAND:
                logging.debug("Communication agent saw command %s", event.payload.get("action"))
            case EventTypes.SHUTDOWN:
                logging.info("Communication agent shutting down")

    def handle_report_event(self, event : Event) -> str | None:
        """
            Post the caption with the snapshot attached
            :return: the id of the posted message, None on a send failure
        """
        path = Path(event.payload["path"])
        caption = str(event.payload["caption"])
        metrics = self.router.metrics

        outcome = "posted"
        message = self._outbound(caption, path)
        if not is_readable(path):
            logging.warning("Snapshot %s is unreadable, posting the caption only", path)
            outcome = "fallback"
            message = self._outbound(f"{caption} {SNAPSHOT_UNAVAILABLE}", None)

        try:
            message_id = self._post_with_retry(message)
        except AttachmentMissingException as e:
            logging.warning("Attachment rejected (%s), posting the caption only", e)
            outcome = "fallback"
            message_id = self._post_with_retry(self._outbound(f"{caption} {SNAPSHOT_UNAVAILABLE}", None))

        if message_id is None:
            metrics.increment("channel.send_failed")
            metrics.increment("errors.channel_send")
            return None

        metrics.increment(f"channel.{outcome}")
        logging.info("Report of snapshot %s posted as %s (%s)", path.name, message_id, outcome)
        return message_id

    def handle_snapshot_event(self, event : Event) -> str | None:
        """
            Post a detection summary with the image, used when reporting is off
            and direct posting is enabled
        """
        path = Path(event.payload["path"])
        text = (f"Detected {summarize_detections(event.payload.get('detections', []))} "
                f"at {iso_time(float(event.payload.get('timestamp', event.timestamp)))}")
        message = self._outbound(text, path if is_readable(path) else None)

        try:
            message_id = self._post_with_retry(message)
        except AttachmentMissingException:
            message_id = self._post_with_retry(self._outbound(f"{text} {SNAPSHOT_UNAVAILABLE}", None))

        if message_id is None:
            self.router.metrics.increment("errors.channel_send")
            return None
        self.router.metrics.increment("channel.direct_posted")
        return message_id

    def _outbound(self, text : str, attachment : Path | None) -> ChannelMessage:
        return ChannelMessage(direction=Direction.OUTBOUND,
                              text=text,
                              attachment=attachment,
                              channel_id=self.adapter.channel_id,
                              sender=AgentNames.COMMUNICATION,
                              timestamp=self.adapter.clock.now())

    def _post_with_retry(self, message : ChannelMessage) -> str | None:
        for attempt in (1, 2):
            try:
                return self.adapter.post(message)
            except (ChannelUnavailableException, AuthFailureException) as e:
                logging.warning("Post attempt %d to %s failed: %s", attempt, self.adapter.descriptor, e)
        return None
