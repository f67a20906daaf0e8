"""
    Channel adapter interface shared by the mock, console and Slack adapters
"""
import abc
import logging
from collections.abc import Callable

from app.model.channel.channel_message import ChannelMessage, Direction
from app.services.clock import Clock

InboundListener = Callable[[ChannelMessage], None]


class ChannelAdapter(abc.ABC):
    """
        A chat channel. post() either returns a message id or raises a typed
        channel exception, inbound messages are handed to the listener given
        to start()
    """

    descriptor : str
    channel_id : str

    def __init__(self, clock : Clock, channel_id : str = "") -> None:
        self.clock = clock
        self.channel_id = channel_id
        self._listener : InboundListener | None = None

    def start(self, listener : InboundListener) -> None:
        self._listener = listener

    def stop(self) -> None:
        self._listener = None

    @abc.abstractmethod
    def post(self, message : ChannelMessage) -> str:
        """
            Send an outbound message
            :return: the id the channel assigned to it
        """

    def deliver_inbound(self, text : str, sender : str = "operator", timestamp : float | None = None) -> None:
        """
            Hand an operator message to the listener
        """
        message = ChannelMessage(direction=Direction.INBOUND,
                                 text=text,
                                 channel_id=self.channel_id,
                                 sender=sender,
                                 timestamp=self.clock.now() if timestamp is None else timestamp)
        if self._listener is None:
            logging.warning("Inbound message from %s ignored, %s adapter is not started", sender, self.descriptor)
            return
        self._listener(message)

    def inject(self, text : str, sender : str = "operator") -> None:
        """
            Deliver a scripted operator message as if it came from the channel
        """
        self.deliver_inbound(text, sender)
