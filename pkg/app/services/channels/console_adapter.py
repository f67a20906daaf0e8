"""
    Channel adapter on standard input and output
"""
import itertools
import logging
import sys
import threading
from typing import TextIO

from app.model.channel.channel_message import ChannelMessage
from app.model.exceptions.channel_exceptions import ChannelUnavailableException
from app.services.channels.channel_adapter import ChannelAdapter, InboundListener
from app.services.clock import Clock


def format_outbound(message : ChannelMessage) -> str:
    line = f"[BOT] {message.text}"
    if message.attachment is not None:
        line += f" (attachment: {message.attachment.as_posix()})"
    return line


class ConsoleAdapter(ChannelAdapter):
    """
        Reads one operator command per input line on a listener thread and
        prints outbound messages. Without an input stream only inject() delivers
        inbound messages
    """

    descriptor : str = "console"

    def __init__(self, clock : Clock,
                 input_stream : TextIO | None = None,
                 output_stream : TextIO | None = None,
                 channel_id : str = "console") -> None:
        super().__init__(clock, channel_id)
        self.input_stream = input_stream
        self.output_stream = output_stream if output_stream is not None else sys.stdout
        self._write_lock = threading.Lock()
        self._ids = itertools.count(1)
        self._reader : threading.Thread | None = None
        self._stopping = threading.Event()

    def start(self, listener : InboundListener) -> None:
        super().start(listener)
        if self.input_stream is None:
            return
        self._reader = threading.Thread(target=self._read_lines, name="console-listener", daemon=True)
        self._reader.start()

    def stop(self) -> None:
        self._stopping.set()
        super().stop()

    def _read_lines(self) -> None:
        for line in self.input_stream:
            if self._stopping.is_set():
                break
            text = line.strip()
            if text == "":
                continue
            try:
                self.deliver_inbound(text, sender="console")
            except Exception as e:
                logging.error("Console command %r failed: %s", text, e)
        logging.info("Console input closed")

    def post(self, message : ChannelMessage) -> str:
        with self._write_lock:
            try:
                print(format_outbound(message), file=self.output_stream, flush=True)
            except (OSError, ValueError) as e:
                raise ChannelUnavailableException(f"console output closed: {e}") from e
            return f"console-{next(self._ids)}"


def console_adapter(clock : Clock, input_stream : TextIO | None = None,
                    output_stream : TextIO | None = None) -> ConsoleAdapter:
    return ConsoleAdapter(clock, input_stream, output_stream)
