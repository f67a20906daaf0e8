"""
    Slack adapter: Socket Mode for inbound messages, Web API for outbound posts
"""
import itertools
import json
import logging
import os
import queue
import threading
from collections.abc import Callable
from pathlib import Path
from typing import Any

import requests
from requests import RequestException
from websockets.exceptions import WebSocketException
from websockets.sync.client import connect

from app.model.channel.channel_message import ChannelMessage
from app.model.exceptions.channel_exceptions import (AdapterInitException, AttachmentMissingException,
                                                     AuthFailureException, ChannelUnavailableException)
from app.model.runtime_constants import EnvironmentVariables, RuntimeConstants as rc
from app.services.channels.channel_adapter import ChannelAdapter, InboundListener
from app.services.clock import Clock

SLACK_API_URL = "https://slack.com/api/"

AUTH_ERRORS = {"invalid_auth", "not_authed", "token_revoked", "token_expired", "account_inactive"}

OUTBOUND_QUEUE_SIZE = 64


def build_ack(envelope_id : str) -> str:
    """
        Socket Mode acknowledgement of one envelope
    """
    return json.dumps({"envelope_id": envelope_id})


def next_backoff(current : float) -> float:
    return min(current * 2.0, rc.RECONNECT_MAX_S)


class SlackAdapter(ChannelAdapter):
    """
        Inbound: apps.connections.open gives a WebSocket URL, every envelope is
        acknowledged by echoing its envelope_id and message events of the
        configured channel reach the listener. A lost connection is reopened
        with exponential backoff from 1 s up to 60 s.

        Outbound: post() queues the message and a sender thread calls
        chat.postMessage, or the external upload flow for attachments.
    """

    descriptor : str = "slack"

    def __init__(self, clock : Clock,
                 bot_token : str,
                 app_token : str,
                 channel_id : str,
                 session : requests.Session | None = None,
                 ws_connect : Callable[[str], Any] = connect,
                 api_url : str = SLACK_API_URL) -> None:
        super().__init__(clock, channel_id)
        self.bot_token = bot_token
        self.app_token = app_token
        self.api_url = api_url
        self.bot_user_id : str | None = None
        self.send_failures = 0
        self._session = session if session is not None else requests.Session()
        self._ws_connect = ws_connect
        self._ws = None
        self._stopping = threading.Event()
        self._outbound : queue.Queue = queue.Queue(maxsize=OUTBOUND_QUEUE_SIZE)
        self._ids = itertools.count(1)
        self._threads : list[threading.Thread] = []

    def call(self, method : str, token : str, **fields) -> dict:
        """
            Call a Web API method with form fields
            :return: the decoded answer, which has ok = true
        """
        try:
            resp = self._session.post(self.api_url + method,
                                      data=fields,
                                      headers={"Authorization": f"Bearer {token}"},
                                      timeout=10)
        except RequestException as e:
            raise ChannelUnavailableException(f"{method}: {e}") from e

        if resp.status_code == 429 or resp.status_code >= 500:
            raise ChannelUnavailableException(f"{method} answered {resp.status_code}")

        try:
            body = resp.json()
        except ValueError as e:
            raise ChannelUnavailableException(f"{method} answered with invalid JSON") from e

        if not body.get("ok", False):
            error = body.get("error", "unknown_error")
            if error in AUTH_ERRORS:
                raise AuthFailureException(f"{method}: {error}")
            raise ChannelUnavailableException(f"{method}: {error}")
        return body

    def start(self, listener : InboundListener) -> None:
        """
            Verify the bot token, then start the socket and sender threads
        """
        identity = self.call("auth.test", self.bot_token)
        self.bot_user_id = identity.get("user_id")
        logging.info("Slack bot authenticated as %s", self.bot_user_id)

        super().start(listener)
        for name, target in (("slack-socket", self._socket_loop), ("slack-sender", self._send_loop)):
            thread = threading.Thread(target=target, name=name, daemon=True)
            thread.start()
            self._threads.append(thread)

    def stop(self) -> None:
        self._stopping.set()
        if self._ws is not None:
            try:
                self._ws.close()
            except WebSocketException as e:
                logging.warning("Closing the Slack socket failed: %s", e)
        for thread in self._threads:
            thread.join(timeout=5)
        super().stop()

    def open_connection(self) -> str:
        return self.call("apps.connections.open", self.app_token)["url"]

    def _socket_loop(self) -> None:
        backoff = rc.RECONNECT_MIN_S
        while not self._stopping.is_set():
            try:
                with self._ws_connect(self.open_connection()) as ws:
                    self._ws = ws
                    backoff = rc.RECONNECT_MIN_S
                    for raw in ws:
                        if not self.handle_frame(ws, raw):
                            break
            except AuthFailureException as e:
                logging.error("Slack rejected the app token, listener stopped: %s", e)
                return
            except (ChannelUnavailableException, WebSocketException, OSError) as e:
                logging.warning("Slack socket lost: %s", e)
            finally:
                self._ws = None

            if self._stopping.wait(backoff):
                return
            logging.info("Reconnecting to Slack after %.0fs", backoff)
            backoff = next_backoff(backoff)

    def handle_frame(self, ws, raw : str | bytes) -> bool:
        """
            Acknowledge an envelope and surface its message event
            :return: False when Slack asks the client to reconnect
        """
        try:
            frame = json.loads(raw)
        except ValueError:
            logging.warning("Ignoring malformed Socket Mode frame")
            return True

        frame_type = frame.get("type")
        if frame_type == "hello":
            logging.info("Slack socket connected")
            return True
        if frame_type == "disconnect":
            logging.info("Slack requested a reconnect: %s", frame.get("reason"))
            return False

        envelope_id = frame.get("envelope_id")
        if envelope_id is not None:
            ws.send(build_ack(envelope_id))

        if frame_type == "events_api":
            event = frame.get("payload", {}).get("event", {})
            if self.is_operator_message(event):
                try:
                    self.deliver_inbound(event["text"], sender=event.get("user", ""))
                except Exception as e:
                    logging.error("Slack command %r failed: %s", event["text"], e)
        return True

    def is_operator_message(self, event : dict) -> bool:
        return (event.get("type") == "message"
                and "subtype" not in event
                and "bot_id" not in event
                and event.get("channel") == self.channel_id
                and event.get("user") != self.bot_user_id
                and isinstance(event.get("text"), str))

    def post(self, message : ChannelMessage) -> str:
        if self._stopping.is_set():
            raise ChannelUnavailableException("slack adapter is stopped")
        message_id = f"slack-{next(self._ids)}"
        try:
            self._outbound.put_nowait((message_id, message))
        except queue.Full as e:
            raise ChannelUnavailableException("slack outbound queue is full") from e
        return message_id

    def _send_loop(self) -> None:
        while not (self._stopping.is_set() and self._outbound.empty()):
            try:
                message_id, message = self._outbound.get(timeout=0.2)
            except queue.Empty:
                continue
            self._send_with_retry(message_id, message)

    def _send_with_retry(self, message_id : str, message : ChannelMessage) -> None:
        for attempt in (1, 2):
            try:
                self.send_now(message)
                return
            except AttachmentMissingException as e:
                logging.warning("%s: %s, posting text only", message_id, e)
                message = message.model_copy(update={"attachment": None,
                                                     "text": f"{message.text} [snapshot unavailable]"})
            except (ChannelUnavailableException, AuthFailureException) as e:
                logging.warning("%s attempt %d failed: %s", message_id, attempt, e)
        self.send_failures += 1
        logging.error("%s could not be delivered to Slack", message_id)

    def send_now(self, message : ChannelMessage) -> str:
        """
            Deliver one message synchronously
            :return: the Slack timestamp of the text message, or the file id
        """
        if message.attachment is None:
            return self.call("chat.postMessage", self.bot_token, channel=self.channel_id, text=message.text)["ts"]
        return self.upload_file(message.attachment, message.text)

    def upload_file(self, path : Path, comment : str) -> str:
        """
            Upload URL, raw upload, then complete the upload into the channel
            with the text as the message referencing the file
        """
        try:
            content = Path(path).read_bytes()
        except OSError as e:
            raise AttachmentMissingException(f"cannot read {path}: {e}") from e

        ticket = self.call("files.getUploadURLExternal", self.bot_token,
                           filename=Path(path).name, length=len(content))

        try:
            resp = self._session.post(ticket["upload_url"], data=content, timeout=30)
        except RequestException as e:
            raise ChannelUnavailableException(f"file upload: {e}") from e
        if resp.status_code != 200:
            raise ChannelUnavailableException(f"file upload answered {resp.status_code}")

        self.call("files.completeUploadExternal", self.bot_token,
                  files=json.dumps([{"id": ticket["file_id"], "title": Path(path).name}]),
                  channel_id=self.channel_id,
                  initial_comment=comment)
        return ticket["file_id"]


def slack_adapter(clock : Clock, channel_id : str, **transport) -> SlackAdapter:
    """
        Build a Slack adapter from the tokens in the environment
    """
    bot_token = os.environ.get(EnvironmentVariables.BOT_TOKEN, "").strip()
    app_token = os.environ.get(EnvironmentVariables.APP_TOKEN, "").strip()
    if bot_token == "" or app_token == "":
        raise AdapterInitException(f"{EnvironmentVariables.BOT_TOKEN} and {EnvironmentVariables.APP_TOKEN} "
                                   "must be set for the slack channel")
    return SlackAdapter(clock, bot_token, app_token, channel_id, **transport)
