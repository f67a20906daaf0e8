import json
import threading

import pytest
import requests

from app.model.channel.channel_message import ChannelMessage, Direction
from app.model.exceptions.channel_exceptions import (AdapterInitException, AttachmentMissingException,
                                                     AuthFailureException, ChannelUnavailableException)
from app.services.channels.slack_adapter import SLACK_API_URL, SlackAdapter, build_ack, next_backoff, slack_adapter
from tests.conftest import GOLDEN_DIR

ENVELOPE_ID = "57d6a792-4d35-4d0b-b6aa-3361493e1caf"
CHANNEL = "C0123456789"


class FakeResponse:
    def __init__(self, body=None, status_code=200):
        self._body = body
        self.status_code = status_code

    def json(self):
        if self._body is None:
            raise ValueError("not json")
        return self._body


class FakeSession:
    """
        Answers Web API calls by method name, upload URLs by status code
    """

    def __init__(self, answers=None):
        self.answers = {
            "auth.test": {"ok": True, "user_id": "UBOT"},
            "apps.connections.open": {"ok": True, "url": "wss://socket.example/link"},
            "chat.postMessage": {"ok": True, "ts": "1700000000.000100"},
            "files.getUploadURLExternal": {"ok": True, "upload_url": "https://files.example/upload/F1",
                                           "file_id": "F1"},
            "files.completeUploadExternal": {"ok": True, "files": [{"id": "F1"}]},
        }
        self.answers.update(answers or {})
        self.calls = []

    def post(self, url, data=None, headers=None, timeout=None):
        self.calls.append((url, data, headers))
        if url.startswith(SLACK_API_URL):
            answer = self.answers[url[len(SLACK_API_URL):]]
        else:
            answer = self.answers.get("upload", FakeResponse({}, 200))
        if isinstance(answer, Exception):
            raise answer
        return answer if isinstance(answer, FakeResponse) else FakeResponse(answer)

    def methods(self):
        return [url[len(SLACK_API_URL):] if url.startswith(SLACK_API_URL) else "upload" for url, _, _ in self.calls]


class FakeSocket:
    def __init__(self, frames):
        self.frames = frames
        self.sent = []
        self.closed = False

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.closed = True

    def __iter__(self):
        return iter(self.frames)

    def send(self, text):
        self.sent.append(text)

    def close(self):
        self.closed = True


def envelope(text, user="U42", channel=CHANNEL, **event):
    return json.dumps({"type": "events_api", "envelope_id": ENVELOPE_ID,
                       "payload": {"event": {"type": "message", "text": text, "user": user,
                                             "channel": channel, **event}}})


def make_adapter(clock, session=None, frames=()) -> SlackAdapter:
    socket = FakeSocket(list(frames))
    adapter = SlackAdapter(clock, "xoxb-test", "xapp-test", CHANNEL, session=session or FakeSession(),
                           ws_connect=lambda url: socket)
    adapter.socket = socket
    return adapter


def outbound(text="ALERT: person", attachment=None) -> ChannelMessage:
    return ChannelMessage(direction=Direction.OUTBOUND, text=text, attachment=attachment)


def test_ack_matches_golden():
    assert build_ack(ENVELOPE_ID) == (GOLDEN_DIR / "socket_mode_ack.json").read_text()


def test_message_envelope_is_acked_and_delivered(clock):
    received = []
    adapter = make_adapter(clock)
    adapter.bot_user_id = "UBOT"
    adapter._listener = received.append
    socket = FakeSocket([])

    assert adapter.handle_frame(socket, envelope("<@UBOT> status"))
    assert socket.sent == [build_ack(ENVELOPE_ID)]
    assert [(message.text, message.sender, message.direction) for message in received] == \
        [("<@UBOT> status", "U42", Direction.INBOUND)]


def test_failing_listener_keeps_the_socket_alive(clock):
    def explode(message):
        raise RuntimeError("router closed")

    adapter = make_adapter(clock)
    adapter.bot_user_id = "UBOT"
    adapter._listener = explode
    socket = FakeSocket([])

    assert adapter.handle_frame(socket, envelope("status"))
    assert adapter.handle_frame(socket, envelope("quit"))
    assert socket.sent == [build_ack(ENVELOPE_ID)] * 2


@pytest.mark.parametrize("frame", [
    envelope("ALERT: person", user="UBOT"),
    envelope("status", bot_id="B1"),
    envelope("status", subtype="message_changed"),
    envelope("status", channel="C999"),
])
def test_foreign_and_bot_messages_are_acked_but_ignored(clock, frame):
    received = []
    adapter = make_adapter(clock)
    adapter.bot_user_id = "UBOT"
    adapter._listener = received.append
    socket = FakeSocket([])

    assert adapter.handle_frame(socket, frame)
    assert socket.sent == [build_ack(ENVELOPE_ID)]
    assert received == []


def test_control_frames(clock):
    adapter = make_adapter(clock)
    socket = FakeSocket([])
    assert adapter.handle_frame(socket, json.dumps({"type": "hello", "num_connections": 1}))
    assert not adapter.handle_frame(socket, json.dumps({"type": "disconnect", "reason": "refresh_requested"}))
    assert adapter.handle_frame(socket, "{not json")
    assert socket.sent == []


def test_backoff_doubles_up_to_a_minute():
    delays = [1.0]
    for _ in range(8):
        delays.append(next_backoff(delays[-1]))
    assert delays == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 60.0, 60.0, 60.0]


def test_call_sends_the_bearer_token(clock):
    session = FakeSession()
    make_adapter(clock, session).call("auth.test", "xoxb-test")
    url, _, headers = session.calls[0]
    assert url == "https://slack.com/api/auth.test"
    assert headers == {"Authorization": "Bearer xoxb-test"}


@pytest.mark.parametrize("answer, expected", [
    ({"ok": False, "error": "invalid_auth"}, AuthFailureException),
    ({"ok": False, "error": "token_revoked"}, AuthFailureException),
    ({"ok": False, "error": "channel_not_found"}, ChannelUnavailableException),
    (FakeResponse({"ok": False}, 429), ChannelUnavailableException),
    (FakeResponse({}, 503), ChannelUnavailableException),
    (FakeResponse(None, 200), ChannelUnavailableException),
    (requests.ConnectionError("down"), ChannelUnavailableException),
])
def test_call_errors(clock, answer, expected):
    adapter = make_adapter(clock, FakeSession({"chat.postMessage": answer}))
    with pytest.raises(expected):
        adapter.call("chat.postMessage", "xoxb-test", channel=CHANNEL, text="x")


def test_start_fails_on_a_rejected_bot_token(clock):
    adapter = make_adapter(clock, FakeSession({"auth.test": {"ok": False, "error": "invalid_auth"}}))
    with pytest.raises(AuthFailureException):
        adapter.start(lambda message: None)
    assert adapter._threads == []


def test_text_message_is_posted(clock):
    session = FakeSession()
    assert make_adapter(clock, session).send_now(outbound("vision agent started")) == "1700000000.000100"
    _, data, _ = session.calls[0]
    assert data == {"channel": CHANNEL, "text": "vision agent started"}


def test_attachment_is_uploaded_then_completed(clock, snapshot_dir):
    path = snapshot_dir / "snap_1_5.png"
    path.write_bytes(b"\x89PNG-data")
    session = FakeSession()

    assert make_adapter(clock, session).send_now(outbound(attachment=path)) == "F1"
    assert session.methods() == ["files.getUploadURLExternal", "upload", "files.completeUploadExternal"]

    ticket, upload, complete = (data for _, data, _ in session.calls)
    assert ticket == {"filename": "snap_1_5.png", "length": 9}
    assert upload == b"\x89PNG-data"
    assert json.loads(complete["files"]) == [{"id": "F1", "title": "snap_1_5.png"}]
    assert complete["channel_id"] == CHANNEL
    assert complete["initial_comment"] == "ALERT: person"


def test_missing_attachment(clock, snapshot_dir):
    with pytest.raises(AttachmentMissingException):
        make_adapter(clock).send_now(outbound(attachment=snapshot_dir / "gone.png"))


def test_missing_attachment_is_sent_as_text(clock, snapshot_dir):
    session = FakeSession()
    adapter = make_adapter(clock, session)
    adapter._send_with_retry("slack-1", outbound(attachment=snapshot_dir / "gone.png"))

    assert session.methods() == ["chat.postMessage"]
    assert session.calls[0][1]["text"] == "ALERT: person [snapshot unavailable]"
    assert adapter.send_failures == 0


def test_failed_upload_is_retried_once_then_counted(clock, snapshot_dir):
    path = snapshot_dir / "snap_1_5.png"
    path.write_bytes(b"png")
    session = FakeSession({"upload": FakeResponse({}, 500)})
    adapter = make_adapter(clock, session)
    adapter._send_with_retry("slack-1", outbound(attachment=path))

    assert session.methods().count("upload") == 2
    assert "files.completeUploadExternal" not in session.methods()
    assert adapter.send_failures == 1


def test_started_adapter_listens_and_sends(clock):
    received = threading.Event()
    messages = []

    def listener(message):
        messages.append(message)
        received.set()

    session = FakeSession()
    adapter = make_adapter(clock, session, frames=[json.dumps({"type": "hello"}), envelope("status")])
    adapter.start(listener)
    assert received.wait(timeout=5)

    assert adapter.bot_user_id == "UBOT"
    assert adapter.post(outbound("vision stopped")) == "slack-1"
    adapter.stop()

    assert [message.text for message in messages] == ["status"]
    assert adapter.socket.sent == [build_ack(ENVELOPE_ID)]
    assert "chat.postMessage" in session.methods()
    with pytest.raises(ChannelUnavailableException):
        adapter.post(outbound())


def test_tokens_come_from_the_environment(clock, monkeypatch):
    monkeypatch.setenv("CHANNEL_BOT_TOKEN", "xoxb-env")
    monkeypatch.setenv("CHANNEL_APP_TOKEN", "xapp-env")
    adapter = slack_adapter(clock, CHANNEL, session=FakeSession())
    assert (adapter.bot_token, adapter.app_token, adapter.channel_id) == ("xoxb-env", "xapp-env", CHANNEL)


@pytest.mark.parametrize("missing", ["CHANNEL_BOT_TOKEN", "CHANNEL_APP_TOKEN"])
def test_missing_token_fails_initialisation(clock, monkeypatch, missing):
    monkeypatch.setenv("CHANNEL_BOT_TOKEN", "xoxb-env")
    monkeypatch.setenv("CHANNEL_APP_TOKEN", "xapp-env")
    monkeypatch.delenv(missing)
    with pytest.raises(AdapterInitException):
        slack_adapter(clock, CHANNEL)
