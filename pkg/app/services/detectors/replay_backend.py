"""
    Replays detections recorded in a line-delimited file
"""
import logging
from pathlib import Path

from pydantic import ValidationError

from app.model.exceptions.vision_exceptions import ParseErrorException
from app.model.vision.bbox import BBox
from app.model.vision.detection import Detection
from app.model.vision.frame import Frame
from app.services.detectors.detector_backend import DetectorBackend, clip_detections


class ReplayBackend(DetectorBackend):
    """
        detect() returns the recorded detections of frame.index, or nothing
        for frames that were not recorded
    """

    descriptor : str
    frames : dict[int, list[Detection]]
    timestamps_ms : dict[int, int]

    def __init__(self, frames : dict[int, list[Detection]], timestamps_ms : dict[int, int],
                 descriptor : str = "replay") -> None:
        self.frames = frames
        self.timestamps_ms = timestamps_ms
        self.descriptor = descriptor

    def detect(self, frame : Frame) -> list[Detection]:
        return clip_detections(self.frames.get(frame.index, []), frame)


def parse_detection(token : str, line : int) -> Detection:
    parts = token.split(":")
    if len(parts) != 6:
        raise ParseErrorException(line, f"expected label:conf:x1:y1:x2:y2, got {token!r}")

    label = parts[0]
    if label == "" or "[" in label or "]" in label:
        raise ParseErrorException(line, f"invalid label in {token!r}")
    try:
        confidence, x1, y1, x2, y2 = (float(part) for part in parts[1:])
    except ValueError as e:
        raise ParseErrorException(line, f"non-numeric field in {token!r}") from e

    try:
        return Detection(box=BBox.of(x1, y1, x2, y2), label=label, confidence=confidence)
    except ValidationError as e:
        raise ParseErrorException(line, f"invalid detection {token!r}: {e.errors()[0]['msg']}") from e


def parse_field(token : str, name : str, line : int) -> int:
    prefix = f"{name}="
    if not token.startswith(prefix):
        raise ParseErrorException(line, f"expected {prefix}<n>, got {token!r}")
    try:
        return int(token[len(prefix):])
    except ValueError as e:
        raise ParseErrorException(line, f"{name} must be an integer, got {token!r}") from e


def parse_replay(text : str) -> ReplayBackend:
    """
        Parse 'frame=<n> ts=<ms> label:conf:x1:y1:x2:y2 ...' lines. The detection
        list may be wrapped in [ ]; # starts a comment line
    """
    frames : dict[int, list[Detection]] = {}
    timestamps : dict[int, int] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line == "" or line.startswith("#"):
            continue

        tokens = line.split()
        if len(tokens) < 2:
            raise ParseErrorException(number, "expected frame=<n> ts=<ms>")

        index = parse_field(tokens[0], "frame", number)
        timestamp = parse_field(tokens[1], "ts", number)
        if index < 0:
            raise ParseErrorException(number, "frame index must be non-negative")
        if index in frames:
            raise ParseErrorException(number, f"frame {index} recorded twice")

        rest = " ".join(tokens[2:]).strip()
        opened, closed = rest.startswith("["), rest.endswith("]")
        if opened != closed:
            raise ParseErrorException(number, "unbalanced brackets around the detection list")
        if opened:
            rest = rest[1:-1]

        frames[index] = [parse_detection(token, number) for token in rest.split()]
        timestamps[index] = timestamp

    return ReplayBackend(frames, timestamps)


def replay_backend(path : Path) -> ReplayBackend:
    """
        Load a replay file
    """
    backend = parse_replay(Path(path).read_text(encoding="utf-8"))
    backend.descriptor = f"replay:{Path(path).name}"
    logging.info("Loaded %d recorded frames from %s", len(backend.frames), path)
    return backend


def format_replay_line(index : int, timestamp_ms : int, detections : list[Detection]) -> str:
    tokens = [f"frame={index}", f"ts={timestamp_ms}"]
    for detection in detections:
        box = detection.box
        tokens.append(f"{detection.label}:{detection.confidence!r}:{box.x1!r}:{box.y1!r}:{box.x2!r}:{box.y2!r}")
    return " ".join(tokens)


def record_replay(backend : DetectorBackend, frames : list[Frame], path : Path) -> int:
    """
        Run a backend over frames and write what it detects as a replay file
        :return: the number of frames written
    """
    lines = [f"# recorded from {backend.descriptor}"]
    for frame in frames:
        lines.append(format_replay_line(frame.index, int(round(frame.timestamp * 1000)), backend.detect(frame)))

    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(frames)
