"""
    Synthetic detector backend driven by scripted trajectories
"""
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.model.exceptions.config_exceptions import ConfigParseException
from app.model.exceptions.vision_exceptions import InvalidScriptException, ParseErrorException
from app.model.vision.bbox import BBox
from app.model.vision.detection import Detection
from app.model.vision.frame import Frame
from app.model.vision.trajectory import SyntheticScript, Trajectory
from app.services.config_loader import FlatEntry, parse_flat
from app.services.detectors.detector_backend import DetectorBackend, clip_detections

TRAJECTORY_FIELDS = ("label", "start", "end", "box", "velocity", "confidence")


class SyntheticBackend(DetectorBackend):
    """
        Objects move linearly by their per-frame velocity and are clipped to
        the frame. With a dropout probability each object is independently
        missed; the draw for frame k only depends on the run seed, the
        script seed and k, so repeated runs see the same sequence. A run seed
        of 0 leaves the script seed alone
    """

    descriptor : str = "synthetic"
    script : SyntheticScript
    run_seed : int

    def __init__(self, script : SyntheticScript, run_seed : int = 0) -> None:
        for trajectory in script.trajectories:
            validate_trajectory(trajectory)
        self.script = script
        self.run_seed = run_seed

    def detect(self, frame : Frame) -> list[Detection]:
        active = [t for t in self.script.trajectories if t.start_frame <= frame.index <= t.end_frame]
        if not active:
            return []

        keep = [True] * len(active)
        if self.script.dropout > 0:
            rng = np.random.default_rng(self.seed_key(frame.index))
            keep = list(rng.random(len(active)) >= self.script.dropout)

        detections = []
        for trajectory, kept in zip(active, keep):
            if not kept:
                continue
            steps = frame.index - trajectory.start_frame
            box = trajectory.box.shifted(trajectory.velocity[0] * steps, trajectory.velocity[1] * steps)
            detections.append(Detection(box=box, label=trajectory.label, confidence=trajectory.confidence))

        return clip_detections(detections, frame)

    def seed_key(self, index : int) -> list[int]:
        if self.run_seed == 0:
            return [self.script.seed, index]
        return [self.run_seed, self.script.seed, index]


def validate_trajectory(trajectory : Trajectory) -> None:
    if trajectory.end_frame < trajectory.start_frame:
        raise InvalidScriptException(f"{trajectory.name}: end frame {trajectory.end_frame} "
                                     f"before start frame {trajectory.start_frame}")
    if trajectory.box.area() <= 0:
        raise InvalidScriptException(f"{trajectory.name}: box has zero area")


def synthetic_backend(script : list[Trajectory] | SyntheticScript) -> SyntheticBackend:
    if isinstance(script, list):
        script = SyntheticScript(trajectories=script)
    return SyntheticBackend(script)


def parse_numbers(entry : FlatEntry, count : int) -> list[float]:
    parts = [part.strip() for part in entry.value.split(",")]
    try:
        numbers = [float(part) for part in parts]
    except ValueError as e:
        raise ParseErrorException(entry.line, f"expected {count} comma separated numbers") from e
    if len(numbers) != count:
        raise ParseErrorException(entry.line, f"expected {count} comma separated numbers")
    return numbers


def parse_script(text : str) -> SyntheticScript:
    """
        Parse a script of synthetic.* settings and trajectory.<name>.<field> entries
    """
    try:
        entries = parse_flat(text)
    except ConfigParseException as e:
        raise ParseErrorException(e.line, e.reason) from e

    settings : dict[str, str] = {}
    grouped : dict[str, dict[str, FlatEntry]] = {}

    for key, entry in entries.items():
        parts = key.split(".")
        if parts[0] == "synthetic" and len(parts) == 2 and parts[1] in ("seed", "dropout"):
            settings[parts[1]] = entry.value
        elif parts[0] == "trajectory" and len(parts) == 3 and parts[2] in TRAJECTORY_FIELDS:
            grouped.setdefault(parts[1], {})[parts[2]] = entry
        else:
            raise ParseErrorException(entry.line, f"unknown key {key!r}")

    trajectories = []
    for name, fields in grouped.items():
        missing = [field for field in ("label", "start", "end", "box") if field not in fields]
        if missing:
            raise InvalidScriptException(f"{name}: missing {', '.join(missing)}")

        try:
            x1, y1, x2, y2 = parse_numbers(fields["box"], 4)
            velocity = parse_numbers(fields["velocity"], 2) if "velocity" in fields else [0.0, 0.0]
            trajectory = Trajectory(name=name,
                                    label=fields["label"].value,
                                    start_frame=fields["start"].value,
                                    end_frame=fields["end"].value,
                                    box=BBox.of(x1, y1, x2, y2),
                                    velocity=(velocity[0], velocity[1]),
                                    confidence=fields["confidence"].value if "confidence" in fields else 0.9)
        except ValidationError as e:
            raise InvalidScriptException(f"{name}: {e.errors()[0]['msg']}") from e

        trajectories.append(trajectory)

    try:
        return SyntheticScript(trajectories=trajectories, **settings)
    except ValidationError as e:
        raise InvalidScriptException(e.errors()[0]["msg"]) from e


def synthetic_backend_from_file(path : Path, run_seed : int = 0) -> SyntheticBackend:
    backend = SyntheticBackend(parse_script(Path(path).read_text(encoding="utf-8")), run_seed)
    logging.info("Loaded %d synthetic trajectories from %s", len(backend.script.trajectories), path)
    return backend
