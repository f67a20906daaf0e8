import pytest

from app.model.exceptions.channel_exceptions import AdapterInitException
from app.model.exceptions.vision_exceptions import InvalidScriptException, ParseErrorException
from app.model.harness.run_config import BackendConfig
from app.model.vision.bbox import BBox
from app.model.vision.frame import Frame
from app.model.vision.trajectory import SyntheticScript, Trajectory
from app.services.detectors.detector_backend import create_backend
from app.services.detectors.replay_backend import (format_replay_line, parse_replay, record_replay,
                                                   replay_backend)
from app.services.detectors.synthetic_backend import (parse_script, synthetic_backend,
                                                      synthetic_backend_from_file)
from tests.conftest import GOLDEN_DIR, SCRIPT_DIR


def frame(index, width=640, height=480) -> Frame:
    return Frame(index=index, timestamp=index / 10, width=width, height=height)


def test_replay_golden_file_parses_to_canonical_lines():
    backend = replay_backend(GOLDEN_DIR / "replay_valid.txt")
    lines = [format_replay_line(index, backend.timestamps_ms[index], backend.frames[index])
             for index in sorted(backend.frames)]
    assert ("\n".join(lines) + "\n").encode() == (GOLDEN_DIR / "replay_valid.expected").read_bytes()


def test_replay_detect_returns_recorded_frame():
    backend = replay_backend(GOLDEN_DIR / "replay_valid.txt")
    assert [d.label for d in backend.detect(frame(0))] == ["person", "car"]
    assert len(backend.detect(frame(1))) == 1
    assert backend.detect(frame(2)) == []
    assert backend.detect(frame(99)) == []
    assert backend.descriptor == "replay:replay_valid.txt"


def test_replay_clips_to_the_frame():
    backend = replay_backend(GOLDEN_DIR / "replay_valid.txt")
    detection, = backend.detect(frame(4))
    assert detection.box == BBox.of(600, 400, 640, 480)


def test_replay_error_carries_the_line_number():
    with pytest.raises(ParseErrorException) as error:
        replay_backend(GOLDEN_DIR / "replay_bad.txt")
    assert error.value.line == 7
    assert (str(error.value) + "\n").encode() == (GOLDEN_DIR / "replay_bad.expected").read_bytes()


@pytest.mark.parametrize("text, line", [
    ("frame=0 ts=0\nframe=0 ts=5", 2),
    ("# c\nframe=x ts=0", 2),
    ("frame=0", 1),
    ("frame=0 ts=0 person:1.5:0:0:1:1", 1),
    ("frame=0 ts=0 person:0.5:5:0:1:1", 1),
    ("frame=0 ts=0\n\nframe=1 time=3", 3),
    ("frame=0 ts=0 [person:0.9:1:2:30:40", 1),
    ("frame=0 ts=0\nframe=1 ts=5 person:0.9:1:2:30:40]", 2),
    ("frame=0 ts=0 [person:0.9:1:2:30:40 [car:0.8:1:2:30:40]", 1),
])
def test_replay_parse_errors(text, line):
    with pytest.raises(ParseErrorException) as error:
        parse_replay(text)
    assert error.value.line == line


def test_record_replay_freezes_a_synthetic_run(tmp_path):
    source = synthetic_backend_from_file(SCRIPT_DIR / "street.conf")
    frames = [frame(index) for index in range(0, 100, 5)]
    path = tmp_path / "street.replay"

    assert record_replay(source, frames, path) == len(frames)
    replayed = replay_backend(path)
    for item in frames:
        assert replayed.detect(item) == source.detect(item)


def test_static_object_keeps_its_box():
    backend = synthetic_backend([Trajectory(name="a", label="person", start_frame=0, end_frame=100,
                                            box=BBox.of(10, 10, 50, 90))])
    boxes = {backend.detect(frame(index))[0].box for index in range(101)}
    assert boxes == {BBox.of(10, 10, 50, 90)}
    assert backend.detect(frame(101)) == []


def test_velocity_moves_the_box_linearly():
    backend = synthetic_backend([Trajectory(name="car", label="car", start_frame=2, end_frame=50,
                                            box=BBox.of(0, 100, 40, 140), velocity=(5, 0))])
    assert backend.detect(frame(1)) == []
    xs = [backend.detect(frame(index))[0].box.x1 for index in range(2, 7)]
    assert xs == [0, 5, 10, 15, 20]


def test_dropout_is_deterministic_per_seed():
    script = SyntheticScript(trajectories=[Trajectory(name=f"p{i}", label="person", start_frame=0, end_frame=200,
                                                      box=BBox.of(i * 20, 0, i * 20 + 10, 10))
                                           for i in range(5)],
                             dropout=0.5, seed=11)
    first = [synthetic_backend(script).detect(frame(index)) for index in range(200)]
    second = [synthetic_backend(script).detect(frame(index)) for index in range(200)]
    other = [synthetic_backend(script.model_copy(update={"seed": 12})).detect(frame(index)) for index in range(200)]

    assert first == second
    assert first != other
    assert 0 < sum(len(detections) for detections in first) < 5 * 200


def test_run_seed_changes_the_dropout_draws(tmp_path):
    script = tmp_path / "crowd.conf"
    script.write_text("synthetic.seed = 11\nsynthetic.dropout = 0.5\n" + "".join(
        f"trajectory.p{i}.label = person\ntrajectory.p{i}.start = 0\ntrajectory.p{i}.end = 200\n"
        f"trajectory.p{i}.box = {i * 20}, 0, {i * 20 + 10}, 10\n" for i in range(5)))
    config = BackendConfig(kind="synthetic", path=script)

    def run(seed):
        backend = create_backend(config, seed)
        return [backend.detect(frame(index)) for index in range(200)]

    assert run(0) == [synthetic_backend_from_file(script).detect(frame(index)) for index in range(200)]
    assert run(5) == run(5)
    assert run(5) != run(0)
    assert run(5) != run(6)


@pytest.mark.parametrize("trajectory", [
    Trajectory(name="backwards", label="person", start_frame=10, end_frame=5, box=BBox.of(0, 0, 1, 1)),
    Trajectory(name="flat", label="person", start_frame=0, end_frame=5, box=BBox.of(0, 0, 0, 10)),
])
def test_invalid_trajectories_are_rejected(trajectory):
    with pytest.raises(InvalidScriptException):
        synthetic_backend([trajectory])


def test_parse_script():
    script = parse_script("synthetic.seed = 3\nsynthetic.dropout = 0.25\n"
                          "trajectory.bike.label = bicycle\ntrajectory.bike.start = 1\n"
                          "trajectory.bike.end = 9\ntrajectory.bike.box = 0, 0, 10, 20\n"
                          "trajectory.bike.velocity = 1.5,-2\n")
    assert script.seed == 3 and script.dropout == 0.25
    bike, = script.trajectories
    assert bike.label == "bicycle" and bike.velocity == (1.5, -2.0)
    assert bike.box == BBox.of(0, 0, 10, 20)
    assert bike.confidence == 0.9


@pytest.mark.parametrize("text, error", [
    ("trajectory.a.label = person\ntrajectory.a.colour = red", ParseErrorException),
    ("trajectory.a.label = person\ntrajectory.a.start = 0\ntrajectory.a.end = 4\ntrajectory.a.box = 1,2,3",
     ParseErrorException),
    ("trajectory.a.label = person\ntrajectory.a.start = 0", InvalidScriptException),
    ("synthetic.dropout = 2", InvalidScriptException),
    ("no equals sign here", ParseErrorException),
])
def test_parse_script_errors(text, error):
    with pytest.raises(error):
        parse_script(text)


def test_backend_factory():
    assert create_backend(BackendConfig(kind="synthetic", path=SCRIPT_DIR / "dweller.conf")).descriptor == "synthetic"
    assert create_backend(BackendConfig(kind="replay", path=GOLDEN_DIR / "replay_valid.txt")).frames
    with pytest.raises(AdapterInitException):
        create_backend(BackendConfig(kind="external", descriptor="yolov8n.onnx"))
