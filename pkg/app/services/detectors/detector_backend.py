"""
    Detector backend interface and factory
"""
import abc

from app.model.exceptions.channel_exceptions import AdapterInitException
from app.model.harness.run_config import BackendConfig
from app.model.vision.detection import Detection
from app.model.vision.frame import Frame


class DetectorBackend(abc.ABC):
    """
        Turns frames into detections. Returned boxes lie within the frame
    """

    descriptor : str

    def __call__(self, frame : Frame) -> list[Detection]:
        return self.detect(frame)

    @abc.abstractmethod
    def detect(self, frame : Frame) -> list[Detection]:
        """
            Detect objects in one frame
        """


def clip_detections(detections : list[Detection], frame : Frame) -> list[Detection]:
    """
        Clip boxes to the frame and discard the ones with nothing left inside it
    """
    clipped = []
    for detection in detections:
        box = detection.box.clip(frame.width, frame.height)
        if box.area() <= 0:
            continue
        clipped.append(detection.model_copy(update={"box": box}))
    return clipped


def create_backend(config : BackendConfig, seed : int = 0) -> DetectorBackend:
    """
        Factory method returning the backend named by the configuration

        :param seed: run seed, mixed into the synthetic dropout draws
    """
    # the implementations import this module
    from app.services.detectors.replay_backend import replay_backend
    from app.services.detectors.synthetic_backend import synthetic_backend_from_file

    match config.kind:
        case "replay":
            return replay_backend(config.path)
        case "synthetic":
            return synthetic_backend_from_file(config.path, seed)
        case _:
            raise AdapterInitException(
                f"detector backend {config.descriptor or config.kind!r} is not bundled, "
                "only replay and synthetic backends are available")
