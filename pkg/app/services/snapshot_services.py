"""
    Writes annotated snapshot images
"""
import logging
from pathlib import Path

import cv2
import numpy as np

from app.model.exceptions.vision_exceptions import SnapshotWriteException
from app.model.vision.detection import Detection
from app.model.vision.frame import Frame
from app.model.vision.track import TrackerState

DETECTION_COLOUR = (0, 200, 0)
TRACK_COLOUR = (0, 165, 255)


def snapshot_path(snapshot_dir : Path, frame_index : int, track_id : int) -> Path:
    return snapshot_dir / f"snap_{frame_index}_{track_id}.png"


def save_snapshot(frame : Frame,
                  detections : list[Detection],
                  tracks : TrackerState,
                  snapshot_dir : Path,
                  track_id : int) -> Path:
    """
        Draw detections (label and confidence) and matched track ids on the
        frame and write it as PNG. Frames without pixels are drawn on a blank
        canvas of the frame size.

        :return: the path of the written image
    """
    if frame.pixels is not None:
        canvas = np.ascontiguousarray(frame.pixels, dtype=np.uint8).copy()
    else:
        canvas = np.zeros((frame.height, frame.width, 3), dtype=np.uint8)

    for detection in detections:
        box = detection.box
        top_left = (int(box.x1), int(box.y1))
        cv2.rectangle(canvas, top_left, (int(box.x2), int(box.y2)), DETECTION_COLOUR, 2)
        cv2.putText(canvas, f"{detection.label} {detection.confidence:.2f}",
                    (int(box.x1), max(12, int(box.y1) - 4)),
                    cv2.FONT_HERSHEY_SIMPLEX, 0.4, DETECTION_COLOUR, 1)

    for track in tracks.tracks:
        if track.lost_count != 0:
            continue
        cv2.putText(canvas, f"#{track.id}", (int(track.box.x1) + 2, int(track.box.y2) - 4),
                    cv2.FONT_HERSHEY_SIMPLEX, 0.4, TRACK_COLOUR, 1)

    path = snapshot_path(snapshot_dir, frame.index, track_id)
    try:
        written = cv2.imwrite(str(path), canvas)
    except cv2.error as e:
        raise SnapshotWriteException(f"could not write {path}: {e}") from e

    if not written:
        raise SnapshotWriteException(f"could not write {path}")

    logging.info("Snapshot written: %s", path)
    return path
