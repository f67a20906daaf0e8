"""
    Passive IoU tracker and dwell-time triggers
"""
from app.model.runtime_constants import RuntimeConstants as rc
from app.model.vision.bbox import BBox
from app.model.vision.detection import Detection
from app.model.vision.track import Track, TrackerState
from app.model.vision.tracker_config import TrackerConfig


def iou(a : BBox, b : BBox) -> float:
    """
        Intersection over union of two boxes, 0 when the union is empty
    """
    inter_w = min(a.x2, b.x2) - max(a.x1, b.x1)
    inter_h = min(a.y2, b.y2) - max(a.y1, b.y1)
    intersection = inter_w * inter_h if inter_w > 0 and inter_h > 0 else 0.0

    union = a.area() + b.area() - intersection
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, intersection / union))


def passive_tracker_update(state : TrackerState,
                           detections : list[Detection],
                           cfg : TrackerConfig,
                           now : float) -> list[tuple[int, Detection]]:
    """
        Greedy IoU association of one frame's detections with the tracks.

        Tracks are visited in creation order; each takes the unused detection
        with the highest IoU (lowest index on ties) if that IoU exceeds theta.
        Unmatched tracks age by one and are evicted at l_max, unused detections
        start new tracks. Labels play no part in matching.

        :return: (track id, detection) for every matched track, new tracks excluded
    """
    used : set[int] = set()
    matches : list[tuple[int, Detection]] = []
    retained : list[Track] = []

    for track in state.tracks:
        best_index = -1
        best_iou = 0.0
        for index, detection in enumerate(detections):
            if index in used:
                continue
            score = iou(track.box, detection.box)
            if best_index < 0 or score > best_iou:
                best_index, best_iou = index, score

        if best_index >= 0 and best_iou > cfg.theta:
            detection = detections[best_index]
            used.add(best_index)
            matches.append((track.id, detection))
            retained.append(track.model_copy(update={"box": detection.box, "lost_count": 0, "last_matched": now}))
            continue

        lost_count = track.lost_count + 1
        if lost_count < cfg.l_max:
            retained.append(track.model_copy(update={"lost_count": lost_count}))

    next_id = state.next_id
    for index, detection in enumerate(detections):
        if index in used:
            continue
        retained.append(Track(id=next_id, box=detection.box, label=detection.label,
                              first_seen=now, last_matched=now))
        next_id += 1

    state.tracks = retained
    state.next_id = next_id
    return matches


def evaluate_triggers(state : TrackerState, cfg : TrackerConfig, now : float) -> list[int]:
    """
        Tracks of a target label that are currently matched, have been present
        for dwell_seconds and are out of their cooldown. Marks them reported.
    """
    triggered = []
    for track in state.tracks:
        if track.label not in cfg.target_labels or track.lost_count != 0:
            continue
        if now - track.first_seen < cfg.dwell_seconds - rc.TIME_EPSILON:
            continue
        if track.last_reported is not None and now - track.last_reported < cfg.cooldown_seconds - rc.TIME_EPSILON:
            continue
        track.last_reported = now
        triggered.append(track.id)
    return triggered
