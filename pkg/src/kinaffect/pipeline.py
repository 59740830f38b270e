"""Pose post-processing: confidence gating, identity tracking, gap filling,
smoothing, and dynamic body-scale calibration.

Everything here is causal: outputs at time t depend only on frames at <= t,
so live streams and replays behave identically.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .model import (
    LEFT_HIP,
    LEFT_SHOULDER,
    NUM_KEYPOINTS,
    RIGHT_HIP,
    RIGHT_SHOULDER,
    FrameEvent,
    PersonPose,
    PoseFrame,
)


def gate_confidence(frame: PoseFrame, threshold: float) -> PoseFrame:
    """Mark keypoints below the confidence threshold invalid; coordinates untouched."""
    persons = tuple(
        p.with_valid(p.valid & (p.confidence >= threshold)) for p in frame.persons
    )
    return PoseFrame(frame.timestamp, persons, frame.source)


@dataclass
class TrackFrame:
    """One track's contribution to a CleanFrame."""

    track_id: int
    xy: np.ndarray            # (17, 2) smoothed positions
    fresh: np.ndarray         # (17,) bool: observed this frame
    interpolated: np.ndarray  # (17,) bool: held from a previous frame
    stale: np.ndarray         # (17,) bool: gap exceeded G, excluded from features
    body_scale: float | None  # None until calibrated
    detected: bool            # a detection was assigned this frame

    @property
    def usable(self) -> np.ndarray:
        """Keypoints carrying a meaningful position (fresh or held, not stale)."""
        return (self.fresh | self.interpolated) & ~self.stale


@dataclass(frozen=True)
class CleanFrame:
    timestamp: float
    tracks: tuple[TrackFrame, ...]

    def track(self, track_id: int) -> TrackFrame | None:
        for t in self.tracks:
            if t.track_id == track_id:
                return t
        return None


@dataclass
class PersonTrack:
    track_id: int
    last_centroid: np.ndarray
    smoothed: np.ndarray = field(
        default_factory=lambda: np.full((NUM_KEYPOINTS, 2), np.nan)
    )
    miss_count: np.ndarray = field(
        default_factory=lambda: np.zeros(NUM_KEYPOINTS, dtype=int)
    )
    seen: np.ndarray = field(default_factory=lambda: np.zeros(NUM_KEYPOINTS, dtype=bool))
    staleness: int = 0
    torso_samples: deque = field(default_factory=deque)  # (timestamp, length)
    body_scale: float | None = None


def smooth_keypoints(
    previous: np.ndarray, seen: np.ndarray, observed_xy: np.ndarray,
    observed_valid: np.ndarray, alpha: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate exponential smoothing, initialized at first observation.

    Returns (smoothed, seen) updated for keypoints valid in this observation.
    """
    smoothed = previous.copy()
    seen = seen.copy()
    first = observed_valid & ~seen
    rest = observed_valid & seen
    smoothed[first] = observed_xy[first]
    smoothed[rest] = alpha * observed_xy[rest] + (1.0 - alpha) * smoothed[rest]
    seen |= observed_valid
    return smoothed, seen


def detection_centroid(person: PersonPose) -> np.ndarray | None:
    if not person.valid.any():
        return None
    return person.xy[person.valid].mean(axis=0)


def assign_tracks(
    detections: list[tuple[int, np.ndarray]],
    tracks: list[PersonTrack],
    gate_distance: float,
) -> list[tuple[int, PersonTrack]]:
    """Greedy nearest-centroid matching, gated by distance.

    ``detections`` is (index, centroid) pairs. Pairs are taken in ascending
    distance order, so two detections each within gate of their own track
    keep their identities even when their positions cross.
    """
    pairs = []
    for di, centroid in detections:
        for track in tracks:
            dist = float(np.linalg.norm(centroid - track.last_centroid))
            if dist <= gate_distance:
                pairs.append((dist, di, track.track_id))
    pairs.sort(key=lambda p: (p[0], p[1], p[2]))

    by_id = {t.track_id: t for t in tracks}
    assigned: list[tuple[int, PersonTrack]] = []
    used_detections: set[int] = set()
    used_tracks: set[int] = set()
    for _, di, tid in pairs:
        if di in used_detections or tid in used_tracks:
            continue
        used_detections.add(di)
        used_tracks.add(tid)
        assigned.append((di, by_id[tid]))
    return assigned


class PosePipeline:
    """Single-writer stream stage turning PoseFrames into CleanFrames."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.tracks: dict[int, PersonTrack] = {}
        self.events: list[FrameEvent] = []

    def drain_events(self) -> list[FrameEvent]:
        out = self.events
        self.events = []
        return out

    def _free_slot(self) -> int | None:
        for slot in range(self.config.max_persons):
            if slot not in self.tracks:
                return slot
        return None

    def _update_calibration(self, track: PersonTrack, person: PersonPose, t: float) -> None:
        cfg = self.config
        needed = (LEFT_SHOULDER, RIGHT_SHOULDER, LEFT_HIP, RIGHT_HIP)
        if not all(person.valid[i] for i in needed):
            return
        mid_shoulder = (track.smoothed[LEFT_SHOULDER] + track.smoothed[RIGHT_SHOULDER]) / 2.0
        mid_hip = (track.smoothed[LEFT_HIP] + track.smoothed[RIGHT_HIP]) / 2.0
        length = float(np.linalg.norm(mid_shoulder - mid_hip))
        track.torso_samples.append((t, length))
        # half-open window (age < 2 s): at 30 fps that is an even 60 samples,
        # and the epsilon keeps grid-aligned boundaries from flipping under a
        # constant time shift
        horizon = t - cfg.calibration_window_s + 1e-9
        while track.torso_samples and track.torso_samples[0][0] <= horizon:
            track.torso_samples.popleft()
        was_uncalibrated = track.body_scale is None
        track.body_scale = max(
            cfg.body_scale_floor,
            float(np.median([s for _, s in track.torso_samples])),
        )
        if was_uncalibrated:
            self.events.append(
                FrameEvent(t, "calibrated", f"track {track.track_id} body_scale {track.body_scale:.4f}")
            )

    def _advance_track(
        self, track: PersonTrack, person: PersonPose | None, t: float
    ) -> TrackFrame:
        cfg = self.config
        G = cfg.max_gap_frames
        if person is not None:
            track.smoothed, track.seen = smooth_keypoints(
                track.smoothed, track.seen, person.xy, person.valid, cfg.smoothing_alpha
            )
            observed = person.valid
            track.staleness = 0
            centroid = track.smoothed[track.seen].mean(axis=0) if track.seen.any() else None
            if centroid is not None:
                track.last_centroid = centroid
            self._update_calibration(track, person, t)
        else:
            observed = np.zeros(NUM_KEYPOINTS, dtype=bool)
            track.staleness += 1

        track.miss_count[observed] = 0
        track.miss_count[~observed] += 1

        fresh = observed
        held = track.seen & ~observed & (track.miss_count <= G)
        stale = track.seen & ~observed & (track.miss_count > G)
        newly_stale = int((track.seen & ~observed & (track.miss_count == G + 1)).sum())
        if newly_stale:
            self.events.append(
                FrameEvent(
                    t, "keypoints_stale",
                    f"track {track.track_id}: {newly_stale} keypoint(s) exceeded gap {G}",
                )
            )
        return TrackFrame(
            track_id=track.track_id,
            xy=track.smoothed.copy(),
            fresh=fresh,
            interpolated=held,
            stale=stale,
            body_scale=track.body_scale,
            detected=person is not None,
        )

    def process(self, frame: PoseFrame) -> CleanFrame:
        cfg = self.config
        gated = gate_confidence(frame, cfg.confidence_threshold)

        detections: list[tuple[int, np.ndarray]] = []
        for i, person in enumerate(gated.persons):
            centroid = detection_centroid(person)
            if centroid is not None:
                detections.append((i, centroid))

        live = sorted(self.tracks.values(), key=lambda tr: tr.track_id)
        assigned = assign_tracks(detections, live, cfg.track_gate_distance)
        matched_detections = {di for di, _ in assigned}
        matched_tracks = {tr.track_id for _, tr in assigned}

        # unmatched detections open free slots, in detection order
        for di, centroid in detections:
            if di in matched_detections:
                continue
            slot = self._free_slot()
            if slot is None:
                self.events.append(
                    FrameEvent(frame.timestamp, "detection_dropped", "no free track slot")
                )
                continue
            track = PersonTrack(track_id=slot, last_centroid=centroid)
            self.tracks[slot] = track
            assigned.append((di, track))
            matched_tracks.add(slot)
            self.events.append(
                FrameEvent(frame.timestamp, "track_opened", f"track {slot}")
            )

        track_frames: list[TrackFrame] = []
        for di, track in assigned:
            track_frames.append(
                self._advance_track(track, gated.persons[di], frame.timestamp)
            )
        for track in list(self.tracks.values()):
            if track.track_id in matched_tracks:
                continue
            track_frames.append(self._advance_track(track, None, frame.timestamp))
            if track.staleness > cfg.max_gap_frames:
                del self.tracks[track.track_id]
                self.events.append(
                    FrameEvent(frame.timestamp, "track_retired", f"track {track.track_id}")
                )

        track_frames.sort(key=lambda tf: tf.track_id)
        return CleanFrame(frame.timestamp, tuple(track_frames))
