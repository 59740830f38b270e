"""Windowed movement features per person, plus group context features.

All spatial quantities are divided by the track's body scale, so features are
invariant to where a person stands and how large they appear in the image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import FEATURE_NAMES, EngineConfig
from .model import LEFT_ANKLE, LEFT_WRIST, RIGHT_ANKLE, RIGHT_WRIST
from .pipeline import CleanFrame

EXTREMITY_INDICES = (LEFT_WRIST, RIGHT_WRIST, LEFT_ANKLE, RIGHT_ANKLE)


@dataclass(frozen=True)
class FeatureVector:
    track_id: int
    speed: float       # mean centroid speed, body-lengths/s
    energy: float      # mean squared keypoint speed
    amplitude: float   # mean keypoint bounding-box diagonal / body scale
    expansion: float   # mean wrist+ankle distance from centroid / body scale
    jerk: float        # mean |third difference| of centroid, body-lengths/s^3
    frequency: float   # vertical-velocity zero crossings / (2W), Hz
    qom: float         # fraction of keypoints moving beyond the displacement threshold
    rom: float         # bounding-box diagonal range over the window / body scale

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


@dataclass(frozen=True)
class GroupFeatures:
    count: int
    proximity: float   # closeness in [0,1]; 0 when fewer than two persons
    synchrony: float   # mean pairwise speed correlation in [-1,1]; 1 when count < 2


class InsufficientWindow(ValueError):
    """Window lacks enough valid frames for this track; hop is skipped."""


@dataclass
class _TrackSeries:
    timestamps: np.ndarray       # (F,) frame times with a usable centroid
    centroids: np.ndarray        # (F, 2)
    frames: list                 # TrackFrame per centroid frame
    detected_fraction: float
    total_frames: int
    body_scale: float | None


def _collect_series(window: list[CleanFrame], track_id: int) -> _TrackSeries | None:
    timestamps, centroids, frames = [], [], []
    detected = 0
    present = 0
    body_scale = None
    for cf in window:
        tf = cf.track(track_id)
        if tf is None:
            continue
        present += 1
        if tf.detected:
            detected += 1
        if tf.body_scale is not None:
            body_scale = tf.body_scale
        usable = tf.usable
        if usable.any():
            timestamps.append(cf.timestamp)
            centroids.append(tf.xy[usable].mean(axis=0))
            frames.append(tf)
    if present == 0:
        return None
    return _TrackSeries(
        timestamps=np.array(timestamps),
        centroids=np.array(centroids) if centroids else np.empty((0, 2)),
        frames=frames,
        detected_fraction=detected / present,
        total_frames=present,
        body_scale=body_scale,
    )


def _zero_crossings(values: np.ndarray, deadband: float) -> int:
    """Schmitt-trigger crossing count: the signal must exceed the deadband on
    the far side before a crossing registers, so noise near zero is ignored."""
    state = 0
    crossings = 0
    for v in values:
        if v > deadband:
            if state == -1:
                crossings += 1
            state = 1
        elif v < -deadband:
            if state == 1:
                crossings += 1
            state = -1
    return crossings


def extract_features(
    window: list[CleanFrame], track_id: int, config: EngineConfig
) -> FeatureVector:
    """Compute the eight-feature movement descriptor for one track.

    Raises InsufficientWindow when the track is uncalibrated, too sparsely
    detected, or the window holds too few frames.
    """
    series = _collect_series(window, track_id)
    if series is None or series.total_frames < config.min_window_frames:
        raise InsufficientWindow(f"track {track_id}: too few frames")
    if series.detected_fraction < config.min_valid_fraction:
        raise InsufficientWindow(f"track {track_id}: detected in <50% of frames")
    if series.body_scale is None:
        raise InsufficientWindow(f"track {track_id}: uncalibrated")
    if len(series.centroids) < 4:
        raise InsufficientWindow(f"track {track_id}: centroid series too short")

    scale = series.body_scale
    t = series.timestamps
    c = series.centroids / scale
    dt = np.diff(t)
    dt[dt <= 0] = np.finfo(float).eps

    velocity = np.diff(c, axis=0) / dt[:, None]
    speed_series = np.linalg.norm(velocity, axis=1)
    speed = float(speed_series.mean())

    step = float(np.median(dt))
    third = np.diff(c, n=3, axis=0)
    jerk = float(np.mean(np.linalg.norm(third, axis=1)) / step**3)

    # keypoint jitter survives into the velocity; a short moving average keeps
    # the crossing counter on the gesture, not the noise
    vy = velocity[:, 1]
    k = max(1, min(config.freq_smooth_frames, len(vy)))
    vy = np.convolve(vy, np.ones(k) / k, mode="same")
    freq = _zero_crossings(vy, config.zero_cross_deadband) / (2.0 * config.window_s)

    diagonals = []
    expansions = []
    for tf in series.frames:
        usable = tf.usable
        pts = tf.xy[usable] / scale
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        diagonals.append(float(np.linalg.norm(hi - lo)))
        extremities = [i for i in EXTREMITY_INDICES if usable[i]]
        if extremities:
            centroid = pts.mean(axis=0)
            ext = tf.xy[extremities] / scale
            expansions.append(float(np.linalg.norm(ext - centroid, axis=1).mean()))
    diagonals = np.array(diagonals)
    amplitude = float(diagonals.mean())
    rom = float(diagonals.max() - diagonals.min())
    expansion = float(np.mean(expansions)) if expansions else 0.0

    sq_speeds = []
    qom_fractions = []
    for a, b, dt_ab in zip(series.frames[:-1], series.frames[1:], dt):
        both = a.usable & b.usable
        if not both.any():
            continue
        disp = np.linalg.norm(b.xy[both] - a.xy[both], axis=1) / scale
        sq_speeds.append((disp / dt_ab) ** 2)
        qom_fractions.append(float((disp > config.qom_displacement).mean()))
    energy = float(np.concatenate(sq_speeds).mean()) if sq_speeds else 0.0
    qom = float(np.mean(qom_fractions)) if qom_fractions else 0.0

    return FeatureVector(
        track_id=track_id,
        speed=speed,
        energy=energy,
        amplitude=amplitude,
        expansion=expansion,
        jerk=jerk,
        frequency=float(freq),
        qom=qom,
        rom=rom,
    )


def active_track_ids(window: list[CleanFrame], config: EngineConfig) -> list[int]:
    """Tracks detected in enough of the window to count as present."""
    ids = sorted({tf.track_id for cf in window for tf in cf.tracks})
    active = []
    for tid in ids:
        series = _collect_series(window, tid)
        if (
            series is not None
            and series.total_frames >= config.min_window_frames
            and series.detected_fraction >= config.min_valid_fraction
            and len(series.centroids) >= 2
        ):
            active.append(tid)
    return active


def extract_group(window: list[CleanFrame], config: EngineConfig) -> GroupFeatures:
    """Group context: person count, spatial closeness, movement synchrony."""
    ids = active_track_ids(window, config)
    count = len(ids)
    if count < 2:
        return GroupFeatures(count=count, proximity=0.0, synchrony=1.0)

    series = {tid: _collect_series(window, tid) for tid in ids}

    distances = []
    correlations = []
    for i, a in enumerate(ids):
        for b in ids[i + 1:]:
            sa, sb = series[a], series[b]
            common, ia, ib = np.intersect1d(
                sa.timestamps, sb.timestamps, return_indices=True
            )
            if len(common) < 2:
                continue
            ca, cb = sa.centroids[ia], sb.centroids[ib]
            distances.append(float(np.linalg.norm(ca - cb, axis=1).mean()))
            dts = np.diff(common)
            dts[dts <= 0] = np.finfo(float).eps
            va = np.linalg.norm(np.diff(ca, axis=0), axis=1) / dts
            vb = np.linalg.norm(np.diff(cb, axis=0), axis=1) / dts
            if va.std() > 0 and vb.std() > 0:
                correlations.append(float(np.corrcoef(va, vb)[0, 1]))
            else:
                correlations.append(0.0)

    proximity = 0.0
    if distances:
        proximity = 1.0 - min(
            1.0, max(0.0, float(np.mean(distances)) / config.proximity_scale)
        )
    synchrony = float(np.mean(correlations)) if correlations else 1.0
    return GroupFeatures(
        count=count,
        proximity=proximity,
        synchrony=float(np.clip(synchrony, -1.0, 1.0)),
    )


def normalize(fv: FeatureVector, ranges: dict[str, tuple[float, float]]) -> np.ndarray:
    """Affine map of each feature onto [0,1] per its reference range, clamped."""
    out = np.empty(len(FEATURE_NAMES))
    for i, name in enumerate(FEATURE_NAMES):
        lo, hi = ranges[name]
        out[i] = (getattr(fv, name) - lo) / (hi - lo)
    return np.clip(out, 0.0, 1.0)
