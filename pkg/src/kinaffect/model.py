"""Core domain types: keypoints, pose frames, emotion labels.

Coordinates are normalized image space ([0,1] x [0,1], y down). All motion
quantities downstream are body-scale-normalized, so image units cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

KEYPOINT_NAMES = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)
NUM_KEYPOINTS = 17

LEFT_SHOULDER, RIGHT_SHOULDER = 5, 6
LEFT_WRIST, RIGHT_WRIST = 9, 10
LEFT_HIP, RIGHT_HIP = 11, 12
LEFT_ANKLE, RIGHT_ANKLE = 15, 16

MAX_PERSONS = 3

# Out-of-range coordinates within this slack are clamped (with a warning
# event); anything further out rejects the frame.
COORD_SLACK = 0.05

PREDEFINED_LABELS = ("happiness", "relaxation", "anger", "sadness")
MAX_LABEL_LEN = 32


class FrameSource(Enum):
    RECORDING = "recording"
    SYNTHETIC = "synthetic"
    LIVE = "live"


class FrameError(ValueError):
    """Base class for frame validation failures."""


class NonMonotonicTimestamp(FrameError):
    pass


class WrongKeypointCount(FrameError):
    pass


class BadLabel(ValueError):
    pass


class Keypoint(NamedTuple):
    index: int
    x: float
    y: float
    confidence: float
    valid: bool

    @property
    def name(self) -> str:
        return KEYPOINT_NAMES[self.index]


@dataclass(frozen=True)
class PersonPose:
    """One detected person: 17 keypoints as arrays plus validity flags."""

    person_id: int
    xy: np.ndarray        # (17, 2) float64
    confidence: np.ndarray  # (17,) float64
    valid: np.ndarray     # (17,) bool

    def keypoint(self, index: int) -> Keypoint:
        return Keypoint(
            index,
            float(self.xy[index, 0]),
            float(self.xy[index, 1]),
            float(self.confidence[index]),
            bool(self.valid[index]),
        )

    def with_valid(self, valid: np.ndarray) -> "PersonPose":
        return PersonPose(self.person_id, self.xy, self.confidence, valid)


@dataclass(frozen=True)
class PoseFrame:
    timestamp: float
    persons: tuple[PersonPose, ...]
    source: FrameSource = FrameSource.RECORDING

    def person(self, person_id: int) -> PersonPose | None:
        for p in self.persons:
            if p.person_id == person_id:
                return p
        return None


@dataclass(frozen=True)
class FrameEvent:
    """Diagnostics event emitted during validation/tracking."""

    timestamp: float
    kind: str
    detail: str


@dataclass
class FrameValidator:
    """Validates raw frame records into PoseFrames, enforcing invariants.

    Stateful only for timestamp monotonicity; events accumulate in
    ``events`` and can be drained by the caller.
    """

    max_persons: int = MAX_PERSONS
    last_timestamp: float | None = None
    events: list[FrameEvent] = field(default_factory=list)

    def validate(self, record: dict, source: FrameSource = FrameSource.RECORDING) -> PoseFrame:
        try:
            t = float(record["t"])
            raw_persons = record["persons"]
        except (KeyError, TypeError, ValueError) as exc:
            raise FrameError(f"malformed frame record: {exc}") from exc
        if not np.isfinite(t):
            raise FrameError(f"non-finite timestamp {t!r}")
        if self.last_timestamp is not None and t <= self.last_timestamp:
            raise NonMonotonicTimestamp(
                f"timestamp {t} not after {self.last_timestamp}"
            )

        persons = []
        for raw in raw_persons:
            pid = int(raw["id"])
            kp = np.asarray(raw["kp"], dtype=np.float64)
            if kp.shape != (NUM_KEYPOINTS, 3):
                raise WrongKeypointCount(
                    f"person {pid}: expected {NUM_KEYPOINTS} keypoints, got shape {kp.shape}"
                )
            xy = kp[:, :2]
            conf = kp[:, 2]
            if not np.all(np.isfinite(kp)):
                raise FrameError(f"person {pid}: non-finite keypoint values")
            if np.any(xy < -COORD_SLACK) or np.any(xy > 1.0 + COORD_SLACK):
                raise FrameError(f"person {pid}: coordinates out of range beyond slack")
            if np.any(xy < 0.0) or np.any(xy > 1.0):
                self.events.append(
                    FrameEvent(t, "coords_clamped", f"person {pid} coords clamped to [0,1]")
                )
                xy = np.clip(xy, 0.0, 1.0)
            conf = np.clip(conf, 0.0, 1.0)
            persons.append(
                PersonPose(pid, xy, conf, np.ones(NUM_KEYPOINTS, dtype=bool))
            )

        if len(persons) > self.max_persons:
            persons.sort(key=lambda p: p.person_id)
            dropped = persons[self.max_persons:]
            persons = persons[: self.max_persons]
            self.events.append(
                FrameEvent(
                    t,
                    "persons_dropped",
                    f"dropped {[p.person_id for p in dropped]} beyond capacity {self.max_persons}",
                )
            )

        self.last_timestamp = t
        return PoseFrame(t, tuple(persons), source)

    def drain_events(self) -> list[FrameEvent]:
        out = self.events
        self.events = []
        return out


def check_label(label: str) -> str:
    """Validate a taught emotion label; returns the canonical (stripped) form."""
    label = label.strip()
    if not label or len(label) > MAX_LABEL_LEN:
        raise BadLabel(f"label must be 1..{MAX_LABEL_LEN} chars, got {label!r}")
    return label
