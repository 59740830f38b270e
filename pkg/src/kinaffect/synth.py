"""Procedural skeleton animator: deterministic gesture streams for teaching,
evaluation, and tests.

The four default archetypes encode contrasting movement qualities: happiness
is fast, large, smooth oscillation with outstretched arms; anger is fast and
impulsive; sadness is a slow contraction with downward drift; relaxation is a
slow, smooth sway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .model import FrameSource, NUM_KEYPOINTS, PersonPose, PoseFrame
from .recording import write_recording

FPS = 30.0

# Standing posture, normalized image coordinates (y down). Torso length 0.2.
BASE_POSE = np.array([
    [0.50, 0.30],   # nose
    [0.48, 0.28],   # left_eye
    [0.52, 0.28],   # right_eye
    [0.46, 0.29],   # left_ear
    [0.54, 0.29],   # right_ear
    [0.44, 0.38],   # left_shoulder
    [0.56, 0.38],   # right_shoulder
    [0.40, 0.48],   # left_elbow
    [0.60, 0.48],   # right_elbow
    [0.38, 0.57],   # left_wrist
    [0.62, 0.57],   # right_wrist
    [0.46, 0.58],   # left_hip
    [0.54, 0.58],   # right_hip
    [0.45, 0.72],   # left_knee
    [0.55, 0.72],   # right_knee
    [0.45, 0.86],   # left_ankle
    [0.55, 0.86],   # right_ankle
])

# Arms raised outward ("outstretched"); interpolated against BASE_POSE by the
# arm-spread parameter.
ARM_OUT = {
    7: [0.32, 0.36],   # left_elbow
    8: [0.68, 0.36],   # right_elbow
    9: [0.22, 0.30],   # left_wrist
    10: [0.78, 0.30],  # right_wrist
}

# How strongly each keypoint follows a crouch (head sinks most, feet stay).
CROUCH_WEIGHT = np.array(
    [1.2, 1.2, 1.2, 1.2, 1.2, 1.1, 1.1, 1.0, 1.0, 0.9, 0.9, 0.9, 0.9, 0.5, 0.5, 0.0, 0.0]
)

BODY_SCALE = 0.2  # torso length of BASE_POSE, image units

MAX_AMPLITUDE = 1.5   # body-lengths
MAX_FREQUENCY = 5.0   # Hz


@dataclass(frozen=True)
class GestureArchetype:
    label: str
    amplitude: float      # vertical oscillation, body-lengths
    frequency: float      # Hz
    jerk_level: float     # 0..1, impulsive jump injection
    drift: float          # crouch rate, body-lengths/s
    arm_spread: float     # 0 arms down .. 1 outstretched
    arm_osc: float        # oscillation of the arm spread
    sway: float           # lateral oscillation, body-lengths
    noise: float          # keypoint jitter std, image units
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.amplitude <= MAX_AMPLITUDE:
            raise ValueError(f"amplitude {self.amplitude} outside [0, {MAX_AMPLITUDE}]")
        if not 0 <= self.frequency <= MAX_FREQUENCY:
            raise ValueError(f"frequency {self.frequency} outside [0, {MAX_FREQUENCY}]")


DEFAULT_ARCHETYPES: dict[str, GestureArchetype] = {
    "happiness": GestureArchetype(
        label="happiness", amplitude=0.35, frequency=1.6, jerk_level=0.05,
        drift=0.0, arm_spread=0.85, arm_osc=0.3, sway=0.15, noise=0.004,
    ),
    "anger": GestureArchetype(
        label="anger", amplitude=0.25, frequency=2.6, jerk_level=0.85,
        drift=0.0, arm_spread=0.45, arm_osc=0.5, sway=0.10, noise=0.006,
    ),
    "sadness": GestureArchetype(
        label="sadness", amplitude=0.04, frequency=0.3, jerk_level=0.0,
        drift=0.02, arm_spread=0.05, arm_osc=0.05, sway=0.02, noise=0.003,
    ),
    "relaxation": GestureArchetype(
        label="relaxation", amplitude=0.12, frequency=0.45, jerk_level=0.0,
        drift=0.0, arm_spread=0.5, arm_osc=0.15, sway=0.12, noise=0.003,
    ),
}


def _person_frame(
    archetype: GestureArchetype,
    t: float,
    x_offset: float,
    phase: float,
    rng: np.random.Generator,
) -> np.ndarray:
    a = archetype
    pos = BASE_POSE.copy()

    spread = min(1.0, max(0.0, a.arm_spread + a.arm_osc * math.sin(2 * math.pi * a.frequency * t + phase)))
    for idx, target in ARM_OUT.items():
        pos[idx] = (1.0 - spread) * pos[idx] + spread * np.asarray(target)

    pos[:, 1] += a.amplitude * BODY_SCALE * math.sin(2 * math.pi * a.frequency * t + phase)
    pos[:, 0] += a.sway * BODY_SCALE * math.sin(math.pi * a.frequency * t + phase)

    crouch = min(1.0, a.drift * t) * BODY_SCALE
    pos[:, 1] += crouch * CROUCH_WEIGHT
    # hunch: shoulders pulled inward as the crouch deepens
    pos[5, 0] += 0.3 * crouch
    pos[6, 0] -= 0.3 * crouch

    # impulsive whole-upper-body jumps for jerky movement
    if a.jerk_level > 0 and rng.random() < a.jerk_level * 0.2:
        impulse = rng.normal(0.0, a.jerk_level * 0.12 * BODY_SCALE, 2)
        pos[:11] += impulse

    pos += rng.normal(0.0, a.noise, pos.shape)
    pos[:, 0] += x_offset
    return np.clip(pos, 0.01, 0.99)


def generate_frames(
    archetype: GestureArchetype,
    persons: int = 1,
    duration: float = 10.0,
    seed: int | None = None,
    fps: float = FPS,
    t_start: float = 0.0,
) -> Iterator[PoseFrame]:
    """Yield a deterministic pose stream; same arguments, same frames."""
    rng = np.random.default_rng(archetype.seed if seed is None else seed)
    n_frames = int(round(duration * fps))
    for i in range(n_frames):
        t = t_start + i / fps
        people = []
        for p in range(persons):
            x_offset = (p - (persons - 1) / 2.0) * 0.22
            phase = p * 2.1
            xy = _person_frame(archetype, i / fps, x_offset, phase, rng)
            conf = rng.uniform(0.7, 1.0, NUM_KEYPOINTS)
            people.append(
                PersonPose(p, xy, conf, np.ones(NUM_KEYPOINTS, dtype=bool))
            )
        yield PoseFrame(t, tuple(people), FrameSource.SYNTHETIC)


def synth(
    archetype: GestureArchetype,
    persons: int,
    duration: float,
    seed: int | None,
    out_path: str | Path,
) -> int:
    """Write a recording file for the archetype; returns the frame count."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    return write_recording(
        generate_frames(archetype, persons, duration, seed), out_path
    )
