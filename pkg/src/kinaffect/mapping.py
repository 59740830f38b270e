"""Mapping from estimates and features to audio/visual control parameters,
and their OSC publication schema.

Address map (one packet each, per hop):
  /cv/pose/<id>              centroid x, y
  /cv/emotion/<id>           valence, arousal, intensity, top label
  /cv/group/emotion          one float per label, config label order
  /cv/audio/tempo            BPM
  /cv/audio/mode             "major" | "minor"
  /cv/audio/complexity       [0,1]
  /cv/audio/dynamics         [0,1]
  /cv/visual/<id>/hue        degrees [0,360)
  /cv/visual/<id>/saturation [0,1]
  /cv/visual/<id>/complexity [0,1]
  /cv/visual/<id>/fluidity   [0,1]
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .osc import OscPacket, OscSender
from .recommend import EmotionEstimate


@dataclass(frozen=True)
class AudioParams:
    tempo: float         # BPM
    mode: str            # "major" | "minor", hysteresis on valence
    complexity: float    # [0,1] syncopation index
    dynamics: float      # [0,1] volume

    def as_dict(self) -> dict:
        return {
            "tempo": self.tempo,
            "mode": self.mode,
            "complexity": self.complexity,
            "dynamics": self.dynamics,
        }


DEFAULT_AUDIO = AudioParams(tempo=60.0, mode="major", complexity=0.0, dynamics=0.0)


@dataclass(frozen=True)
class VisualParams:
    track_id: int
    hue: float           # degrees [0, 360)
    saturation: float    # [0,1]
    complexity: float    # [0,1]
    fluidity: float      # [0,1]


def map_audio(
    estimate: EmotionEstimate,
    speed_norm: float,
    qom: float,
    energy_norm: float,
    previous: AudioParams,
    config: EngineConfig,
) -> AudioParams:
    """Movement speed drives tempo, valence drives major/minor with a
    deadband, quantity of motion drives rhythmic complexity, energy drives
    dynamics."""
    tempo = config.tempo_min + (config.tempo_max - config.tempo_min) * float(
        np.clip(speed_norm, 0.0, 1.0)
    )
    if estimate.valence > config.mode_deadband:
        mode = "major"
    elif estimate.valence < -config.mode_deadband:
        mode = "minor"
    else:
        mode = previous.mode
    dynamics = float(np.clip(max(0.0, energy_norm) ** config.dynamics_gamma, 0.0, 1.0))
    return AudioParams(
        tempo=tempo,
        mode=mode,
        complexity=float(np.clip(qom, 0.0, 1.0)),
        dynamics=dynamics,
    )


def map_visuals(
    estimate: EmotionEstimate, speed_norm: float, jerk_norm: float
) -> VisualParams:
    """Emotion angle becomes hue, intensity saturation; speed and smoothness
    drive pattern complexity and fluidity."""
    hue = math.degrees(math.atan2(estimate.arousal, estimate.valence)) % 360.0
    return VisualParams(
        track_id=estimate.subject if isinstance(estimate.subject, int) else -1,
        hue=hue,
        saturation=float(np.clip(estimate.intensity, 0.0, 1.0)),
        complexity=float(np.clip(speed_norm, 0.0, 1.0)),
        fluidity=float(np.clip(1.0 - jerk_norm, 0.0, 1.0)),
    )


def build_packets(
    person_estimates: list[EmotionEstimate],
    centroids: dict[int, tuple[float, float]],
    group_estimate: EmotionEstimate | None,
    audio: AudioParams,
    visuals: list[VisualParams],
) -> list[OscPacket]:
    """The per-hop packet set; with no persons only the audio group remains."""
    packets: list[OscPacket] = []
    for est in person_estimates:
        tid = est.subject
        cx, cy = centroids.get(tid, (0.5, 0.5))
        packets.append(OscPacket(f"/cv/pose/{tid}", (float(cx), float(cy))))
        packets.append(
            OscPacket(
                f"/cv/emotion/{tid}",
                (est.valence, est.arousal, est.intensity, est.top_label()),
            )
        )
    if group_estimate is not None:
        packets.append(
            OscPacket(
                "/cv/group/emotion",
                tuple(float(p) for p in group_estimate.distribution),
            )
        )
    packets.append(OscPacket("/cv/audio/tempo", (audio.tempo,)))
    packets.append(OscPacket("/cv/audio/mode", (audio.mode,)))
    packets.append(OscPacket("/cv/audio/complexity", (audio.complexity,)))
    packets.append(OscPacket("/cv/audio/dynamics", (audio.dynamics,)))
    for vis in visuals:
        base = f"/cv/visual/{vis.track_id}"
        packets.append(OscPacket(f"{base}/hue", (vis.hue,)))
        packets.append(OscPacket(f"{base}/saturation", (vis.saturation,)))
        packets.append(OscPacket(f"{base}/complexity", (vis.complexity,)))
        packets.append(OscPacket(f"{base}/fluidity", (vis.fluidity,)))
    return packets


def publish(packets: list[OscPacket], sender: OscSender | None) -> int:
    """Send packets fire-and-forget; returns how many were handed to the socket."""
    if sender is None:
        return 0
    return sum(1 for p in packets if sender.send(p))
