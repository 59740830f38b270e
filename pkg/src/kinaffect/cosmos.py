"""Session cosmos: emotion episodes, crystal parameters, and the compact
shareable payload behind the session QR code.

The payload is a versioned binary, base64url-encoded into a URL fragment.
Crystal positions are regenerated from the session id rather than stored, so
the payload stays small while the scene remains reproducible.
"""

from __future__ import annotations

import base64
import hashlib
import math
import struct
from dataclasses import dataclass, field

from .config import EngineConfig
from .model import PREDEFINED_LABELS
from .recommend import EmotionEstimate

PAYLOAD_VERSION = 1
HEADER_BYTES = 1 + 16 + 2 + 8 + 1
EPISODE_BYTES = 7
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class PayloadError(ValueError):
    pass


class BadVersion(PayloadError):
    pass


class BadLength(PayloadError):
    pass


class BadBase64(PayloadError):
    pass


@dataclass(frozen=True)
class EmotionEpisode:
    label: str
    onset: float            # seconds from session start
    duration: float         # seconds
    mean_intensity: float   # [0,1]
    mean_valence: float
    mean_arousal: float

    @property
    def rotation(self) -> float:
        """Crystal rotation, radians in [-pi, pi]."""
        return math.atan2(self.mean_arousal, self.mean_valence)


@dataclass(frozen=True)
class Crystal:
    label: str
    size: float
    creation_time: float
    rotation: float
    position: tuple[float, float, float]


@dataclass(frozen=True)
class CosmosSummary:
    session_id: str                       # 32 hex chars (128 bits)
    duration_s: float
    labels: tuple[str, ...]
    integrated_levels: dict[str, float]   # label -> seconds
    mean_speed: float
    mean_qom: float
    max_rom: float
    episodes: tuple[EmotionEpisode, ...]
    crystals: tuple[Crystal, ...] = field(default_factory=tuple)


def segment_episodes(
    history: list[EmotionEstimate],
    hop_s: float,
    min_confidence: float,
    min_duration: float,
    session_start: float,
) -> list[EmotionEpisode]:
    """Maximal runs of a constant, confident top label, at least the minimum
    duration long. Low-confidence hops break runs."""
    episodes: list[EmotionEpisode] = []
    run: list[EmotionEstimate] = []
    run_label: str | None = None

    def flush():
        nonlocal run, run_label
        if run:
            duration = run[-1].timestamp - run[0].timestamp + hop_s
            if duration >= min_duration:
                episodes.append(
                    EmotionEpisode(
                        label=run_label,
                        onset=run[0].timestamp - session_start,
                        duration=duration,
                        mean_intensity=sum(e.intensity for e in run) / len(run),
                        mean_valence=sum(e.valence for e in run) / len(run),
                        mean_arousal=sum(e.arousal for e in run) / len(run),
                    )
                )
        run, run_label = [], None

    for est in history:
        if est.confidence < min_confidence:
            flush()
            continue
        label = est.top_label()
        if label != run_label:
            flush()
            run_label = label
        run.append(est)
    flush()
    return episodes


def crystal_position(session_id: str, index: int) -> tuple[float, float, float]:
    """Deterministic spiral placement: session-specific phase, per-episode
    radius step, hashed height jitter."""
    sid = bytes.fromhex(session_id)
    phase_hash = hashlib.sha256(sid).digest()
    phase = 2.0 * math.pi * (int.from_bytes(phase_hash[:4], "big") / 2**32)
    jitter_hash = hashlib.sha256(sid + struct.pack(">I", index)).digest()
    jitter = int.from_bytes(jitter_hash[:4], "big") / 2**32
    angle = phase + index * GOLDEN_ANGLE
    radius = 0.5 * math.sqrt(index + 1)
    return (
        radius * math.cos(angle),
        (jitter - 0.5) * 0.4,
        radius * math.sin(angle),
    )


def crystal_for(episode: EmotionEpisode, session_id: str, index: int) -> Crystal:
    return Crystal(
        label=episode.label,
        size=episode.mean_intensity * math.log1p(episode.duration),
        creation_time=episode.onset,
        rotation=episode.rotation,
        position=crystal_position(session_id, index),
    )


def build_summary(
    session_id: str,
    duration_s: float,
    labels: tuple[str, ...],
    group_history: list[EmotionEstimate],
    movement: dict[str, float],
    config: EngineConfig,
    session_start: float = 0.0,
) -> CosmosSummary:
    levels = {label: 0.0 for label in labels}
    for est in group_history:
        for label, p in zip(est.labels, est.distribution):
            levels[label] = levels.get(label, 0.0) + float(p) * config.hop_s

    episodes = segment_episodes(
        group_history,
        config.hop_s,
        config.episode_min_confidence,
        config.episode_min_duration_s,
        session_start,
    )
    if len(episodes) > config.episode_cap:
        episodes = sorted(episodes, key=lambda e: -e.mean_intensity)[: config.episode_cap]
        episodes.sort(key=lambda e: e.onset)

    crystals = tuple(
        crystal_for(ep, session_id, i) for i, ep in enumerate(episodes)
    )
    return CosmosSummary(
        session_id=session_id,
        duration_s=duration_s,
        labels=labels,
        integrated_levels=levels,
        mean_speed=movement.get("mean_speed", 0.0),
        mean_qom=movement.get("mean_qom", 0.0),
        max_rom=movement.get("max_rom", 0.0),
        episodes=tuple(episodes),
        crystals=crystals,
    )


def _u16_ds(seconds: float) -> int:
    return min(65535, max(0, int(round(seconds * 10.0))))


def _u8_unit(value: float) -> int:
    return min(255, max(0, int(round(value * 255.0))))


def encode_payload(summary: CosmosSummary) -> str:
    """Versioned binary summary as a base64url string (no padding)."""
    sid = bytes.fromhex(summary.session_id)
    if len(sid) != 16:
        raise ValueError("session_id must be 128 bits (32 hex chars)")
    episodes = summary.episodes
    if len(episodes) > 255:
        episodes = episodes[:255]
    out = bytearray()
    out.append(PAYLOAD_VERSION)
    out += sid
    out += struct.pack(">H", _u16_ds(summary.duration_s))
    for label in PREDEFINED_LABELS:
        out += struct.pack(">H", _u16_ds(summary.integrated_levels.get(label, 0.0)))
    out.append(len(episodes))
    label_index = {label: i for i, label in enumerate(summary.labels)}
    for ep in episodes:
        idx = min(255, label_index.get(ep.label, 0))
        rotation_u8 = _u8_unit((ep.rotation + math.pi) / (2.0 * math.pi))
        out += struct.pack(
            ">BHHBB",
            idx,
            _u16_ds(ep.onset),
            _u16_ds(ep.duration),
            _u8_unit(ep.mean_intensity),
            rotation_u8,
        )
    return base64.urlsafe_b64encode(bytes(out)).decode("ascii").rstrip("=")


def payload_url(summary: CosmosSummary, base_url: str) -> str:
    return f"{base_url.rstrip('/')}/c#{encode_payload(summary)}"


def decode_payload(payload: str) -> CosmosSummary:
    """Inverse of encode within quantization. Crystal positions are
    regenerated from the session id; episode (valence, arousal) come back as
    the unit vector of the stored rotation; movement totals are not carried
    by the payload and decode as zero."""
    padded = payload + "=" * (-len(payload) % 4)
    try:
        data = base64.b64decode(padded.encode("ascii"), altchars=b"-_", validate=True)
    except Exception as exc:
        raise BadBase64(f"payload is not valid base64url: {exc}") from exc
    if len(data) < HEADER_BYTES:
        raise BadLength(f"payload too short: {len(data)} bytes")
    if data[0] != PAYLOAD_VERSION:
        raise BadVersion(f"unsupported payload version {data[0]}")
    sid = data[1:17].hex()
    duration = struct.unpack_from(">H", data, 17)[0] / 10.0
    levels = {}
    for i, label in enumerate(PREDEFINED_LABELS):
        levels[label] = struct.unpack_from(">H", data, 19 + 2 * i)[0] / 10.0
    count = data[27]
    expected = HEADER_BYTES + count * EPISODE_BYTES
    if len(data) != expected:
        raise BadLength(f"expected {expected} bytes for {count} episodes, got {len(data)}")

    episodes = []
    for i in range(count):
        idx, onset_ds, dur_ds, intensity_u8, rotation_u8 = struct.unpack_from(
            ">BHHBB", data, HEADER_BYTES + i * EPISODE_BYTES
        )
        label = (
            PREDEFINED_LABELS[idx] if idx < len(PREDEFINED_LABELS) else f"taught-{idx}"
        )
        rotation = (rotation_u8 / 255.0) * 2.0 * math.pi - math.pi
        episodes.append(
            EmotionEpisode(
                label=label,
                onset=onset_ds / 10.0,
                duration=dur_ds / 10.0,
                mean_intensity=intensity_u8 / 255.0,
                mean_valence=math.cos(rotation),
                mean_arousal=math.sin(rotation),
            )
        )
    crystals = tuple(crystal_for(ep, sid, i) for i, ep in enumerate(episodes))
    return CosmosSummary(
        session_id=sid,
        duration_s=duration,
        labels=PREDEFINED_LABELS,
        integrated_levels=levels,
        mean_speed=0.0,
        mean_qom=0.0,
        max_rom=0.0,
        episodes=tuple(episodes),
        crystals=crystals,
    )
