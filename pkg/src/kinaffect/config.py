"""Engine configuration: defaults, file loading, override layering.

Resolution order is defaults < config file < explicit overrides. The file is
a single JSON object mirroring the field names below; the environment
variable ``AFFECT_CONFIG`` names the default file path.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

FEATURE_NAMES = (
    "speed",
    "energy",
    "amplitude",
    "expansion",
    "jerk",
    "frequency",
    "qom",
    "rom",
)

# Reference ranges for [0,1] feature normalization, calibrated against the
# synthetic gesture archetypes (see synth.py). Spatial features are already
# body-scale-normalized.
DEFAULT_FEATURE_RANGES: dict[str, tuple[float, float]] = {
    "speed": (0.0, 1.5),
    "energy": (0.0, 10.0),
    "amplitude": (2.5, 4.5),
    "expansion": (0.8, 2.4),
    "jerk": (0.0, 2000.0),
    "frequency": (0.0, 4.0),
    "qom": (0.0, 1.0),
    "rom": (0.0, 1.0),
}

DEFAULT_ANCHORS: dict[str, tuple[float, float]] = {
    "happiness": (0.7, 0.7),
    "anger": (-0.7, 0.7),
    "sadness": (-0.7, -0.7),
    "relaxation": (0.7, -0.7),
}

CONFIG_ENV_VAR = "AFFECT_CONFIG"


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    pass


class InvariantViolation(ConfigError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass(frozen=True)
class EngineConfig:
    # pose pipeline
    confidence_threshold: float = 0.3
    smoothing_alpha: float = 0.6
    max_gap_frames: int = 10
    max_persons: int = 3
    track_gate_distance: float = 0.25
    calibration_window_s: float = 2.0
    body_scale_floor: float = 0.01

    # feature windows
    window_s: float = 1.0
    hop_s: float = 0.1
    min_valid_fraction: float = 0.5
    min_window_frames: int = 10
    qom_displacement: float = 0.02
    zero_cross_deadband: float = 0.15  # body-lengths/s, Schmitt-trigger width
    freq_smooth_frames: int = 5        # moving average over vertical velocity
    proximity_scale: float = 0.5
    feature_ranges: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_FEATURE_RANGES)
    )

    # recommenders
    recommender_weights: tuple[float, float, float] = (0.4, 0.3, 0.3)
    anchors: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_ANCHORS)
    )
    circumplex_sigma: float = 0.6
    sigma_floor: float = 0.05
    blend_ramp_windows: int = 100
    ema_half_life_fast_s: float = 1.0
    ema_half_life_main_s: float = 5.0
    ema_half_life_slow_s: float = 10.0
    trend_threshold: float = 0.15
    adaptation_rate: float = 0.05

    # teaching
    teach_lead_in_s: float = 1.0
    teach_min_segment_s: float = 3.0

    # output mapping
    tempo_min: float = 60.0
    tempo_max: float = 140.0
    mode_deadband: float = 0.1
    dynamics_gamma: float = 0.7

    # cosmos
    episode_min_confidence: float = 0.4
    episode_min_duration_s: float = 2.0
    episode_cap: int = 64
    cosmos_base_url: str = "https://cosmos.local"

    # session phases
    preparation_s: float = 60.0
    teaching_s: float = 300.0
    exploration_s: float = 300.0

    # network endpoints
    ws_port: int = 8765
    osc_host: str = "127.0.0.1"
    osc_port: int = 9000

    def digest(self) -> str:
        """Stable hex digest of the full configuration."""
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_POSITIVE_FIELDS = (
    "confidence_threshold",
    "smoothing_alpha",
    "max_gap_frames",
    "window_s",
    "hop_s",
    "min_valid_fraction",
    "qom_displacement",
    "proximity_scale",
    "circumplex_sigma",
    "sigma_floor",
    "blend_ramp_windows",
    "ema_half_life_fast_s",
    "ema_half_life_main_s",
    "ema_half_life_slow_s",
    "trend_threshold",
    "episode_min_confidence",
    "episode_min_duration_s",
    "preparation_s",
    "teaching_s",
    "exploration_s",
    "teach_min_segment_s",
    "track_gate_distance",
    "calibration_window_s",
    "body_scale_floor",
)


def validate_config(cfg: EngineConfig) -> EngineConfig:
    for name in _POSITIVE_FIELDS:
        value = getattr(cfg, name)
        if not value > 0:
            raise InvariantViolation(name, f"must be positive, got {value}")
    if cfg.adaptation_rate < 0:
        raise InvariantViolation("adaptation_rate", "must be nonnegative")
    if not cfg.window_s > cfg.hop_s:
        raise InvariantViolation(
            "window_s", f"window_s ({cfg.window_s}) must exceed hop_s ({cfg.hop_s})"
        )
    if not cfg.tempo_min < cfg.tempo_max:
        raise InvariantViolation(
            "tempo_min", f"tempo range [{cfg.tempo_min}, {cfg.tempo_max}] is empty"
        )
    weights = cfg.recommender_weights
    if len(weights) != 3 or any(w < 0 for w in weights):
        raise InvariantViolation("recommender_weights", "must be 3 nonnegative values")
    if not sum(weights) > 0:
        raise InvariantViolation("recommender_weights", "must sum to > 0")
    for fname in FEATURE_NAMES:
        if fname not in cfg.feature_ranges:
            raise InvariantViolation("feature_ranges", f"missing range for {fname}")
        lo, hi = cfg.feature_ranges[fname]
        if not lo < hi:
            raise InvariantViolation(
                "feature_ranges", f"{fname}: min {lo} must be below max {hi}"
            )
    if not 0 < cfg.smoothing_alpha <= 1:
        raise InvariantViolation("smoothing_alpha", "must be in (0, 1]")
    if cfg.mode_deadband < 0:
        raise InvariantViolation("mode_deadband", "must be nonnegative")
    return cfg


_TUPLE_DICT_FIELDS = ("feature_ranges", "anchors")


def _coerce(name: str, value):
    if name in _TUPLE_DICT_FIELDS:
        return {k: (float(v[0]), float(v[1])) for k, v in value.items()}
    if name == "recommender_weights":
        return tuple(float(w) for w in value)
    return value


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> EngineConfig:
    """Resolve the engine configuration.

    ``path=None`` consults ``AFFECT_CONFIG``; if that is unset too, defaults
    apply. Unknown field names raise ParseError so typos do not silently
    become no-ops.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None

    known = {f.name for f in dataclasses.fields(EngineConfig)}
    values: dict = {}

    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except OSError as exc:
            raise ParseError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ParseError(f"config {path} must hold a JSON object")
        for key, value in raw.items():
            if key not in known:
                raise ParseError(f"unknown config field {key!r}")
            values[key] = _coerce(key, value)

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ParseError(f"unknown config override {key!r}")
        values[key] = _coerce(key, value)

    try:
        cfg = EngineConfig(**values)
    except TypeError as exc:
        raise ParseError(str(exc)) from exc
    return validate_config(cfg)
