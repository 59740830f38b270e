"""The three emotion recommenders and their consensus.

REC1 reads movement features against the circumplex baseline and the taught
lexicon; REC2 blends individual readings toward the group under high
cohesion; REC3 carries a temporal prior (exponential averages of the
consensus) and flags trend shifts. The final estimate is their weighted
convex combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .config import FEATURE_NAMES, EngineConfig
from .features import GroupFeatures
from .lexicon import EmotionLexicon

_SPEED = FEATURE_NAMES.index("speed")
_EXPANSION = FEATURE_NAMES.index("expansion")
_JERK = FEATURE_NAMES.index("jerk")
_FREQUENCY = FEATURE_NAMES.index("frequency")
_QOM = FEATURE_NAMES.index("qom")


class LabelSetMismatch(ValueError):
    pass


class Recommender(Protocol):
    """Extension signature for additional perspectives (facial, vocal,
    physiological, ...). Implementations return a distribution over the
    lexicon's labels; the consensus treats them like any other input."""

    def recommend(
        self, features: np.ndarray, lexicon: EmotionLexicon,
        subject: int | str, timestamp: float,
    ) -> "EmotionEstimate": ...


@dataclass(frozen=True)
class EmotionEstimate:
    labels: tuple[str, ...]
    distribution: np.ndarray
    valence: float
    arousal: float
    intensity: float
    confidence: float
    subject: int | str       # track id, or "group"
    timestamp: float

    def top_label(self) -> str:
        return self.labels[int(np.argmax(self.distribution))]

    def as_dict(self) -> dict:
        return {
            "dist": {l: float(p) for l, p in zip(self.labels, self.distribution)},
            "v": self.valence,
            "a": self.arousal,
            "intensity": self.intensity,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class TrendShift:
    timestamp: float
    divergence: float


def entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def entropy_confidence(p: np.ndarray) -> float:
    if len(p) < 2:
        return 1.0
    return float(1.0 - entropy(p) / np.log(len(p)))


def js_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Jensen-Shannon divergence in nats (upper bound ln 2)."""
    m = 0.5 * (p + q)

    def kl(a, b):
        mask = a > 0
        return float((a[mask] * np.log(a[mask] / b[mask])).sum())

    return 0.5 * kl(p, m) + 0.5 * kl(q, m)


def circumplex_map(x: np.ndarray) -> tuple[float, float, float]:
    """Map a normalized feature vector to (valence, arousal, energy).

    Arousal follows the energy composite of speed, quantity of motion, and
    oscillation frequency; valence rises with openness of posture and falls
    with jerkiness.
    """
    e = 0.5 * x[_SPEED] + 0.3 * x[_QOM] + 0.2 * x[_FREQUENCY]
    arousal = float(np.clip(2.0 * e - 1.0, -1.0, 1.0))
    valence = float(
        np.clip(2.0 * (0.6 * x[_EXPANSION] + 0.4 * (1.0 - x[_JERK])) - 1.0, -1.0, 1.0)
    )
    return valence, arousal, float(np.clip(e, 0.0, 1.0))


def _normalized_exp(log_weights: np.ndarray) -> np.ndarray:
    shifted = log_weights - log_weights.max()
    w = np.exp(shifted)
    return w / w.sum()


def rec1_behavioral(
    x: np.ndarray,
    lexicon: EmotionLexicon,
    subject: int | str,
    timestamp: float,
) -> EmotionEstimate:
    """Behavioral recommender: circumplex baseline blended with the taught
    lexicon as teaching evidence accumulates."""
    cfg = lexicon.config
    labels = lexicon.labels
    valence, arousal, energy = circumplex_map(x)

    base = np.zeros(len(labels))
    log_base = np.array([
        -((valence - cfg.anchors[l][0]) ** 2 + (arousal - cfg.anchors[l][1]) ** 2)
        / (2.0 * cfg.circumplex_sigma**2)
        for l in labels
        if l in cfg.anchors
    ])
    anchored = [i for i, l in enumerate(labels) if l in cfg.anchors]
    base[anchored] = _normalized_exp(log_base)

    taught = [i for i, l in enumerate(labels) if lexicon.stats[l].n > 0]
    learned = np.zeros(len(labels))
    if taught:
        logs = []
        for i in taught:
            stats = lexicon.stats[labels[i]]
            var = stats.sigma(cfg.sigma_floor) ** 2 + cfg.sigma_floor**2
            logs.append(float((-((x - stats.mean) ** 2) / (2.0 * var)).sum()))
        learned[taught] = _normalized_exp(np.array(logs))
        beta = min(1.0, lexicon.total_n / cfg.blend_ramp_windows)
    else:
        beta = 0.0

    p = beta * learned + (1.0 - beta) * base
    p = p / p.sum()
    return EmotionEstimate(
        labels=labels,
        distribution=p,
        valence=valence,
        arousal=arousal,
        intensity=energy,
        confidence=entropy_confidence(p),
        subject=subject,
        timestamp=timestamp,
    )


def anchor_weighted_va(
    p: np.ndarray, anchor_matrix: np.ndarray
) -> tuple[float, float]:
    va = p @ anchor_matrix
    return float(va[0]), float(va[1])


def rec2_contextual(
    estimates: list[EmotionEstimate],
    group: GroupFeatures,
    lexicon: EmotionLexicon,
) -> list[EmotionEstimate]:
    """Contextual recommender: pull individual distributions toward the group
    mean in proportion to group cohesion."""
    if len(estimates) <= 1:
        return list(estimates)
    cohesion = 0.5 * group.proximity + 0.5 * max(0.0, group.synchrony)
    if cohesion == 0.0:
        return list(estimates)

    anchor_matrix = lexicon.anchor_matrix()
    g = np.mean([e.distribution for e in estimates], axis=0)
    out = []
    for e in estimates:
        p = (1.0 - cohesion) * e.distribution + cohesion * g
        p = p / p.sum()
        v, a = anchor_weighted_va(p, anchor_matrix)
        out.append(
            EmotionEstimate(
                labels=e.labels,
                distribution=p,
                valence=v,
                arousal=a,
                intensity=e.intensity,
                confidence=entropy_confidence(p),
                subject=e.subject,
                timestamp=e.timestamp,
            )
        )
    return out


@dataclass
class TemporalState:
    """REC3 state: fast/main/slow exponential averages of the consensus."""

    labels: tuple[str, ...] = ()
    fast: np.ndarray | None = None
    main: np.ndarray | None = None
    slow: np.ndarray | None = None
    events: list[TrendShift] = field(default_factory=list)

    def reset(self) -> None:
        self.labels = ()
        self.fast = self.main = self.slow = None
        self.events.clear()

    def align_labels(self, labels: tuple[str, ...]) -> None:
        # taught labels may appear mid-session; existing mass is preserved
        if self.main is None or labels == self.labels:
            self.labels = labels
            return
        index = {l: i for i, l in enumerate(self.labels)}
        for name in ("fast", "main", "slow"):
            old = getattr(self, name)
            grown = np.zeros(len(labels))
            for i, l in enumerate(labels):
                if l in index:
                    grown[i] = old[index[l]]
            setattr(self, name, grown)
        self.labels = labels

    def recommendation(self) -> np.ndarray | None:
        return None if self.main is None else self.main.copy()

    def update(
        self, p: np.ndarray, labels: tuple[str, ...], timestamp: float,
        config: EngineConfig,
    ) -> TrendShift | None:
        self.align_labels(labels)
        if self.main is None:
            self.fast = p.copy()
            self.main = p.copy()
            self.slow = p.copy()
            return None
        for name, half_life in (
            ("fast", config.ema_half_life_fast_s),
            ("main", config.ema_half_life_main_s),
            ("slow", config.ema_half_life_slow_s),
        ):
            decay = 2.0 ** (-config.hop_s / half_life)
            setattr(self, name, decay * getattr(self, name) + (1.0 - decay) * p)
        divergence = js_divergence(self.fast, self.slow)
        if divergence > config.trend_threshold:
            event = TrendShift(timestamp, divergence)
            self.events.append(event)
            return event
        return None


def rec3_longitudinal(
    state: TemporalState, labels: tuple[str, ...], subject: int | str,
    timestamp: float, lexicon: EmotionLexicon,
) -> EmotionEstimate | None:
    """The temporal prior as an estimate; None before any consensus exists."""
    p = state.recommendation()
    if p is None or state.labels != labels:
        return None
    anchor_matrix = lexicon.anchor_matrix()
    v, a = anchor_weighted_va(p, anchor_matrix)
    return EmotionEstimate(
        labels=labels,
        distribution=p,
        valence=v,
        arousal=a,
        intensity=0.0,
        confidence=entropy_confidence(p),
        subject=subject,
        timestamp=timestamp,
    )


def aggregate(
    estimates: list[EmotionEstimate],
    weights: list[float],
    lexicon: EmotionLexicon,
    energy: float,
    subject: int | str,
    timestamp: float,
) -> EmotionEstimate:
    """Weighted convex combination of recommender distributions."""
    if not estimates:
        raise ValueError("nothing to aggregate")
    labels = estimates[0].labels
    for e in estimates[1:]:
        if e.labels != labels:
            raise LabelSetMismatch(f"{e.labels} != {labels}")
    if len(weights) != len(estimates):
        raise ValueError("one weight per estimate")
    total = sum(weights)
    if total <= 0:
        raise ValueError("weights must sum to > 0")
    p = np.zeros(len(labels))
    for w, e in zip(weights, estimates):
        p += (w / total) * e.distribution
    p = p / p.sum()
    v, a = anchor_weighted_va(p, lexicon.anchor_matrix())
    return EmotionEstimate(
        labels=labels,
        distribution=p,
        valence=v,
        arousal=a,
        intensity=energy,
        confidence=entropy_confidence(p),
        subject=subject,
        timestamp=timestamp,
    )


def adapt(
    lexicon: EmotionLexicon,
    top_label: str,
    recent_mean: np.ndarray,
    negative_feedback: bool,
) -> bool:
    """Nudge the current interpretation's prototype toward recent movement,
    unless the participants disagreed with that interpretation."""
    if negative_feedback:
        return False
    return lexicon.nudge_mean(top_label, recent_mean, lexicon.config.adaptation_rate)
