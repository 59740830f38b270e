"""The per-session emotion lexicon: feature prototypes taught by demonstration.

Each label accumulates a running mean and spread over normalized feature
vectors (Welford updates). The four predefined labels always exist; they fall
back to the circumplex baseline until taught. Extra labels can be taught
freely and receive a valence/arousal anchor from the quadrant of their
teaching-time circumplex position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import FEATURE_NAMES, EngineConfig
from .model import PREDEFINED_LABELS, check_label


class SegmentTooShort(ValueError):
    pass


@dataclass
class LabelStats:
    n: int = 0
    mean: np.ndarray = field(default_factory=lambda: np.zeros(len(FEATURE_NAMES)))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(len(FEATURE_NAMES)))
    va_sum: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def observe(self, x: np.ndarray, va: tuple[float, float]) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.n
        self.m2 = self.m2 + delta * (x - self.mean)
        self.va_sum = self.va_sum + np.asarray(va)

    def sigma(self, floor: float) -> np.ndarray:
        if self.n == 0:
            return np.full(len(FEATURE_NAMES), floor)
        return np.maximum(floor, np.sqrt(self.m2 / self.n))

    def mean_va(self) -> tuple[float, float]:
        if self.n == 0:
            return (0.0, 0.0)
        v, a = self.va_sum / self.n
        return (float(v), float(a))

    def copy(self) -> "LabelStats":
        return LabelStats(self.n, self.mean.copy(), self.m2.copy(), self.va_sum.copy())


def quadrant_anchor(
    va: tuple[float, float], anchors: dict[str, tuple[float, float]]
) -> tuple[float, float]:
    """Anchor of the predefined label sharing the point's circumplex quadrant."""
    v, a = va
    for label, (av, aa) in anchors.items():
        if (av > 0) == (v >= 0) and (aa > 0) == (a >= 0):
            return (av, aa)
    return (0.0, 0.0)


class EmotionLexicon:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.stats: dict[str, LabelStats] = {
            label: LabelStats() for label in PREDEFINED_LABELS
        }

    @property
    def labels(self) -> tuple[str, ...]:
        """Active labels: predefined first, then taught labels in teach order."""
        return tuple(self.stats.keys())

    @property
    def total_n(self) -> int:
        return sum(s.n for s in self.stats.values())

    def ensure_label(self, label: str) -> str:
        label = check_label(label)
        if label not in self.stats:
            self.stats[label] = LabelStats()
        return label

    def observe(self, label: str, x: np.ndarray, va: tuple[float, float]) -> None:
        label = self.ensure_label(label)
        self.stats[label].observe(x, va)

    def anchor(self, label: str) -> tuple[float, float]:
        anchors = self.config.anchors
        if label in anchors:
            return anchors[label]
        return quadrant_anchor(self.stats[label].mean_va(), anchors)

    def anchor_matrix(self) -> np.ndarray:
        return np.array([self.anchor(label) for label in self.labels])

    def snapshot(self, label: str) -> LabelStats | None:
        stats = self.stats.get(label)
        return stats.copy() if stats is not None else None

    def restore(self, label: str, snapshot: LabelStats | None) -> None:
        if snapshot is None:
            self.stats.pop(label, None)
        else:
            self.stats[label] = snapshot

    def nudge_mean(self, label: str, target: np.ndarray, rate: float) -> bool:
        """Move a taught prototype toward a recent observation; no-op for
        labels without taught samples (their mean is undefined)."""
        stats = self.stats.get(label)
        if stats is None or stats.n == 0 or rate == 0:
            return False
        stats.mean = (1.0 - rate) * stats.mean + rate * np.asarray(target)
        return True

    def to_dict(self) -> dict:
        return {
            label: {
                "n": s.n,
                "mean": [float(v) for v in s.mean],
                "sigma": [float(v) for v in s.sigma(self.config.sigma_floor)],
                "anchor": [float(v) for v in self.anchor(label)],
            }
            for label, s in self.stats.items()
        }


def teach(
    lexicon: EmotionLexicon,
    label: str,
    timestamps: list[float],
    vectors: list[np.ndarray],
    vas: list[tuple[float, float]],
) -> int:
    """Accumulate one demonstration segment into the lexicon.

    The first second after segment start is a lead-in and is discarded; the
    usable remainder must span the minimum segment length. Returns the number
    of windows absorbed. Raises SegmentTooShort leaving the lexicon unchanged.
    """
    if len(timestamps) != len(vectors):
        raise ValueError("timestamps and vectors must align")
    if not timestamps:
        raise SegmentTooShort("empty segment")
    cfg = lexicon.config
    t0 = timestamps[0]
    usable = [
        (t, x, va)
        for t, x, va in zip(timestamps, vectors, vas)
        if t - t0 >= cfg.teach_lead_in_s
    ]
    if not usable or usable[-1][0] - usable[0][0] < cfg.teach_min_segment_s:
        raise SegmentTooShort(
            f"segment must span >= {cfg.teach_min_segment_s}s after the "
            f"{cfg.teach_lead_in_s}s lead-in"
        )
    label = lexicon.ensure_label(label)
    for _, x, va in usable:
        lexicon.observe(label, x, va)
    return len(usable)
