"""Teach-then-recognize evaluation: scripted sessions over the synthetic
gesture archetypes.

Teaches each default archetype from its own seeded stream, then classifies
fresh streams (new seeds) per label, reporting window accuracy, a confusion
matrix, and mean confidence.
"""

from __future__ import annotations

import copy
import time

from .config import EngineConfig
from .model import PREDEFINED_LABELS
from .session import SessionEngine
from .synth import DEFAULT_ARCHETYPES, generate_frames

TEACH_DURATION_S = 16.0
EXPLORE_DURATION_S = 30.0
EXPLORE_SEED_OFFSET = 100


def teach_session(config: EngineConfig, seed: int, duration: float = TEACH_DURATION_S):
    """One session teaching all four archetypes; returns the taught lexicon."""
    engine = SessionEngine(config)
    engine.handle_command(0.0, "start")
    t = 0.0
    for i, label in enumerate(PREDEFINED_LABELS):
        engine.handle_command(t, "teach_start", label=label)
        for frame in generate_frames(
            DEFAULT_ARCHETYPES[label], persons=1, duration=duration,
            seed=seed + i, t_start=t,
        ):
            engine.submit_frame(frame)
        t += duration
        engine.handle_command(t, "teach_end")
    return engine.lexicon


def classify_stream(config: EngineConfig, lexicon, label: str, seed: int,
                    duration: float = EXPLORE_DURATION_S) -> list[dict]:
    """Exploration-only run over a fresh stream; returns per-hop group estimates."""
    engine = SessionEngine(config)
    engine.handle_command(0.0, "start")
    engine.advance_phase(0.0, "eval")   # teaching
    engine.advance_phase(0.0, "eval")   # exploration
    engine.lexicon = copy.deepcopy(lexicon)
    engine.temporal.reset()
    for frame in generate_frames(
        DEFAULT_ARCHETYPES[label], persons=1, duration=duration, seed=seed
    ):
        engine.submit_frame(frame)
    return [h["group"] for h in engine.history]


def run_eval(config: EngineConfig, seed: int = 1, suite: str = "basic") -> dict:
    """The basic suite: teach with seeds seed..seed+3, explore with fresh seeds."""
    if suite != "basic":
        raise ValueError(f"unknown suite {suite!r}")
    started = time.monotonic()
    lexicon = teach_session(config, seed)

    labels = list(PREDEFINED_LABELS)
    confusion = {true: {pred: 0 for pred in labels} for true in labels}
    accuracy = {}
    confidence = {}
    windows = {}
    for i, label in enumerate(labels):
        hops = classify_stream(config, lexicon, label, seed + EXPLORE_SEED_OFFSET + i)
        windows[label] = len(hops)
        hits = 0
        confs = []
        for h in hops:
            predicted = h["top"]
            if predicted in confusion[label]:
                confusion[label][predicted] += 1
            hits += predicted == label
            confs.append(h["confidence"])
        accuracy[label] = hits / len(hops) if hops else 0.0
        confidence[label] = sum(confs) / len(confs) if confs else 0.0

    runtime = time.monotonic() - started
    return {
        "suite": suite,
        "seed": seed,
        "windows_per_label": windows,
        "accuracy": {k: round(v, 4) for k, v in accuracy.items()},
        "mean_confidence": {k: round(v, 4) for k, v in confidence.items()},
        "confusion": confusion,
        "min_accuracy": round(min(accuracy.values()), 4) if accuracy else 0.0,
        "runtime_s": round(runtime, 2),
    }


def format_eval(metrics: dict) -> str:
    labels = list(metrics["confusion"].keys())
    lines = [
        f"suite={metrics['suite']} seed={metrics['seed']} "
        f"runtime={metrics['runtime_s']}s",
        "",
        f"{'label':<12}{'windows':>8}{'accuracy':>10}{'confidence':>12}",
    ]
    for label in labels:
        lines.append(
            f"{label:<12}{metrics['windows_per_label'][label]:>8}"
            f"{metrics['accuracy'][label]:>10.3f}"
            f"{metrics['mean_confidence'][label]:>12.3f}"
        )
    lines.append("")
    header = "true\\pred".ljust(12) + "".join(f"{p[:10]:>11}" for p in labels)
    lines.append(header)
    for true in labels:
        row = true.ljust(12) + "".join(
            f"{metrics['confusion'][true][p]:>11}" for p in labels
        )
        lines.append(row)
    lines.append("")
    lines.append(f"min per-label accuracy: {metrics['min_accuracy']:.3f}")
    return "\n".join(lines)
