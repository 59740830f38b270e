import numpy as np
import pytest

from kinaffect.features import extract_features
from kinaffect.pipeline import PosePipeline
from kinaffect.synth import (
    DEFAULT_ARCHETYPES,
    GestureArchetype,
    generate_frames,
    synth,
)


def test_same_seed_byte_identical_files(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    synth(DEFAULT_ARCHETYPES["anger"], 2, 5.0, 42, a)
    synth(DEFAULT_ARCHETYPES["anger"], 2, 5.0, 42, b)
    assert a.read_bytes() == b.read_bytes()


def test_different_seeds_differ(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    synth(DEFAULT_ARCHETYPES["anger"], 1, 1.0, 1, a)
    synth(DEFAULT_ARCHETYPES["anger"], 1, 1.0, 2, b)
    assert a.read_bytes() != b.read_bytes()


def test_zero_duration_gives_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    assert synth(DEFAULT_ARCHETYPES["sadness"], 1, 0.0, 0, path) == 0
    assert path.read_text() == ""


def test_frame_rate_and_timestamps():
    frames = list(generate_frames(DEFAULT_ARCHETYPES["relaxation"], 1, 2.0, seed=0))
    assert len(frames) == 60
    ts = [f.timestamp for f in frames]
    assert ts == sorted(ts)
    assert ts[1] - ts[0] == pytest.approx(1 / 30)


def test_parameter_bounds_enforced():
    with pytest.raises(ValueError):
        GestureArchetype("x", amplitude=2.0, frequency=1.0, jerk_level=0,
                         drift=0, arm_spread=0, arm_osc=0, sway=0, noise=0)
    with pytest.raises(ValueError):
        GestureArchetype("x", amplitude=0.1, frequency=9.0, jerk_level=0,
                         drift=0, arm_spread=0, arm_osc=0, sway=0, noise=0)


def _mean_speed(label, seed=11, duration=20.0):
    from kinaffect.config import load_config

    config = load_config()
    pipeline = PosePipeline(config)
    clean = [pipeline.process(f)
             for f in generate_frames(DEFAULT_ARCHETYPES[label], 1, duration, seed=seed)]
    speeds = []
    i = 30
    while i <= len(clean):
        window = clean[i - 30:i]
        try:
            speeds.append(extract_features(window, 0, config).speed)
        except Exception:
            pass
        i += 3
    return float(np.mean(speeds))


def test_happiness_faster_than_low_energy_archetypes():
    happy = _mean_speed("happiness")
    assert happy > _mean_speed("sadness")
    assert happy > _mean_speed("relaxation")


def test_multi_person_streams_are_offset():
    frames = list(generate_frames(DEFAULT_ARCHETYPES["happiness"], 3, 0.2, seed=0))
    xs = [p.xy[:, 0].mean() for p in frames[0].persons]
    assert xs[0] < xs[1] < xs[2]
