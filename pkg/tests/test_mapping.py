import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinaffect.config import load_config
from kinaffect.mapping import (
    DEFAULT_AUDIO,
    AudioParams,
    build_packets,
    map_audio,
    map_visuals,
    publish,
)
from kinaffect.model import PREDEFINED_LABELS
from kinaffect.osc import OscSender
from kinaffect.recommend import EmotionEstimate, entropy_confidence


def estimate(dist=(1.0, 0.0, 0.0, 0.0), subject=0, valence=0.0, arousal=0.0,
             intensity=0.5):
    p = np.asarray(dist, dtype=float)
    return EmotionEstimate(
        labels=PREDEFINED_LABELS, distribution=p, valence=valence,
        arousal=arousal, intensity=intensity,
        confidence=entropy_confidence(p), subject=subject, timestamp=0.0,
    )


def test_tempo_endpoints(config):
    lo = map_audio(estimate(), 0.0, 0.0, 0.0, DEFAULT_AUDIO, config)
    hi = map_audio(estimate(), 1.0, 0.0, 0.0, DEFAULT_AUDIO, config)
    assert lo.tempo == 60.0
    assert hi.tempo == 140.0


def test_mode_hysteresis(config):
    audio = map_audio(estimate(valence=0.2), 0.5, 0.0, 0.0, DEFAULT_AUDIO, config)
    assert audio.mode == "major"
    audio = map_audio(estimate(valence=-0.05), 0.5, 0.0, 0.0, audio, config)
    assert audio.mode == "major"  # inside the deadband: hold
    audio = map_audio(estimate(valence=-0.2), 0.5, 0.0, 0.0, audio, config)
    assert audio.mode == "minor"


def test_mode_never_chatters_inside_deadband(config):
    audio = AudioParams(100.0, "minor", 0.0, 0.0)
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.uniform(-config.mode_deadband, config.mode_deadband)
        audio = map_audio(estimate(valence=v), 0.5, 0.0, 0.0, audio, config)
        assert audio.mode == "minor"


def test_complexity_is_qom(config):
    audio = map_audio(estimate(), 0.5, 0.3, 0.0, DEFAULT_AUDIO, config)
    assert audio.complexity == pytest.approx(0.3)


def test_dynamics_gamma(config):
    audio = map_audio(estimate(), 0.0, 0.0, 0.5, DEFAULT_AUDIO, config)
    assert audio.dynamics == pytest.approx(0.5**0.7)
    silent = map_audio(estimate(), 0.0, 0.0, 0.0, DEFAULT_AUDIO, config)
    assert silent.dynamics == 0.0


@settings(max_examples=100, deadline=None)
@given(s1=st.floats(0, 1), s2=st.floats(0, 1), e1=st.floats(0, 1), e2=st.floats(0, 1))
def test_audio_mapping_monotone(s1, s2, e1, e2):
    config = load_config()
    a1 = map_audio(estimate(), s1, 0.0, e1, DEFAULT_AUDIO, config)
    a2 = map_audio(estimate(), s2, 0.0, e2, DEFAULT_AUDIO, config)
    if s1 <= s2:
        assert a1.tempo <= a2.tempo
    if e1 <= e2:
        assert a1.dynamics <= a2.dynamics


def test_hue_angle_convention():
    east = map_visuals(estimate(valence=1.0, arousal=0.0), 0.0, 0.0)
    north = map_visuals(estimate(valence=0.0, arousal=1.0), 0.0, 0.0)
    assert east.hue == pytest.approx(0.0)
    assert north.hue == pytest.approx(90.0)


def test_zero_intensity_desaturates():
    vis = map_visuals(estimate(intensity=0.0), 0.5, 0.2)
    assert vis.saturation == 0.0


def test_fluidity_inverse_of_jerk():
    vis = map_visuals(estimate(), 0.5, 0.25)
    assert vis.fluidity == pytest.approx(0.75)


def test_packet_count_one_person(config):
    est = estimate(subject=0)
    vis = map_visuals(est, 0.5, 0.5)
    packets = build_packets([est], {0: (0.5, 0.5)}, estimate(subject="group"),
                            DEFAULT_AUDIO, [vis])
    assert len(packets) == 1 + 1 + 1 + 4 + 4
    addresses = [p.address for p in packets]
    assert "/cv/pose/0" in addresses
    assert "/cv/emotion/0" in addresses
    assert "/cv/group/emotion" in addresses
    assert addresses.count("/cv/audio/tempo") == 1


def test_packet_count_zero_persons(config):
    packets = build_packets([], {}, None, DEFAULT_AUDIO, [])
    assert len(packets) == 4
    assert all(p.address.startswith("/cv/audio/") for p in packets)


def test_publish_counts_sent(config):
    sender = OscSender("127.0.0.1", 19999)
    packets = build_packets([], {}, None, DEFAULT_AUDIO, [])
    assert publish(packets, sender) == 4
    assert publish(packets, None) == 0
    sender.close()


def test_emotion_packet_carries_top_label(config):
    est = estimate(dist=(0.1, 0.7, 0.1, 0.1), subject=2)
    packets = build_packets([est], {2: (0.4, 0.6)}, None, DEFAULT_AUDIO, [])
    emotion = next(p for p in packets if p.address == "/cv/emotion/2")
    assert emotion.arguments[-1] == "relaxation"
