import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinaffect.model import (
    MAX_PERSONS,
    NUM_KEYPOINTS,
    BadLabel,
    FrameError,
    FrameValidator,
    NonMonotonicTimestamp,
    WrongKeypointCount,
    check_label,
)
from kinaffect.synth import BASE_POSE

from .conftest import frame_record


def kp_rows(xy=None, conf=0.9):
    xy = BASE_POSE if xy is None else xy
    return np.column_stack([xy, np.full(len(xy), conf)])


def test_well_formed_frame_accepted():
    v = FrameValidator()
    v.validate(frame_record(0.0, {0: kp_rows()}))
    frame = v.validate(frame_record(0.033, {0: kp_rows()}))
    assert frame.timestamp == 0.033
    assert len(frame.persons) == 1
    assert frame.persons[0].xy.shape == (NUM_KEYPOINTS, 2)


def test_sixteen_keypoints_rejected():
    v = FrameValidator()
    with pytest.raises(WrongKeypointCount):
        v.validate(frame_record(0.0, {0: kp_rows()[:16]}))


def test_four_persons_keeps_three_lowest_ids():
    v = FrameValidator()
    frame = v.validate(frame_record(0.0, {3: kp_rows(), 1: kp_rows(),
                                          0: kp_rows(), 2: kp_rows()}))
    assert [p.person_id for p in frame.persons] == [0, 1, 2]
    events = v.drain_events()
    assert any(e.kind == "persons_dropped" for e in events)


def test_non_monotonic_timestamp_rejected():
    v = FrameValidator()
    v.validate(frame_record(1.0, {0: kp_rows()}))
    with pytest.raises(NonMonotonicTimestamp):
        v.validate(frame_record(1.0, {0: kp_rows()}))
    with pytest.raises(NonMonotonicTimestamp):
        v.validate(frame_record(0.5, {0: kp_rows()}))


def test_slightly_out_of_range_coords_clamped_with_event():
    v = FrameValidator()
    xy = BASE_POSE.copy()
    xy[0] = [1.04, -0.03]
    frame = v.validate(frame_record(0.0, {0: kp_rows(xy)}))
    assert frame.persons[0].xy[0, 0] == 1.0
    assert frame.persons[0].xy[0, 1] == 0.0
    assert any(e.kind == "coords_clamped" for e in v.drain_events())


def test_far_out_of_range_coords_rejected():
    v = FrameValidator()
    xy = BASE_POSE.copy()
    xy[0, 0] = 1.2
    with pytest.raises(FrameError):
        v.validate(frame_record(0.0, {0: kp_rows(xy)}))


def test_confidence_clipped_to_unit_range():
    v = FrameValidator()
    rows = kp_rows(conf=1.5)
    frame = v.validate(frame_record(0.0, {0: rows}))
    assert frame.persons[0].confidence.max() <= 1.0


@settings(max_examples=200, deadline=None)
@given(
    t=st.floats(min_value=0.0, max_value=1e6, allow_nan=False),
    n_persons=st.integers(min_value=0, max_value=5),
    data=st.data(),
)
def test_validated_frames_satisfy_invariants(t, n_persons, data):
    coords = data.draw(
        st.lists(
            st.floats(min_value=-0.05, max_value=1.05, allow_nan=False),
            min_size=n_persons * NUM_KEYPOINTS * 3,
            max_size=n_persons * NUM_KEYPOINTS * 3,
        )
    )
    arr = np.array(coords).reshape(n_persons, NUM_KEYPOINTS, 3) if n_persons else np.empty((0, 17, 3))
    record = frame_record(t, {i: arr[i] for i in range(n_persons)})
    frame = FrameValidator().validate(record)
    assert len(frame.persons) <= MAX_PERSONS
    for p in frame.persons:
        assert np.all(np.isfinite(p.xy))
        assert np.all((p.xy >= 0.0) & (p.xy <= 1.0))
        assert np.all((p.confidence >= 0.0) & (p.confidence <= 1.0))
        assert p.xy.shape == (NUM_KEYPOINTS, 2)


def test_label_validation():
    assert check_label("  wonder ") == "wonder"
    with pytest.raises(BadLabel):
        check_label("")
    with pytest.raises(BadLabel):
        check_label("x" * 33)
