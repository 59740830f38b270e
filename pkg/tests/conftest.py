import numpy as np
import pytest

from kinaffect.config import load_config
from kinaffect.model import NUM_KEYPOINTS, FrameSource, PersonPose, PoseFrame
from kinaffect.synth import BASE_POSE


@pytest.fixture
def config():
    return load_config()


def make_person(person_id=0, xy=None, conf=1.0):
    if xy is None:
        xy = BASE_POSE.copy()
    conf_arr = np.full(NUM_KEYPOINTS, conf, dtype=float)
    return PersonPose(person_id, np.asarray(xy, dtype=float), conf_arr,
                      np.ones(NUM_KEYPOINTS, dtype=bool))


def make_frame(t, persons=None, source=FrameSource.SYNTHETIC):
    if persons is None:
        persons = [make_person()]
    return PoseFrame(t, tuple(persons), source)


def still_frames(duration=3.0, fps=30.0, xy=None, person_id=0):
    """A motionless skeleton stream."""
    n = int(duration * fps)
    return [make_frame(i / fps, [make_person(person_id, xy=xy)]) for i in range(n)]


def frame_record(t, persons_kp):
    """Raw recording-format dict: persons_kp is {id: (17,3) array-like}."""
    return {
        "t": t,
        "persons": [
            {"id": pid, "kp": [list(map(float, row)) for row in kp]}
            for pid, kp in persons_kp.items()
        ],
    }
