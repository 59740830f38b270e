"""Session recording format: line-delimited JSON, one frame per line.

Each line is ``{"t": <seconds>, "persons": [{"id": <int>, "kp": [[x,y,conf] x 17]}]}``
with fields in exactly that order (golden-file stability). The format is
append-friendly, replayable, and diffable.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator

from .model import FrameSource, FrameValidator, PoseFrame


class RecordingParseError(ValueError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def frame_to_record(frame: PoseFrame) -> dict:
    return {
        "t": frame.timestamp,
        "persons": [
            {
                "id": p.person_id,
                "kp": [
                    [float(p.xy[i, 0]), float(p.xy[i, 1]), float(p.confidence[i])]
                    for i in range(p.xy.shape[0])
                ],
            }
            for p in frame.persons
        ],
    }


def frame_to_line(frame: PoseFrame) -> str:
    return json.dumps(frame_to_record(frame), separators=(",", ":"))


def write_recording(frames: Iterable[PoseFrame], path: str | Path) -> int:
    """Write frames as JSONL; returns the number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for frame in frames:
            fh.write(frame_to_line(frame) + "\n")
            count += 1
    return count


def iter_records(fh: IO[str]) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) pairs, raising RecordingParseError on bad lines."""
    for line_number, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordingParseError(line_number, f"invalid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise RecordingParseError(line_number, "frame record must be a JSON object")
        yield line_number, record


def read_recording(
    path: str | Path, source: FrameSource = FrameSource.RECORDING
) -> list[PoseFrame]:
    """Parse and validate a full recording file."""
    validator = FrameValidator()
    frames: list[PoseFrame] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, record in iter_records(fh):
            try:
                frames.append(validator.validate(record, source))
            except ValueError as exc:
                raise RecordingParseError(line_number, str(exc)) from exc
    return frames
