"""Recording replay: drives the full pipeline from a session recording file,
optionally paced in real time, and writes the session report.

Commands can be scripted alongside the frames as ``[{"t": .., "cmd": ..}, ..]``;
the default script starts the session at the first frame and lets phase
timeouts do the rest. Pacing never changes results: the pipeline is causal
and keyed entirely off stream timestamps.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from .config import EngineConfig
from .model import FrameSource
from .osc import OscSender
from .recording import RecordingParseError, iter_records
from .session import SessionEngine


def load_script(path: str | Path) -> list[dict]:
    script = json.loads(Path(path).read_text())
    if not isinstance(script, list):
        raise ValueError("command script must be a JSON array")
    return sorted(script, key=lambda c: float(c["t"]))


def default_script(first_frame_t: float) -> list[dict]:
    return [{"t": first_frame_t, "cmd": "start"}]


def replay(
    recording_path: str | Path,
    config: EngineConfig,
    script: list[dict] | None = None,
    realtime: bool = False,
    osc_sender: OscSender | None = None,
    max_frames: int | None = None,
    engine: SessionEngine | None = None,
) -> dict:
    """Run a recording through the engine; returns the session report."""
    if engine is None:
        engine = SessionEngine(config, osc_sender=osc_sender)
    pending = list(script) if script is not None else None
    wall_start = None
    stream_start = None
    last_t = None
    frames_done = 0

    with open(recording_path, "r", encoding="utf-8") as fh:
        for line_number, record in iter_records(fh):
            if max_frames is not None and frames_done >= max_frames:
                break
            try:
                t = float(record["t"])
            except (KeyError, TypeError, ValueError) as exc:
                raise RecordingParseError(line_number, f"bad timestamp: {exc}") from exc

            if pending is None:
                pending = default_script(t)
            while pending and float(pending[0]["t"]) <= t:
                cmd = pending.pop(0)
                engine.handle_command(
                    float(cmd["t"]),
                    cmd["cmd"],
                    label=cmd.get("label"),
                    agree=cmd.get("agree"),
                )

            if realtime:
                if wall_start is None:
                    wall_start, stream_start = time.monotonic(), t
                lag = (t - stream_start) - (time.monotonic() - wall_start)
                if lag > 0:
                    time.sleep(lag)

            try:
                engine.submit_record(record, FrameSource.RECORDING)
            except ValueError as exc:
                raise RecordingParseError(line_number, str(exc)) from exc
            last_t = t
            frames_done += 1

    if pending:
        for cmd in pending:
            engine.handle_command(
                float(cmd["t"]), cmd["cmd"],
                label=cmd.get("label"), agree=cmd.get("agree"),
            )
    return engine.finalize(last_t)
