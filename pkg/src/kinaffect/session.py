"""Session engine: the phase state machine and per-hop processing loop.

Single-writer design: one engine instance owns all mutable state; frames and
commands arrive in stream-time order and drive hops, phase timeouts, teaching
segments, adaptation, and output mapping. Everything is keyed off stream
timestamps, so replaying a recording is bit-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .config import FEATURE_NAMES, EngineConfig
from .cosmos import CosmosSummary, build_summary, encode_payload, payload_url
from .features import (
    InsufficientWindow,
    active_track_ids,
    extract_features,
    extract_group,
    normalize,
)
from .lexicon import EmotionLexicon
from .mapping import DEFAULT_AUDIO, build_packets, map_audio, map_visuals, publish
from .model import FrameSource, FrameValidator, PoseFrame
from .osc import OscSender
from .pipeline import CleanFrame, PosePipeline
from .recommend import (
    EmotionEstimate,
    TemporalState,
    adapt,
    aggregate,
    anchor_weighted_va,
    circumplex_map,
    entropy_confidence,
    rec1_behavioral,
    rec2_contextual,
    rec3_longitudinal,
)


logger = logging.getLogger(__name__)


class SessionPhase(Enum):
    IDLE = "idle"
    PREPARATION = "preparation"
    TEACHING = "teaching"
    EXPLORATION = "exploration"
    COSMOS = "cosmos"


_CHAIN_NEXT = {
    SessionPhase.IDLE: SessionPhase.PREPARATION,
    SessionPhase.PREPARATION: SessionPhase.TEACHING,
    SessionPhase.TEACHING: SessionPhase.EXPLORATION,
    SessionPhase.EXPLORATION: SessionPhase.COSMOS,
    SessionPhase.COSMOS: SessionPhase.IDLE,
}

ACTIVE_PHASES = (SessionPhase.PREPARATION, SessionPhase.TEACHING, SessionPhase.EXPLORATION)


class IllegalTransition(ValueError):
    pass


class WrongPhase(ValueError):
    pass


@dataclass
class _TeachSegment:
    label: str
    started_at: float
    snapshot: object          # LabelStats | None, for rollback
    observed: int = 0
    first_usable_t: float | None = None
    last_usable_t: float | None = None


@dataclass(frozen=True)
class HopResult:
    """Immutable snapshot of one processed hop, for broadcasting."""

    hop: int
    timestamp: float
    phase: SessionPhase
    persons: list[dict]
    group: dict | None
    audio: dict
    group_features: dict | None


class SessionEngine:
    def __init__(self, config: EngineConfig, osc_sender: OscSender | None = None):
        self.config = config
        self.osc_sender = osc_sender
        self.validator = FrameValidator(max_persons=config.max_persons)
        self.pipeline = PosePipeline(config)

        self.phase = SessionPhase.IDLE
        self.phase_entered_at = 0.0
        self.session_id: str | None = None
        self.session_start: float | None = None
        self.current_time = 0.0

        self.lexicon = EmotionLexicon(config)
        self.temporal = TemporalState()
        self.audio = DEFAULT_AUDIO
        self.segment: _TeachSegment | None = None
        self.pending_feedback: bool | None = None

        self.hop_index = 0
        self.next_hop_t: float | None = None
        self.buffer: deque[CleanFrame] = deque()
        self.recent_means: deque[tuple[float, np.ndarray]] = deque()

        self.history: list[dict] = []
        self.group_history: list[EmotionEstimate] = []
        self.feedback_log: list[dict] = []
        self.events: list[dict] = []
        self.phase_log: list[dict] = []
        self.movement_sums = {"speed": 0.0, "qom": 0.0, "n": 0, "max_rom": 0.0}

        self.report: dict | None = None
        self.summary: CosmosSummary | None = None

        self.on_hop: Callable[[HopResult], None] | None = None
        self.on_cosmos: Callable[[dict], None] | None = None

    # ------------------------------------------------------------- events

    def _event(self, t: float, kind: str, detail: str) -> None:
        record = {"t": round(t, 6), "kind": kind, "detail": detail}
        self.events.append(record)
        logger.debug("event %s", record)

    def _drain_pipeline_events(self) -> None:
        for ev in self.validator.drain_events():
            self._event(ev.timestamp, ev.kind, ev.detail)
        for ev in self.pipeline.drain_events():
            self._event(ev.timestamp, ev.kind, ev.detail)

    # ------------------------------------------------------- phase machine

    def _phase_duration(self, phase: SessionPhase) -> float | None:
        return {
            SessionPhase.PREPARATION: self.config.preparation_s,
            SessionPhase.TEACHING: self.config.teaching_s,
            SessionPhase.EXPLORATION: self.config.exploration_s,
        }.get(phase)

    def _enter(self, phase: SessionPhase, t: float, reason: str) -> None:
        if phase is not _CHAIN_NEXT[self.phase] and phase is not SessionPhase.IDLE:
            raise IllegalTransition(f"{self.phase.value} -> {phase.value}")
        if self.phase is SessionPhase.TEACHING:
            self._close_segment(t)
        self.phase = phase
        self.phase_entered_at = t
        self.phase_log.append({"t": round(t, 6), "phase": phase.value, "reason": reason})
        self._event(t, "phase", f"{phase.value} ({reason})")

        if phase is SessionPhase.PREPARATION:
            self._begin_session(t)
        elif phase is SessionPhase.COSMOS:
            self._finish_session(t)

    def _begin_session(self, t: float) -> None:
        self.session_start = t
        seed = f"{t:.6f}:{self.config.digest()}".encode()
        self.session_id = hashlib.sha256(seed).hexdigest()[:32]
        self.lexicon = EmotionLexicon(self.config)
        self.temporal.reset()
        self.history = []
        self.group_history = []
        self.feedback_log = []
        self.movement_sums = {"speed": 0.0, "qom": 0.0, "n": 0, "max_rom": 0.0}
        self.hop_index = 0
        self.next_hop_t = t + self.config.window_s
        self.audio = DEFAULT_AUDIO
        self.pending_feedback = None
        self.report = None
        self.summary = None

    def advance_phase(self, t: float, command: str | None = None) -> None:
        """Explicit transition along the chain; ``command=None`` means timeout."""
        self._enter(_CHAIN_NEXT[self.phase], t, command or "timeout")

    def abort(self, t: float) -> None:
        if self.phase is SessionPhase.TEACHING:
            self._close_segment(t)
        self.phase = SessionPhase.IDLE
        self.phase_entered_at = t
        self.phase_log.append({"t": round(t, 6), "phase": "idle", "reason": "abort"})
        self._event(t, "phase", "idle (abort)")

    def _advance_time(self, t: float) -> None:
        """Run every hop and phase timeout due at or before stream time t, in order."""
        while True:
            duration = self._phase_duration(self.phase)
            deadline = None if duration is None else self.phase_entered_at + duration
            hop_due = (
                self.next_hop_t is not None
                and self.phase in ACTIVE_PHASES
                and self.next_hop_t <= t
            )
            if deadline is not None and deadline <= t and (
                not hop_due or deadline <= self.next_hop_t
            ):
                self.advance_phase(deadline)
                continue
            if hop_due:
                hop_t = self.next_hop_t
                self.next_hop_t = hop_t + self.config.hop_s
                self._process_hop(hop_t)
                continue
            break
        self.current_time = max(self.current_time, t)

    # ------------------------------------------------------------ commands

    def handle_command(
        self, t: float, cmd: str, label: str | None = None, agree: bool | None = None
    ) -> None:
        t = max(t, self.current_time)
        self._advance_time(t)
        if cmd == "start":
            if self.phase is not SessionPhase.IDLE:
                raise IllegalTransition(f"start from {self.phase.value}")
            self.advance_phase(t, "start")
        elif cmd == "teach_start":
            if label is None:
                raise ValueError("teach_start requires a label")
            if self.phase is SessionPhase.PREPARATION:
                self.advance_phase(t, "teach_start")
            if self.phase is not SessionPhase.TEACHING:
                raise WrongPhase(f"teach_start during {self.phase.value}")
            self._close_segment(t)
            self._open_segment(label, t)
        elif cmd == "teach_end":
            if self.phase is not SessionPhase.TEACHING:
                raise WrongPhase(f"teach_end during {self.phase.value}")
            self._close_segment(t)
        elif cmd == "explore":
            if self.phase is not SessionPhase.TEACHING:
                raise IllegalTransition(f"explore from {self.phase.value}")
            self.advance_phase(t, "explore")
        elif cmd == "feedback":
            if agree is None:
                raise ValueError("feedback requires agree")
            self.record_feedback(t, None, agree)
        elif cmd == "end":
            if self.phase is not SessionPhase.EXPLORATION:
                raise IllegalTransition(f"end from {self.phase.value}")
            self.advance_phase(t, "end")
        elif cmd == "reset":
            if self.phase is not SessionPhase.COSMOS:
                raise IllegalTransition(f"reset from {self.phase.value}")
            self.advance_phase(t, "reset")
        elif cmd == "abort":
            self.abort(t)
        else:
            raise ValueError(f"unknown command {cmd!r}")

    def record_feedback(self, t: float, person: int | None, agree: bool) -> None:
        if self.phase is not SessionPhase.EXPLORATION:
            raise WrongPhase(f"feedback during {self.phase.value}")
        self.feedback_log.append(
            {"t": round(t, 6), "person": person, "agree": bool(agree)}
        )
        self.pending_feedback = bool(agree)

    # ------------------------------------------------------------ teaching

    def _open_segment(self, label: str, t: float) -> None:
        label = self.lexicon.ensure_label(label)
        self.segment = _TeachSegment(
            label=label, started_at=t, snapshot=self.lexicon.snapshot(label)
        )
        self._event(t, "teach_start", label)

    def _close_segment(self, t: float) -> None:
        seg = self.segment
        if seg is None:
            return
        self.segment = None
        usable_span = t - seg.started_at - self.config.teach_lead_in_s
        if seg.observed == 0 or usable_span < self.config.teach_min_segment_s:
            self.lexicon.restore(seg.label, seg.snapshot)
            self._event(
                t,
                "teach_discarded",
                f"{seg.label}: segment too short "
                f"({max(0.0, usable_span):.1f}s after lead-in, {seg.observed} windows)",
            )
            return
        self._event(t, "teach_end", f"{seg.label}: {seg.observed} windows")

    def _feed_segment(self, t: float, vectors: list[np.ndarray]) -> None:
        seg = self.segment
        if seg is None or not vectors:
            return
        # windows overlapping the lead-in are discarded entirely
        if t - seg.started_at < self.config.teach_lead_in_s + self.config.window_s:
            return
        for x in vectors:
            v, a, _ = circumplex_map(x)
            self.lexicon.observe(seg.label, x, (v, a))
            seg.observed += 1
        if seg.first_usable_t is None:
            seg.first_usable_t = t
        seg.last_usable_t = t

    # ------------------------------------------------------------- frames

    def submit_record(self, record: dict, source: FrameSource = FrameSource.RECORDING) -> None:
        self.submit_frame(self.validator.validate(record, source))

    def submit_frame(self, frame: PoseFrame) -> None:
        clean = self.pipeline.process(frame)
        self._drain_pipeline_events()
        self.buffer.append(clean)
        horizon = frame.timestamp - 2.0 * self.config.window_s
        while self.buffer and self.buffer[0].timestamp < horizon:
            self.buffer.popleft()
        self._advance_time(frame.timestamp)

    # ------------------------------------------------------------- the hop

    def _process_hop(self, hop_t: float) -> None:
        cfg = self.config
        # grid-aligned boundaries get epsilon slack: exact left-edge frames
        # stay out, exact right-edge frames stay in
        window = [
            cf for cf in self.buffer
            if hop_t - cfg.window_s + 1e-9 < cf.timestamp <= hop_t + 1e-9
        ]
        group_feats = extract_group(window, cfg) if window else None

        vectors: dict[int, np.ndarray] = {}
        raw = {}
        if window:
            for tid in active_track_ids(window, cfg):
                try:
                    fv = extract_features(window, tid, cfg)
                except InsufficientWindow:
                    continue
                vectors[tid] = normalize(fv, cfg.feature_ranges)
                raw[tid] = fv

        persons_out: list[dict] = []
        group_out: dict | None = None

        if vectors:
            labels = self.lexicon.labels
            self.temporal.align_labels(labels)

            rec1 = [
                rec1_behavioral(x, self.lexicon, tid, hop_t)
                for tid, x in sorted(vectors.items())
            ]
            rec2 = rec2_contextual(rec1, group_feats, self.lexicon)
            prior = rec3_longitudinal(self.temporal, labels, "group", hop_t, self.lexicon)

            w1, w2, w3 = cfg.recommender_weights
            finals: list[EmotionEstimate] = []
            for e1, e2 in zip(rec1, rec2):
                ests = [e1, e2]
                weights = [w1, w2]
                if prior is not None:
                    ests.append(prior)
                    weights.append(w3)
                finals.append(
                    aggregate(ests, weights, self.lexicon, e1.intensity, e1.subject, hop_t)
                )

            group_p = np.mean([f.distribution for f in finals], axis=0)
            group_p = group_p / group_p.sum()
            gv, ga = anchor_weighted_va(group_p, self.lexicon.anchor_matrix())
            group_final = EmotionEstimate(
                labels=labels,
                distribution=group_p,
                valence=gv,
                arousal=ga,
                intensity=float(np.mean([f.intensity for f in finals])),
                confidence=entropy_confidence(group_p),
                subject="group",
                timestamp=hop_t,
            )

            shift = self.temporal.update(group_final.distribution, labels, hop_t, cfg)

            if self.phase is SessionPhase.TEACHING:
                self._feed_segment(hop_t, [vectors[tid] for tid in sorted(vectors)])

            mean_x = np.mean([vectors[tid] for tid in sorted(vectors)], axis=0)
            self.recent_means.append((hop_t, mean_x))
            while self.recent_means and self.recent_means[0][0] < hop_t - 1.0:
                self.recent_means.popleft()

            if shift is not None:
                self._event(hop_t, "trend_shift", f"jsd={shift.divergence:.3f}")
                if self.phase is SessionPhase.EXPLORATION:
                    recent = np.mean([x for _, x in self.recent_means], axis=0)
                    negative = self.pending_feedback is False
                    applied = adapt(self.lexicon, group_final.top_label(), recent, negative)
                    self.pending_feedback = None
                    if applied:
                        self._event(hop_t, "adapted", group_final.top_label())
                    elif negative:
                        self._event(hop_t, "adaptation_suppressed", group_final.top_label())

            # output mapping from group means of normalized features
            idx = {name: i for i, name in enumerate(FEATURE_NAMES)}
            self.audio = map_audio(
                group_final,
                float(mean_x[idx["speed"]]),
                float(mean_x[idx["qom"]]),
                float(mean_x[idx["energy"]]),
                self.audio,
                cfg,
            )
            visuals = [
                map_visuals(
                    f,
                    float(vectors[f.subject][idx["speed"]]),
                    float(vectors[f.subject][idx["jerk"]]),
                )
                for f in finals
            ]
            centroids = self._latest_centroids(window, list(vectors))
            packets = build_packets(finals, centroids, group_final, self.audio, visuals)
            publish(packets, self.osc_sender)

            for tid, fv in raw.items():
                self.movement_sums["speed"] += fv.speed
                self.movement_sums["qom"] += fv.qom
                self.movement_sums["n"] += 1
                self.movement_sums["max_rom"] = max(self.movement_sums["max_rom"], fv.rom)

            persons_out = [
                {
                    "id": tid,
                    "features": {
                        name: round(float(vectors[tid][i]), 6)
                        for i, name in enumerate(FEATURE_NAMES)
                    },
                    "emotion": _estimate_dict(final),
                }
                for tid, final in zip(sorted(vectors), finals)
            ]
            group_out = _estimate_dict(group_final)
            self.group_history.append(group_final)
            self.history.append(
                {
                    "hop": self.hop_index,
                    "t": round(hop_t, 6),
                    "phase": self.phase.value,
                    "persons": persons_out,
                    "group": group_out,
                    "audio": _audio_dict(self.audio),
                }
            )
        else:
            packets = build_packets([], {}, None, self.audio, [])
            publish(packets, self.osc_sender)

        if self.on_hop is not None:
            kp = self._latest_keypoints(window)
            self.on_hop(
                HopResult(
                    hop=self.hop_index,
                    timestamp=hop_t,
                    phase=self.phase,
                    persons=[
                        dict(p, kp=kp.get(p["id"], [])) for p in persons_out
                    ],
                    group=group_out,
                    audio=_audio_dict(self.audio),
                    group_features=(
                        None
                        if group_feats is None
                        else {
                            "count": group_feats.count,
                            "proximity": round(group_feats.proximity, 6),
                            "synchrony": round(group_feats.synchrony, 6),
                        }
                    ),
                )
            )
        self.hop_index += 1

    @staticmethod
    def _latest_centroids(
        window: list[CleanFrame], track_ids: list[int]
    ) -> dict[int, tuple[float, float]]:
        out = {}
        for tid in track_ids:
            for cf in reversed(window):
                tf = cf.track(tid)
                if tf is not None and tf.usable.any():
                    c = tf.xy[tf.usable].mean(axis=0)
                    out[tid] = (float(c[0]), float(c[1]))
                    break
        return out

    @staticmethod
    def _latest_keypoints(window: list[CleanFrame]) -> dict[int, list]:
        out: dict[int, list] = {}
        if not window:
            return out
        last = window[-1]
        for tf in last.tracks:
            usable = tf.usable
            out[tf.track_id] = [
                [round(float(tf.xy[i, 0]), 5), round(float(tf.xy[i, 1]), 5),
                 1 if usable[i] else 0]
                for i in range(tf.xy.shape[0])
            ]
        return out

    # ------------------------------------------------------------- wrap-up

    def _finish_session(self, t: float) -> None:
        assert self.session_id is not None and self.session_start is not None
        movement = {
            "mean_speed": (
                self.movement_sums["speed"] / self.movement_sums["n"]
                if self.movement_sums["n"]
                else 0.0
            ),
            "mean_qom": (
                self.movement_sums["qom"] / self.movement_sums["n"]
                if self.movement_sums["n"]
                else 0.0
            ),
            "max_rom": self.movement_sums["max_rom"],
        }
        self.summary = build_summary(
            self.session_id,
            duration_s=t - self.session_start,
            labels=self.lexicon.labels,
            group_history=self.group_history,
            movement=movement,
            config=self.config,
            session_start=self.session_start,
        )
        payload = encode_payload(self.summary)
        url = payload_url(self.summary, self.config.cosmos_base_url)
        self.report = {
            "session_id": self.session_id,
            "config_digest": self.config.digest(),
            "started_at": round(self.session_start, 6),
            "ended_at": round(t, 6),
            "phases": self.phase_log,
            "lexicon": self.lexicon.to_dict(),
            "history": self.history,
            "feedback": self.feedback_log,
            "events": self.events,
            "cosmos": {
                "summary": summary_dict(self.summary),
                "payload": payload,
                "url": url,
            },
        }
        if self.on_cosmos is not None:
            self.on_cosmos(self.report["cosmos"])

    def finalize(self, t: float | None = None) -> dict:
        """End-of-stream wrap-up: walk the remaining chain to Cosmos and
        return the session report."""
        t = self.current_time if t is None else max(t, self.current_time)
        self._advance_time(t)
        if self.phase is SessionPhase.IDLE or self.report is not None:
            if self.report is None:
                self.report = {
                    "session_id": None,
                    "config_digest": self.config.digest(),
                    "phases": self.phase_log,
                    "history": [],
                    "feedback": [],
                    "events": self.events,
                    "cosmos": None,
                }
            return self.report
        while self.phase is not SessionPhase.COSMOS:
            self.advance_phase(t, "finalize")
        return self.report

    def report_json(self) -> str:
        if self.report is None:
            raise RuntimeError("no report yet; finalize the session first")
        return json.dumps(self.report, separators=(",", ":"), allow_nan=False)


def _estimate_dict(est: EmotionEstimate) -> dict:
    return {
        "dist": {l: round(float(p), 9) for l, p in zip(est.labels, est.distribution)},
        "top": est.top_label(),
        "v": round(est.valence, 6),
        "a": round(est.arousal, 6),
        "intensity": round(est.intensity, 6),
        "confidence": round(est.confidence, 6),
    }


def _audio_dict(audio) -> dict:
    return {
        "tempo": round(audio.tempo, 3),
        "mode": audio.mode,
        "complexity": round(audio.complexity, 6),
        "dynamics": round(audio.dynamics, 6),
    }


def summary_dict(summary: CosmosSummary) -> dict:
    return {
        "session_id": summary.session_id,
        "duration_s": round(summary.duration_s, 3),
        "labels": list(summary.labels),
        "integrated_levels": {
            k: round(v, 3) for k, v in summary.integrated_levels.items()
        },
        "movement": {
            "mean_speed": round(summary.mean_speed, 6),
            "mean_qom": round(summary.mean_qom, 6),
            "max_rom": round(summary.max_rom, 6),
        },
        "episodes": [
            {
                "label": e.label,
                "onset": round(e.onset, 3),
                "duration": round(e.duration, 3),
                "intensity": round(e.mean_intensity, 6),
                "v": round(e.mean_valence, 6),
                "a": round(e.mean_arousal, 6),
            }
            for e in summary.episodes
        ],
        "crystals": [
            {
                "label": c.label,
                "size": round(c.size, 6),
                "creation_time": round(c.creation_time, 3),
                "rotation": round(c.rotation, 6),
                "position": [round(v, 6) for v in c.position],
            }
            for c in summary.crystals
        ],
    }
