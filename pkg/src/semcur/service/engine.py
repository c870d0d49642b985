"""The engine loop: one owner for stream, graph, scene, and the session log.

Both front doors (headless replay and the live protocol server) drive the
same methods here, so scripted and interactive sessions share one code path.
All mutation happens through input events (utterances, interactions, round
controls); everything else is derived and logged at exact times.
"""

from __future__ import annotations

from typing import Callable

from ..errors import ValidationError
from ..extract import extract_subjects
from ..ingest import Utterance
from ..scene import Scene
from ..sense.types import InteractionEvent
from ..session import SessionEvent, SessionLog, snapshot_doc
from ..stream import Stream
from ..topicgraph import TopicGraph
from .config import EngineConfig

LOG_FORMAT_VERSION = 1


class Engine:
    def __init__(self, config: EngineConfig | None = None,
                 on_event: Callable[[SessionEvent], None] | None = None):
        self.config = config or EngineConfig()
        self.on_event = on_event
        self.log = SessionLog()
        self.stream = Stream(self.config.geometry(), self.config.stream_config())
        self.graph = TopicGraph()
        self.scene = Scene()
        self.extract_cfg = self.config.extract_config()
        self.snapshots: list[tuple[str, dict]] = []
        self._utt_seq = 0
        self._last_utt_ts = 0
        self._now = 0
        self._append(0, "meta", {"v": LOG_FORMAT_VERSION,
                                 "config": self.config.to_dict()})

    @classmethod
    def from_log_meta(cls, log: SessionLog) -> "Engine":
        if not log.events or log.events[0].kind != "meta":
            raise ValidationError("log does not start with a meta event")
        return cls(EngineConfig.from_dict(log.events[0].data["config"]))

    # -- log plumbing -----------------------------------------------------------

    def _append(self, at: int, kind: str, data: dict) -> SessionEvent:
        ev = self.log.append(at, kind, data)
        if self.on_event is not None:
            self.on_event(ev)
        return ev

    # -- time ----------------------------------------------------------------------

    def advance(self, to_ms: int) -> None:
        """Process stream admissions/expiries up to to_ms at their exact times."""
        if to_ms < self._now:
            raise ValidationError(f"time regression: {to_ms} < {self._now}")
        report = self.stream.tick(to_ms)
        for t, what, payload in report.timeline:
            if what == "entered":
                p = payload
                self._append(t, "spawn", {
                    "postit_id": p.id, "utterance_id": p.utterance_id,
                    "path": p.path, "requested_at": p.requested_at,
                    "subject": p.subject.to_dict()})
            else:
                self._append(t, "expire", {"postit_id": payload})
        self._now = to_ms

    @property
    def now(self) -> int:
        return self._now

    # -- inputs ------------------------------------------------------------------------

    def feed_utterance(self, text: str, started_at: int, ended_at: int,
                       clamp: bool = False) -> Utterance:
        """Ingest one utterance: log, display, extract, count, spawn."""
        if clamp:
            started_at = max(started_at, self._last_utt_ts)
            ended_at = max(ended_at, started_at)
        elif ended_at < self._last_utt_ts:
            raise ValidationError(
                f"utterance timestamps regress: {ended_at} < {self._last_utt_ts}")
        u = Utterance(self._utt_seq, text, started_at, ended_at)
        self._utt_seq += 1
        self._last_utt_ts = u.ended_at

        self.advance(u.ended_at)
        self._append(u.ended_at, "utterance", {
            "id": u.id, "text": u.text,
            "started_at": u.started_at, "ended_at": u.ended_at})
        self.scene.note_utterance(u)

        subjects = extract_subjects(u, self.extract_cfg)
        self._append(u.ended_at, "subjects_extracted", {
            "utterance_id": u.id, "subjects": [s.to_dict() for s in subjects]})
        self.graph.record(u.id, subjects)
        for delta in self.scene.on_graph_update(self.graph):
            self._append(u.ended_at, "delta", delta.to_dict())
        if subjects:
            self.stream.spawn_collection(subjects, u.id, u.ended_at)
            self.advance(u.ended_at)
        return u

    def say(self, text: str, now: int) -> Utterance:
        """Demo injection: zero-length utterance clamped into monotone order."""
        return self.feed_utterance(text, now, now, clamp=True)

    def apply_interaction(self, ev: InteractionEvent, at: int) -> list:
        """Apply one interaction event and snapshot the resulting scene."""
        self.advance(at)
        self._append(at, "interaction", ev.to_dict())
        deltas = self.scene.apply(ev, self.stream, self.graph, at)
        for delta in deltas:
            self._append(at, "delta", delta.to_dict())
        self.advance(at)  # disband re-entries may be due immediately
        doc = snapshot_doc(self.scene, self.stream, at)
        name = f"snapshot_{len(self.log):06d}.json"
        self.snapshots.append((name, doc))
        self._append(at, "snapshot_ref", {"path": name})
        return deltas

    def interact(self, kind: str, x: float, y: float, w: float | None = None,
                 h: float | None = None, height_mm: float | None = None,
                 from_x: float | None = None, from_y: float | None = None,
                 at: int | None = None, participant: str | None = None) -> list:
        """Abstract interaction command: synthesizes a never-concurrent event."""
        at = self._now if at is None else at
        fp = (w if w is not None else self.config.default_footprint_px,
              h if h is not None else self.config.default_footprint_px)
        ev = InteractionEvent.make(
            kind=kind, display_pos=(x, y), footprint_px=fp,
            height_mm=height_mm if height_mm is not None else self.config.default_height_mm,
            commit_id=0, concurrent_flag=False,
            from_pos=(from_x, from_y) if from_x is not None else None,
            participant=participant)
        return self.apply_interaction(ev, at)

    def control(self, action: str, at: int) -> None:
        if action not in ("start_round", "end_round"):
            raise ValidationError(f"unknown control action {action!r}")
        self.advance(at)
        self._append(at, "control", {"action": action})

    # -- replay ---------------------------------------------------------------------------

    def run_inputs(self, events: list[SessionEvent]) -> None:
        """Re-run logged inputs; derived events are regenerated deterministically."""
        for ev in events:
            if ev.kind == "meta":
                continue
            if ev.kind == "utterance":
                self.feed_utterance(ev.data["text"], ev.data["started_at"],
                                    ev.data["ended_at"])
            elif ev.kind == "interaction":
                self.apply_interaction(InteractionEvent.from_dict(ev.data), ev.at)
            elif ev.kind == "control":
                self.control(ev.data["action"], ev.at)
            else:
                raise ValidationError(f"not an input event: {ev.kind}")

    # -- state ------------------------------------------------------------------------------

    def state_doc(self) -> dict:
        """Canonical final-state document (used for replay equality checks)."""
        return {
            "now": self._now,
            "stream": self.stream.snapshot(self._now),
            "graph": self.graph.snapshot(),
            "scene": self.scene.snapshot(),
        }
