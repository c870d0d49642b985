"""Explicit curation loop: tangible annotations, links, and dispatch rules.

Interaction events map onto pin / move / remove / isolate / contextualise
effects. The link set is always the closure of the topic graph's relatedness
over non-isolated annotation pairs; refresh_links recomputes it from scratch
and apply() keeps the live set equal to that recomputation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .extract import Subject
from .ingest import Utterance
from .sense.types import InteractionEvent
from .stream import Stream
from .topicgraph import TopicGraph

RING_MARGIN_PX = 8.0
STACK_OVERLAP = 0.70
STACK_HEIGHT_TOL = 0.25


@dataclass
class StackedArtifact:
    artifact_id: int
    footprint_px: tuple[float, float]
    height_mm: float


@dataclass
class TangibleAnnotation:
    artifact_id: int
    position: tuple[float, float]
    footprint_px: tuple[float, float]
    height_mm: float
    primary: Subject
    primary_utterance: int
    primary_postit: int
    context: list[tuple[Subject, int, int]] = field(default_factory=list)  # subject, utt, postit
    stacked: StackedArtifact | None = None

    @property
    def isolated(self) -> bool:
        return self.stacked is not None

    @property
    def ring_radius_px(self) -> float:
        w, h = self.footprint_px
        return math.hypot(w / 2.0, h / 2.0) + RING_MARGIN_PX

    def subject_keys(self) -> list[str]:
        keys = [self.primary.key]
        keys.extend(s.key for s, _, _ in self.context)
        return keys

    def to_dict(self) -> dict:
        return {
            "artifact_id": self.artifact_id,
            "x": round(self.position[0], 3),
            "y": round(self.position[1], 3),
            "w": round(self.footprint_px[0], 3),
            "h": round(self.footprint_px[1], 3),
            "height_mm": round(self.height_mm, 3),
            "ring_radius_px": round(self.ring_radius_px, 3),
            "primary": self.primary.to_dict(),
            "primary_utterance": self.primary_utterance,
            "context": [{"subject": s.to_dict(), "utterance_id": u, "postit_id": p}
                        for s, u, p in self.context],
            "isolated": self.isolated,
        }


@dataclass
class InertArtifact:
    artifact_id: int
    position: tuple[float, float]
    footprint_px: tuple[float, float]
    height_mm: float


@dataclass(frozen=True)
class SceneDelta:
    kind: str
    concurrent: bool = False
    artifact_id: int | None = None
    postit_id: int | None = None
    subject: Subject | None = None
    position: tuple[float, float] | None = None
    from_position: tuple[float, float] | None = None
    links_added: tuple[tuple[int, int], ...] = ()
    links_removed: tuple[tuple[int, int], ...] = ()
    reinserted: tuple[int, ...] = ()
    reason: str | None = None
    participant: str | None = None
    annotation: dict | None = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "concurrent": self.concurrent}
        if self.artifact_id is not None:
            d["artifact_id"] = self.artifact_id
        if self.postit_id is not None:
            d["postit_id"] = self.postit_id
        if self.subject is not None:
            d["subject"] = self.subject.to_dict()
        if self.position is not None:
            d["x"], d["y"] = round(self.position[0], 3), round(self.position[1], 3)
        if self.from_position is not None:
            d["from_x"] = round(self.from_position[0], 3)
            d["from_y"] = round(self.from_position[1], 3)
        if self.links_added:
            d["links_added"] = [list(p) for p in self.links_added]
        if self.links_removed:
            d["links_removed"] = [list(p) for p in self.links_removed]
        if self.reinserted:
            d["reinserted"] = list(self.reinserted)
        if self.reason is not None:
            d["reason"] = self.reason
        if self.participant is not None:
            d["participant"] = self.participant
        if self.annotation is not None:
            d["annotation"] = self.annotation
        return d


def _rect(center: tuple[float, float], size: tuple[float, float]):
    return (center[0] - size[0] / 2.0, center[1] - size[1] / 2.0,
            center[0] + size[0] / 2.0, center[1] + size[1] / 2.0)


def _point_in_rect(p, rect) -> bool:
    return rect[0] <= p[0] <= rect[2] and rect[1] <= p[1] <= rect[3]


def _overlap_frac(rect_a, rect_b) -> float:
    """Intersection area as a fraction of rect_a's area."""
    w = min(rect_a[2], rect_b[2]) - max(rect_a[0], rect_b[0])
    h = min(rect_a[3], rect_b[3]) - max(rect_a[1], rect_b[1])
    if w <= 0 or h <= 0:
        return 0.0
    area_a = (rect_a[2] - rect_a[0]) * (rect_a[3] - rect_a[1])
    return (w * h) / area_a if area_a > 0 else 0.0


class Scene:
    def __init__(self):
        self.annotations: dict[int, TangibleAnnotation] = {}
        self.inert: dict[int, InertArtifact] = {}
        self.links: dict[tuple[int, int], frozenset[int]] = {}
        self.recent_utterances: deque[Utterance] = deque(maxlen=3)
        self._next_artifact = 0

    # -- matching helpers ------------------------------------------------------

    def _annotation_under(self, pos) -> TangibleAnnotation | None:
        """Nearest annotation whose center is within its footprint diagonal."""
        best, best_d = None, None
        for ann in sorted(self.annotations.values(), key=lambda a: a.artifact_id):
            d = math.hypot(pos[0] - ann.position[0], pos[1] - ann.position[1])
            if d <= math.hypot(*ann.footprint_px) and (best_d is None or d < best_d):
                best, best_d = ann, d
        return best

    def _inert_under(self, pos) -> InertArtifact | None:
        best, best_d = None, None
        for art in sorted(self.inert.values(), key=lambda a: a.artifact_id):
            d = math.hypot(pos[0] - art.position[0], pos[1] - art.position[1])
            if d <= math.hypot(*art.footprint_px) and (best_d is None or d < best_d):
                best, best_d = art, d
        return best

    def _stack_target(self, ev: InteractionEvent) -> TangibleAnnotation | None:
        # An already-isolated annotation has its one stack slot taken; further
        # placements on top fall through and are tracked as inert artifacts.
        ev_rect = _rect(ev.display_pos, ev.footprint_px)
        for ann in sorted(self.annotations.values(), key=lambda a: a.artifact_id):
            if ann.stacked is not None:
                continue
            ann_rect = _rect(ann.position, ann.footprint_px)
            if _point_in_rect(ev.display_pos, ann_rect) \
                    and _overlap_frac(ev_rect, ann_rect) >= STACK_OVERLAP:
                return ann
        return None

    def _stacked_match(self, ev: InteractionEvent) -> TangibleAnnotation | None:
        for ann in sorted(self.annotations.values(), key=lambda a: a.artifact_id):
            if ann.stacked is None:
                continue
            rect = _rect(ann.position, ann.stacked.footprint_px)
            if not _point_in_rect(ev.display_pos, rect):
                continue
            hs, he = ann.stacked.height_mm, ev.height_mm
            if abs(hs - he) <= STACK_HEIGHT_TOL * max(hs, he):
                return ann
        return None

    # -- link maintenance --------------------------------------------------------

    def refresh_links(self, graph: TopicGraph) -> dict[tuple[int, int], frozenset[int]]:
        """Recompute the full link set from the topic graph (the oracle path)."""
        anns = [a for a in self.annotations.values() if not a.isolated]
        links: dict[tuple[int, int], frozenset[int]] = {}
        for i, a in enumerate(anns):
            for b in anns[i + 1:]:
                support: set[int] = set()
                for ka in a.subject_keys():
                    for kb in b.subject_keys():
                        if graph.related(ka, kb):
                            support |= graph.supporting_utterances(ka, kb)
                if support:
                    pair = (min(a.artifact_id, b.artifact_id),
                            max(a.artifact_id, b.artifact_id))
                    links[pair] = frozenset(support)
        return links

    def _relink(self, graph: TopicGraph) -> tuple[tuple, tuple]:
        new_links = self.refresh_links(graph)
        added = tuple(sorted(set(new_links) - set(self.links)))
        removed = tuple(sorted(set(self.links) - set(new_links)))
        self.links = new_links
        return added, removed

    def _link_delta(self, graph: TopicGraph, concurrent: bool) -> list[SceneDelta]:
        added, removed = self._relink(graph)
        if added or removed:
            return [SceneDelta(kind="links_changed", concurrent=concurrent,
                               links_added=added, links_removed=removed)]
        return []

    def on_graph_update(self, graph: TopicGraph) -> list[SceneDelta]:
        """New co-occurrences can link existing annotations between interactions."""
        return self._link_delta(graph, concurrent=False)

    # -- event application ---------------------------------------------------------

    def apply(self, ev: InteractionEvent, stream: Stream, graph: TopicGraph,
              now: int) -> list[SceneDelta]:
        """Dispatch one interaction event; never raises on valid events."""
        if ev.kind == "placed":
            return self._apply_placed(ev, stream, graph, now)
        if ev.kind == "moved":
            return self._apply_moved(ev, stream, graph, now)
        if ev.kind == "removed":
            return self._apply_removed(ev, stream, graph, now)
        return [SceneDelta(kind="rejected", reason="unknown_kind",
                           concurrent=ev.concurrent_flag, participant=ev.participant)]

    def _new_artifact_id(self) -> int:
        aid = self._next_artifact
        self._next_artifact += 1
        return aid

    def _apply_placed(self, ev, stream, graph, now, artifact_id=None) -> list[SceneDelta]:
        con = ev.concurrent_flag

        # (a) stacking on an annotation isolates it and severs its links
        target = self._stack_target(ev)
        if target is not None:
            aid = artifact_id if artifact_id is not None else self._new_artifact_id()
            target.stacked = StackedArtifact(aid, ev.footprint_px, ev.height_mm)
            deltas = [SceneDelta(kind="isolated", artifact_id=target.artifact_id,
                                 concurrent=con, participant=ev.participant)]
            deltas.extend(self._link_delta(graph, con))
            return deltas

        # (b) placement over a flowing post-it pins it
        hit = stream.find_at(ev.display_pos, now)
        if hit is not None:
            p = stream.detach(hit)
            aid = artifact_id if artifact_id is not None else self._new_artifact_id()
            ann = TangibleAnnotation(
                artifact_id=aid, position=ev.display_pos,
                footprint_px=ev.footprint_px, height_mm=ev.height_mm,
                primary=p.subject, primary_utterance=p.utterance_id,
                primary_postit=p.id)
            self.annotations[aid] = ann
            deltas = [SceneDelta(kind="pinned", artifact_id=aid, postit_id=p.id,
                                 subject=p.subject, position=ev.display_pos,
                                 concurrent=con, participant=ev.participant,
                                 annotation=ann.to_dict())]
            deltas.extend(self._link_delta(graph, con))
            return deltas

        # (c) placement on empty space registers an inert artifact
        aid = artifact_id if artifact_id is not None else self._new_artifact_id()
        self.inert[aid] = InertArtifact(aid, ev.display_pos, ev.footprint_px, ev.height_mm)
        return [SceneDelta(kind="inert_placed", artifact_id=aid,
                           position=ev.display_pos, concurrent=con,
                           participant=ev.participant)]

    def _contextualise(self, ann, stream, graph, now, con, participant) -> list[SceneDelta]:
        rect = _rect(ann.position, ann.footprint_px)
        existing = set(ann.subject_keys())
        candidates = []
        for p in stream.flowing():
            x, y = stream.position_at(p, now)
            if _point_in_rect((x, y), rect) and p.subject.key not in existing:
                d = math.hypot(x - ann.position[0], y - ann.position[1])
                candidates.append((d, p.id, p))
        if not candidates:
            return []
        _, _, chosen = min(candidates, key=lambda c: (c[0], c[1]))
        stream.detach(chosen.id)
        ann.context.append((chosen.subject, chosen.utterance_id, chosen.id))
        deltas = [SceneDelta(kind="contextualised", artifact_id=ann.artifact_id,
                             postit_id=chosen.id, subject=chosen.subject,
                             concurrent=con, participant=participant,
                             annotation=ann.to_dict())]
        deltas.extend(self._link_delta(graph, con))
        return deltas

    def _apply_moved(self, ev, stream, graph, now) -> list[SceneDelta]:
        con = ev.concurrent_flag
        if ev.from_pos is None:
            return [SceneDelta(kind="rejected", reason="moved_without_origin",
                               concurrent=con, participant=ev.participant)]

        # (d) moving an annotation repositions it and may contextualise
        ann = self._annotation_under(ev.from_pos)
        if ann is not None:
            old = ann.position
            ann.position = ev.display_pos
            deltas = [SceneDelta(kind="annotation_moved", artifact_id=ann.artifact_id,
                                 position=ev.display_pos, from_position=old,
                                 concurrent=con, participant=ev.participant)]
            deltas.extend(self._contextualise(ann, stream, graph, now, con,
                                              ev.participant))
            deltas.extend(self._link_delta(graph, con))
            return deltas

        # (e) moving an inert artifact re-evaluates the placement rules
        art = self._inert_under(ev.from_pos)
        if art is not None:
            del self.inert[art.artifact_id]
            placed = InteractionEvent.make(
                "placed", ev.display_pos, art.footprint_px, art.height_mm,
                ev.commit_id, concurrent_flag=con, participant=ev.participant)
            return self._apply_placed(placed, stream, graph, now,
                                      artifact_id=art.artifact_id)

        return [SceneDelta(kind="rejected", reason="unmatched_event",
                           concurrent=con, participant=ev.participant)]

    def _apply_removed(self, ev, stream, graph, now) -> list[SceneDelta]:
        con = ev.concurrent_flag

        # (f) lifting the stack top un-isolates the annotation
        ann = self._stacked_match(ev)
        if ann is not None:
            ann.stacked = None
            deltas = [SceneDelta(kind="unisolated", artifact_id=ann.artifact_id,
                                 concurrent=con, participant=ev.participant)]
            deltas.extend(self._link_delta(graph, con))
            return deltas

        # (g) removing the artifact disbands the annotation back into the stream
        ann = self._annotation_under(ev.display_pos)
        if ann is not None:
            del self.annotations[ann.artifact_id]
            stream.consume(ann.primary_postit)
            for _, _, pid in ann.context:
                stream.consume(pid)
            reinserted = [stream.reinsert(ann.primary, ann.primary_utterance, now)]
            for subject, utt, _ in ann.context:
                reinserted.append(stream.reinsert(subject, utt, now))
            deltas = [SceneDelta(kind="disbanded", artifact_id=ann.artifact_id,
                                 reinserted=tuple(reinserted), concurrent=con,
                                 participant=ev.participant)]
            deltas.extend(self._link_delta(graph, con))
            return deltas

        # (h) removing an inert artifact just drops it
        art = self._inert_under(ev.display_pos)
        if art is not None:
            del self.inert[art.artifact_id]
            return [SceneDelta(kind="inert_removed", artifact_id=art.artifact_id,
                               concurrent=con, participant=ev.participant)]

        # (i) nothing matched
        return [SceneDelta(kind="rejected", reason="unmatched_event",
                           concurrent=con, participant=ev.participant)]

    # -- utterance display ---------------------------------------------------------

    def note_utterance(self, u: Utterance) -> None:
        self.recent_utterances.append(u)

    # -- snapshots -------------------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "annotations": [self.annotations[k].to_dict()
                            for k in sorted(self.annotations)],
            "inert": [{"artifact_id": a.artifact_id,
                       "x": round(a.position[0], 3), "y": round(a.position[1], 3),
                       "w": round(a.footprint_px[0], 3),
                       "h": round(a.footprint_px[1], 3),
                       "height_mm": round(a.height_mm, 3)}
                      for a in (self.inert[k] for k in sorted(self.inert))],
            "links": [{"a": a, "b": b, "supporting_utterances": sorted(utts)}
                      for (a, b), utts in sorted(self.links.items())],
            "recent_utterances": [
                {"id": u.id, "text": u.text, "started_at": u.started_at,
                 "ended_at": u.ended_at}
                for u in self.recent_utterances],
        }
