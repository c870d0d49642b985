"""Session log, deterministic replay, curation metrics, network export.

The log is the single source of truth: utterances, interactions, and round
controls are inputs; extracted subjects, spawns, expiries, deltas, and
snapshots are derived and re-derivable. Serialization is canonical (fixed
field order, 3-decimal floats) so replays are byte-identical.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import ValidationError
from .topicgraph import TopicGraph

INPUT_KINDS = frozenset({"meta", "utterance", "interaction", "control"})
DERIVED_KINDS = frozenset({"subjects_extracted", "spawn", "expire", "delta",
                           "snapshot_ref"})


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    at: int
    kind: str
    data: dict

    def to_json(self) -> str:
        return json.dumps({"seq": self.seq, "at": self.at, "kind": self.kind,
                           "data": self.data},
                          ensure_ascii=False, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        obj = json.loads(line)
        return cls(seq=obj["seq"], at=obj["at"], kind=obj["kind"],
                   data=obj["data"])


class SessionLog:
    def __init__(self):
        self.events: list[SessionEvent] = []

    def append(self, at: int, kind: str, data: dict) -> SessionEvent:
        if kind not in INPUT_KINDS and kind not in DERIVED_KINDS:
            raise ValidationError(f"unknown event kind {kind!r}")
        if self.events and at < self.events[-1].at:
            raise ValidationError(
                f"timestamp regression: {at} < {self.events[-1].at}")
        ev = SessionEvent(seq=len(self.events), at=at, kind=kind, data=data)
        self.events.append(ev)
        return ev

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for ev in self.events:
                fh.write(ev.to_json() + "\n")

    def dumps(self) -> str:
        return "".join(ev.to_json() + "\n" for ev in self.events)

    @classmethod
    def load(cls, path: str | Path) -> "SessionLog":
        log = cls()
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                line = line.strip()
                if not line:
                    continue
                ev = SessionEvent.from_json(line)
                if ev.seq != i:
                    raise ValidationError(f"seq gap at line {i + 1}: got {ev.seq}")
                if log.events and ev.at < log.events[-1].at:
                    raise ValidationError(f"timestamp regression at seq {ev.seq}")
                log.events.append(ev)
        return log

    def inputs(self):
        return [ev for ev in self.events if ev.kind in INPUT_KINDS]

    def __len__(self) -> int:
        return len(self.events)


def replay(log: SessionLog, strict: bool = False):
    """Reconstruct the engine's final state by re-running the log's inputs.

    strict=True additionally verifies that re-derived events (spawns, deltas,
    expiries, ...) match the logged ones line for line.
    """
    from .service.engine import Engine  # composition root; imported lazily

    engine = Engine.from_log_meta(log)
    engine.run_inputs(log.inputs())
    if log.events:
        engine.advance(log.events[-1].at)  # regenerate trailing expiries
    if strict:
        ours = engine.log.dumps()
        theirs = log.dumps()
        if ours != theirs:
            raise ValidationError("replay diverged from the recorded log")
    return engine


# -- metrics --------------------------------------------------------------------


@dataclass
class RoundMetrics:
    label: str
    words_transcribed: int = 0
    content_presented: int = 0
    variety: int = 0
    duplicates: int = 0
    content_curated: int = 0
    curated_ratio: float = 0.0
    presented_once_ratio: float = 0.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "words_transcribed": self.words_transcribed,
            "content_presented": self.content_presented,
            "variety": self.variety,
            "duplicates": self.duplicates,
            "content_curated": self.content_curated,
            "curated_ratio": round(self.curated_ratio, 3),
            "presented_once_ratio": round(self.presented_once_ratio, 3),
        }


@dataclass
class Metrics:
    total: RoundMetrics
    rounds: list[RoundMetrics] = field(default_factory=list)
    token_count_hist: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"total": self.total.to_dict(),
                "rounds": [r.to_dict() for r in self.rounds],
                "subject_token_counts": {str(k): v for k, v in
                                         sorted(self.token_count_hist.items())}}


def _bucket(at: int, boundaries: list[int]) -> int | None:
    """Round index for a timestamp, boundaries as [start0, start1, ..., end]."""
    for i in range(len(boundaries) - 1):
        if boundaries[i] <= at < boundaries[i + 1]:
            return i
    return None


def _fill(metrics: RoundMetrics, words: int, spawns: list[str],
          curated: set[int]) -> None:
    metrics.words_transcribed = words
    metrics.content_presented = len(spawns)
    counts = Counter(spawns)
    metrics.variety = len(counts)
    metrics.duplicates = metrics.content_presented - metrics.variety
    metrics.content_curated = len(curated)
    metrics.curated_ratio = metrics.content_curated / max(metrics.content_presented, 1)
    once = sum(1 for c in counts.values() if c == 1)
    metrics.presented_once_ratio = once / max(metrics.variety, 1)


def compute_metrics(log: SessionLog, round_boundaries: list[int]) -> Metrics:
    """Fig-12-style counts; concurrent-flagged deltas are excluded from curation."""
    words_total = 0
    spawns_total: list[str] = []
    curated_total: set[int] = set()
    hist: dict[int, int] = {}
    n_rounds = max(len(round_boundaries) - 1, 0)
    words_r = [0] * n_rounds
    spawns_r: list[list[str]] = [[] for _ in range(n_rounds)]
    curated_r: list[set[int]] = [set() for _ in range(n_rounds)]

    for ev in log.events:
        r = _bucket(ev.at, round_boundaries) if n_rounds else None
        if ev.kind == "utterance":
            n = len(ev.data["text"].split())
            words_total += n
            if r is not None:
                words_r[r] += n
        elif ev.kind == "spawn":
            key = ev.data["subject"]["key"]
            spawns_total.append(key)
            tc = ev.data["subject"]["token_count"]
            hist[tc] = hist.get(tc, 0) + 1
            if r is not None:
                spawns_r[r].append(key)
        elif ev.kind == "delta" and not ev.data.get("concurrent", False):
            if ev.data["kind"] in ("pinned", "contextualised"):
                pid = ev.data["postit_id"]
                curated_total.add(pid)
                if r is not None:
                    curated_r[r].add(pid)

    total = RoundMetrics(label="total")
    _fill(total, words_total, spawns_total, curated_total)
    rounds = []
    for i in range(n_rounds):
        rm = RoundMetrics(label=f"round {i + 1}")
        _fill(rm, words_r[i], spawns_r[i], curated_r[i])
        rounds.append(rm)
    return Metrics(total=total, rounds=rounds, token_count_hist=hist)


def metrics_report(metrics: Metrics) -> str:
    cols = ["words_transcribed", "content_presented", "variety", "duplicates",
            "content_curated", "curated_ratio", "presented_once_ratio"]
    rows = [metrics.total] + metrics.rounds
    width = max(len(r.label) for r in rows) + 2
    lines = [" " * width + "  ".join(f"{c:>19}" for c in cols)]
    for r in rows:
        d = r.to_dict()
        lines.append(f"{r.label:<{width}}" + "  ".join(f"{d[c]:>19}" for c in cols))
    lines.append("")
    lines.append("subject token counts: " + ", ".join(
        f"{k} -> {v}" for k, v in sorted(metrics.token_count_hist.items())))
    return "\n".join(lines) + "\n"


# -- network export -----------------------------------------------------------------


@dataclass
class NetworkExport:
    nodes: list[dict]  # key, text, count, curated
    edges: list[dict]  # a, b, weight

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "edges": self.edges}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2,
                          sort_keys=True) + "\n"

    def to_graphml(self) -> str:
        out = ['<?xml version="1.0" encoding="UTF-8"?>',
               '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
               '  <key id="d0" for="node" attr.name="text" attr.type="string"/>',
               '  <key id="d1" for="node" attr.name="count" attr.type="int"/>',
               '  <key id="d2" for="node" attr.name="curated" attr.type="boolean"/>',
               '  <key id="d3" for="edge" attr.name="weight" attr.type="int"/>',
               '  <graph id="topics" edgedefault="undirected">']
        for n in self.nodes:
            out.append(f'    <node id="{escape(n["key"], {chr(34): "&quot;"})}">')
            out.append(f'      <data key="d0">{escape(n["text"])}</data>')
            out.append(f'      <data key="d1">{n["count"]}</data>')
            out.append(f'      <data key="d2">{"true" if n["curated"] else "false"}</data>')
            out.append('    </node>')
        for i, e in enumerate(self.edges):
            a = escape(e["a"], {chr(34): "&quot;"})
            b = escape(e["b"], {chr(34): "&quot;"})
            out.append(f'    <edge id="e{i}" source="{a}" target="{b}">')
            out.append(f'      <data key="d3">{e["weight"]}</data>')
            out.append('    </edge>')
        out.append('  </graph>')
        out.append('</graphml>')
        return "\n".join(out) + "\n"


def graph_from_log(log: SessionLog) -> TopicGraph:
    graph = TopicGraph()
    from .extract import Subject
    for ev in log.events:
        if ev.kind == "subjects_extracted":
            graph.record(ev.data["utterance_id"],
                         [Subject.from_dict(d) for d in ev.data["subjects"]])
    return graph


def curated_keys(log: SessionLog) -> set[str]:
    """Keys ever attached to an annotation through non-flagged deltas."""
    keys = set()
    for ev in log.events:
        if ev.kind == "delta" and not ev.data.get("concurrent", False):
            if ev.data["kind"] in ("pinned", "contextualised"):
                keys.add(ev.data["subject"]["key"])
    return keys


def export_network(log: SessionLog, min_component_size: int = 6,
                   highlight_curated: bool = True) -> NetworkExport:
    """Topic network with small components dropped and curated keys flagged."""
    graph = graph_from_log(log)
    kept = graph.components(min_component_size)
    kept_keys = {k for comp in kept for k in comp}
    marked = curated_keys(log) if highlight_curated else set()
    nodes = [{"key": k, "text": graph.display_text.get(k, k),
              "count": graph.nodes[k], "curated": k in marked}
             for k in sorted(kept_keys)]
    edges = [{"a": a, "b": b, "weight": w}
             for (a, b), w in sorted(graph.edges.items())
             if a in kept_keys and b in kept_keys]
    return NetworkExport(nodes=nodes, edges=edges)


# -- snapshots -----------------------------------------------------------------------


def snapshot_doc(scene, stream, now: int) -> dict:
    """Full scene document captured after an interaction."""
    return {"at": now, "scene": scene.snapshot(), "stream": stream.snapshot(now)}


def write_snapshot(out_dir: str | Path, seq: int, doc: dict) -> str:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = f"snapshot_{seq:06d}.json"
    (out / name).write_text(json.dumps(doc, ensure_ascii=False, sort_keys=True,
                                       separators=(",", ":")) + "\n",
                            encoding="utf-8")
    return name


def interaction_summary(log: SessionLog, round_boundaries: list[int]) -> dict:
    """Per-participant share of non-flagged interactions, per round."""
    n_rounds = max(len(round_boundaries) - 1, 0)
    counts: list[dict[str, int]] = [{} for _ in range(max(n_rounds, 1))]
    for ev in log.events:
        if ev.kind != "interaction" or ev.data.get("concurrent", False):
            continue
        slot = ev.data.get("participant") or "unattributed"
        r = _bucket(ev.at, round_boundaries) if n_rounds else None
        idx = r if r is not None else 0
        counts[idx][slot] = counts[idx].get(slot, 0) + 1
    out = {}
    for i, per_round in enumerate(counts):
        total = sum(per_round.values())
        out[f"round {i + 1}"] = {
            slot: {"count": c, "share": round(c / total, 3) if total else 0.0}
            for slot, c in sorted(per_round.items())}
    return out
