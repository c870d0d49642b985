"""Headless end-to-end runs: transcript + interaction script in, exports out."""

from __future__ import annotations

import json
from pathlib import Path

from ..errors import ValidationError
from ..ingest import open_replay
from ..sense.detect import TangibleSensor
from ..sense.frameio import read_depth
from ..session import (SessionLog, compute_metrics, export_network,
                       interaction_summary, metrics_report, write_snapshot)
from .config import EngineConfig, parse_rounds
from .engine import Engine

OP_TO_KIND = {"place": "placed", "move": "moved", "remove": "removed"}


def load_script(path: str | Path) -> list[dict]:
    """Interaction script: one JSON record per line, `#` comments ignored."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"script line {line_no}: {exc}") from exc
            if "at" not in rec or "cmd" not in rec:
                raise ValidationError(f"script line {line_no}: needs at and cmd")
            records.append(rec)
    records.sort(key=lambda r: r["at"])
    return records


def _apply_script_record(engine: Engine, rec: dict, sensor_box: dict,
                         base_dir: Path) -> None:
    cmd = rec["cmd"]
    at = int(rec["at"])
    if cmd in OP_TO_KIND:
        engine.interact(
            kind=OP_TO_KIND[cmd], x=rec["x"], y=rec["y"],
            w=rec.get("w"), h=rec.get("h"), height_mm=rec.get("height"),
            from_x=rec.get("from_x"), from_y=rec.get("from_y"),
            at=at, participant=rec.get("participant"))
    elif cmd == "say":
        engine.say(rec["text"], at)
    elif cmd == "control":
        engine.control(rec["action"], at)
    elif cmd == "calibrate":
        baseline = read_depth(base_dir / rec["baseline"])
        sensor_box["sensor"] = TangibleSensor.start(
            baseline, rec["corners"],
            (engine.config.display_width, engine.config.display_height),
            cfg=engine.config.sense_config(),
            nadir_uv=tuple(rec["nadir"]) if "nadir" in rec else None)
    elif cmd == "commit_depth":
        sensor = sensor_box.get("sensor")
        if sensor is None:
            raise ValidationError("commit_depth before calibrate")
        frame = read_depth(base_dir / rec["frame"])
        for ev in sensor.commit(frame):
            engine.apply_interaction(ev, at)
    else:
        raise ValidationError(f"unknown script command {cmd!r}")


def run_replay(transcript_path: str | Path, script_path: str | Path | None,
               config: EngineConfig | None = None,
               out_dir: str | Path | None = None) -> dict:
    """Deterministic headless session; returns export payloads and paths."""
    config = config or EngineConfig()
    engine = Engine(config)
    source = open_replay(transcript_path, speed=0.0)
    script = load_script(script_path) if script_path else []
    base_dir = Path(script_path).parent if script_path else Path(".")

    # Merge the utterance and script timelines; utterances first at a tie so
    # spawned content exists before an interaction aimed at it.
    merged: list[tuple[int, int, int, object]] = []
    for i, u in enumerate(source.utterances):
        merged.append((u.ended_at, 0, i, u))
    for i, rec in enumerate(script):
        merged.append((int(rec["at"]), 1, i, rec))
    merged.sort(key=lambda item: (item[0], item[1], item[2]))

    sensor_box: dict = {}
    for _, src, _, item in merged:
        if src == 0:
            engine.feed_utterance(item.text, item.started_at, item.ended_at)
        else:
            _apply_script_record(engine, item, sensor_box, base_dir)

    boundaries = config.round_boundaries()
    horizon = max([boundaries[-1]] + [t for t, *_ in merged]) if merged else boundaries[-1]
    engine.advance(horizon)

    metrics = compute_metrics(engine.log, boundaries)
    network = export_network(engine.log)
    summary = interaction_summary(engine.log, boundaries)
    result = {
        "log": engine.log,
        "state": engine.state_doc(),
        "metrics": metrics,
        "network": network,
        "summary": summary,
        "paths": {},
    }

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = result["paths"]
        engine.log.dump(out / "session.ndjson")
        paths["log"] = out / "session.ndjson"
        (out / "metrics.json").write_text(
            json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
        paths["metrics_json"] = out / "metrics.json"
        (out / "metrics.txt").write_text(metrics_report(metrics))
        paths["metrics_txt"] = out / "metrics.txt"
        (out / "network.graphml").write_text(network.to_graphml())
        paths["network_graphml"] = out / "network.graphml"
        (out / "network.json").write_text(network.to_json())
        paths["network_json"] = out / "network.json"
        (out / "interactions.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")
        paths["interactions"] = out / "interactions.json"
        snap_dir = out / "snapshots"
        for name, doc in engine.snapshots:
            write_snapshot(snap_dir, int(name.split("_")[1].split(".")[0]), doc)
        paths["snapshots"] = snap_dir
    return result


def export(log_path: str | Path, kind: str, out_dir: str | Path,
           rounds: str | None = None) -> list[Path]:
    """Regenerate exports from a stored session log."""
    log = SessionLog.load(log_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if rounds is not None:
        boundaries = parse_rounds(rounds)
    else:
        meta = log.events[0].data if log.events else {}
        boundaries = parse_rounds(meta.get("config", {}).get("rounds", "3x480"))

    if kind == "metrics":
        metrics = compute_metrics(log, boundaries)
        p = out / "metrics.json"
        p.write_text(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
        written.append(p)
        p = out / "metrics.txt"
        p.write_text(metrics_report(metrics))
        written.append(p)
    elif kind == "network":
        network = export_network(log)
        p = out / "network.graphml"
        p.write_text(network.to_graphml())
        written.append(p)
        p = out / "network.json"
        p.write_text(network.to_json())
        written.append(p)
    elif kind == "snapshots":
        from ..session import replay
        engine = replay(log)
        snap_dir = out / "snapshots"
        for name, doc in engine.snapshots:
            write_snapshot(snap_dir, int(name.split("_")[1].split(".")[0]), doc)
        written.append(snap_dir)
    else:
        raise ValidationError(f"unknown export kind {kind!r}")
    return written
