"""One-time generator for the bundled demo interaction script.

Drives the engine over the demo transcript and emits interactions that land
on real flowing post-its, so the frozen script exercises pinning, moving,
contextualising, isolating and disbanding deterministically.
Regenerate with:
  python tools/make_sample_script.py > src/semcur/data/sample_script.ndjson
"""
import json

from semcur.ingest import open_replay
from semcur.service.config import EngineConfig
from semcur.service.engine import Engine

PARTICIPANTS = ["p1", "p2", "p3", "p4"]

engine = Engine(EngineConfig())
utterances = open_replay("src/semcur/data/sample_transcript.ndjson").utterances
lines = []
who = 0


def emit(rec):
    lines.append(json.dumps(rec))


def feed_until(t):
    while utterances and utterances[0].ended_at <= t:
        u = utterances.pop(0)
        engine.feed_utterance(u.text, u.started_at, u.ended_at)
    engine.advance(t)


def pin(t, prefer=None, w=60, h=60, height=40):
    """Place an artifact on a flowing post-it at time t."""
    global who
    feed_until(t)
    flows = engine.stream.flowing()
    target = None
    if prefer:
        for p in flows:
            if prefer in p.subject.key:
                target = p
                break
    if target is None and flows:
        target = flows[len(flows) // 2]
    if target is None:
        raise SystemExit(f"no flowing post-it at {t}")
    x, y = engine.stream.position_at(target, t)
    rec = {"at": t, "cmd": "place", "x": round(x, 1), "y": round(y, 1),
           "w": w, "h": h, "height": height,
           "participant": PARTICIPANTS[who % len(PARTICIPANTS)]}
    who += 1
    emit(rec)
    engine.interact("placed", rec["x"], rec["y"], w=w, h=h, height_mm=height,
                    at=t, participant=rec["participant"])
    aid = max(engine.scene.annotations)
    return engine.scene.annotations[aid]


def contextualise(t, ann):
    """Drag an annotation onto the nearest flowing post-it."""
    global who
    feed_until(t)
    flows = engine.stream.flowing()
    fresh = [p for p in flows
             if p.subject.key not in set(ann.subject_keys())]
    if not fresh:
        raise SystemExit(f"no target for contextualise at {t}")
    target = fresh[0]
    x, y = engine.stream.position_at(target, t)
    rec = {"at": t, "cmd": "move", "from_x": round(ann.position[0], 1),
           "from_y": round(ann.position[1], 1), "x": round(x, 1),
           "y": round(y, 1), "w": ann.footprint_px[0], "h": ann.footprint_px[1],
           "height": ann.height_mm,
           "participant": PARTICIPANTS[who % len(PARTICIPANTS)]}
    who += 1
    emit(rec)
    engine.interact("moved", rec["x"], rec["y"], w=rec["w"], h=rec["h"],
                    height_mm=rec["height"], from_x=rec["from_x"],
                    from_y=rec["from_y"], at=t, participant=rec["participant"])
    return ann


def simple(t, cmd, **fields):
    global who
    feed_until(t)
    rec = {"at": t, "cmd": cmd,
           "participant": PARTICIPANTS[who % len(PARTICIPANTS)], **fields}
    who += 1
    emit(rec)
    op = {"place": "placed", "move": "moved", "remove": "removed"}[cmd]
    engine.interact(op, rec["x"], rec["y"], w=rec.get("w"), h=rec.get("h"),
                    height_mm=rec.get("height"), from_x=rec.get("from_x"),
                    from_y=rec.get("from_y"), at=t,
                    participant=rec["participant"])


# Round 1: a few pins as the discussion settles on its pillars.
a1 = pin(96_000, prefer="carbon tax")
a2 = pin(150_000, prefer="public transport")
a3 = pin(330_000, prefer="green hydrogen")
contextualise(430_000, a1)

# Round 2: build the overview; isolate one crowded annotation for a while.
a4 = pin(530_000, prefer="solar panels")
a5 = pin(600_000, prefer="grid storage")
contextualise(650_000, a4)
simple(700_000, "place", x=round(a2.position[0], 1), y=round(a2.position[1], 1),
       w=50, h=50, height=38)                      # stack: isolate a2
a6 = pin(760_000, prefer="heat pumps")
simple(820_000, "remove", x=round(a2.position[0], 1),
       y=round(a2.position[1], 1), w=50, h=50, height=38)   # unstack a2
simple(870_000, "place", x=200.0, y=200.0, w=60, h=60, height=40)  # inert corner marker

# Round 3: plan entities get pinned; one early annotation is disbanded.
a7 = pin(1_010_000, prefer="anna")
a8 = pin(1_120_000, prefer="pilot")
simple(1_180_000, "remove", x=round(a3.position[0], 1),
       y=round(a3.position[1], 1),
       w=a3.footprint_px[0], h=a3.footprint_px[1], height=a3.height_mm)
a9 = pin(1_260_000, prefer="council")
contextualise(1_330_000, a7)
simple(1_400_000, "remove", x=200.0, y=200.0, w=60, h=60, height=40)  # lift marker

print("# demo session interaction script")
for line in lines:
    print(line)
