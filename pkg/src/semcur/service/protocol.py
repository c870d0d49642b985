"""Wire protocol: newline-delimited JSON messages, one object per line.

Over the WebSocket transport each text frame carries exactly one message.
Every message has a `v` protocol version and a `type`. Server to client:
hello, scene_frame, delta, utterance, spawn, expire, metrics_tick.
Client to server: interact, depth_commit, say, control.
"""

from __future__ import annotations

import json

from ..errors import ProtocolError

PROTOCOL_VERSION = 1

CLIENT_TYPES = frozenset({"interact", "depth_commit", "say", "control"})
SERVER_TYPES = frozenset({"hello", "scene_frame", "delta", "utterance",
                          "spawn", "expire", "metrics_tick", "error"})


def encode(msg_type: str, **fields) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": msg_type, **fields},
                      ensure_ascii=False, separators=(",", ":"))


def decode(line: str | bytes, expect: frozenset[str] = CLIENT_TYPES) -> dict:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(msg, dict):
        raise ProtocolError("message is not an object")
    if msg.get("v") != PROTOCOL_VERSION:
        raise ProtocolError(f"unsupported protocol version {msg.get('v')!r}")
    if msg.get("type") not in expect:
        raise ProtocolError(f"unexpected message type {msg.get('type')!r}")
    return msg


def validate_interact(msg: dict) -> dict:
    op = msg.get("op")
    if op not in ("place", "move", "remove"):
        raise ProtocolError(f"interact.op must be place|move|remove, got {op!r}")
    for field in ("x", "y"):
        if not isinstance(msg.get(field), (int, float)):
            raise ProtocolError(f"interact.{field} must be a number")
    if op == "move" and not all(isinstance(msg.get(f), (int, float))
                                for f in ("from_x", "from_y")):
        raise ProtocolError("interact move needs from_x/from_y")
    return msg
