"""Live protocol endpoint: WebSocket transport over the shared engine loop.

All mutation runs on the event loop, so client commands are applied in
arrival order through the same Engine methods the headless runner uses.
"""

from __future__ import annotations

import asyncio
import time
from pathlib import Path

import websockets

from ..errors import ProtocolError, SemcurError
from ..sense.detect import TangibleSensor
from ..sense.frameio import read_depth
from ..session import compute_metrics
from .config import EngineConfig
from .engine import Engine
from .protocol import encode, decode, validate_interact


class EngineServer:
    def __init__(self, config: EngineConfig | None = None,
                 out_path: str | Path | None = None):
        self.config = config or EngineConfig()
        self._log_fh = open(out_path, "w", encoding="utf-8") if out_path else None
        self.engine = Engine(self.config, on_event=self._on_event)
        self.clients: set = set()
        self._started = time.monotonic()
        self._sensor: TangibleSensor | None = None
        self._outbox: list[str] = []

    # -- engine event fan-out ---------------------------------------------------

    def _on_event(self, ev) -> None:
        if self._log_fh is not None:
            self._log_fh.write(ev.to_json() + "\n")
            self._log_fh.flush()
        if ev.kind in ("utterance", "spawn", "expire", "delta"):
            self._outbox.append(encode(ev.kind, at=ev.at, **ev.data))

    def _flush_outbox(self) -> None:
        if not self._outbox or not self.clients:
            self._outbox = self._outbox[-1000:]
            return
        batch, self._outbox = self._outbox, []
        for msg in batch:
            websockets.broadcast(self.clients, msg)

    def now_ms(self) -> int:
        return max(int((time.monotonic() - self._started) * 1000), self.engine.now)

    # -- frame + metrics loop -------------------------------------------------------

    def scene_frame_msg(self, now: int) -> str:
        frame = self.engine.stream.layout_frame(now)
        return encode(
            "scene_frame", now=now,
            postits=[{
                "id": v.id, "subject": v.subject.to_dict(),
                "utterance_id": v.utterance_id, "path": v.path,
                "x": round(v.x, 3), "y": round(v.y, 3),
                "theta": round(v.theta, 5), "orientation": v.orientation,
            } for v in frame.postits],
            **{k: self.engine.scene.snapshot()[k] for k in ("annotations", "links")},
            recent_utterances=[{"id": u.id, "text": u.text}
                               for u in self.engine.scene.recent_utterances],
            display={"width": self.config.display_width,
                     "height": self.config.display_height,
                     "postit_radius_px": self.config.postit_radius_px})

    async def _frame_loop(self) -> None:
        interval = 1.0 / self.config.frame_hz
        while True:
            await asyncio.sleep(interval)
            now = self.now_ms()
            self.engine.advance(now)
            self._flush_outbox()
            if self.clients:
                websockets.broadcast(self.clients, self.scene_frame_msg(now))

    def _metrics_msg(self) -> str:
        metrics = compute_metrics(self.engine.log, self.config.round_boundaries())
        return encode("metrics_tick", **metrics.to_dict())

    # -- client handling ----------------------------------------------------------------

    async def handler(self, conn) -> None:
        self.clients.add(conn)
        try:
            now = self.now_ms()
            self.engine.advance(now)
            await conn.send(encode("hello", config=self.config.to_dict(), now=now))
            await conn.send(self.scene_frame_msg(now))
            async for raw in conn:
                try:
                    self._dispatch(decode(raw))
                except (ProtocolError, SemcurError) as exc:
                    await conn.send(encode("error", message=str(exc)))
                self._flush_outbox()
        finally:
            self.clients.discard(conn)

    def _dispatch(self, msg: dict) -> None:
        now = self.now_ms()
        self.engine.advance(now)
        mtype = msg["type"]
        if mtype == "say":
            self.engine.say(str(msg.get("text", "")), now)
        elif mtype == "interact":
            validate_interact(msg)
            op_kind = {"place": "placed", "move": "moved", "remove": "removed"}
            self.engine.interact(
                kind=op_kind[msg["op"]], x=msg["x"], y=msg["y"],
                w=msg.get("w"), h=msg.get("h"), height_mm=msg.get("height"),
                from_x=msg.get("from_x"), from_y=msg.get("from_y"),
                at=now, participant=msg.get("participant"))
            self._outbox.append(self._metrics_msg())
        elif mtype == "depth_commit":
            if "frame_ref" in msg:
                frame = read_depth(msg["frame_ref"])
            elif "frame" in msg:
                inline = msg["frame"]
                import numpy as np
                from ..sense.types import DepthFrame
                frame = DepthFrame(width=inline["width"], height=inline["height"],
                                   depth_mm=np.asarray(inline["depth_mm"],
                                                       dtype=np.float32))
            else:
                raise ProtocolError("depth_commit needs frame_ref or frame")
            if self._sensor is None:
                corners = msg.get("corners")
                if corners is None:
                    raise ProtocolError("first depth_commit must carry corners")
                self._sensor = TangibleSensor.start(
                    frame, corners,
                    (self.config.display_width, self.config.display_height),
                    cfg=self.config.sense_config())
            else:
                for ev in self._sensor.commit(frame):
                    self.engine.apply_interaction(ev, now)
                self._outbox.append(self._metrics_msg())
        elif mtype == "control":
            self.engine.control(msg.get("action", ""), now)
            self._outbox.append(self._metrics_msg())

    # -- lifecycle ----------------------------------------------------------------------------

    async def serve(self, host: str = "127.0.0.1", port: int | None = None) -> None:
        port = port if port is not None else self.config.port
        async with websockets.serve(self.handler, host, port):
            frame_task = asyncio.create_task(self._frame_loop())
            try:
                await asyncio.Future()
            finally:
                frame_task.cancel()

    def close(self) -> None:
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None


def serve(config: EngineConfig | None = None, out_path: str | Path | None = None,
          host: str = "127.0.0.1", port: int | None = None) -> None:
    server = EngineServer(config, out_path)
    try:
        asyncio.run(server.serve(host=host, port=port))
    finally:
        server.close()
