"""Synthetic depth scenes with ground truth, powering the detector oracle.

Blocks are rendered with the same pinhole model the detector corrects for:
a block of height h has its top face scaled about the sensor nadir by
D/(D-h), so recovering the base-center position exercises the real parallax
path. Multi-event commits are generated so that only true moves are
area/height compatible, keeping the ground truth unambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibrate import solve_homography
from .frameio import write_depth
from .types import DepthFrame

# Margins beyond the detector's pairing thresholds (1.6 area ratio, 20%
# height) so noise cannot flip compatibility of a non-move pair.
AREA_MARGIN = 2.0
HEIGHT_MARGIN = 0.35


@dataclass
class SynthConfig:
    depth_size: tuple[int, int] = (512, 512)
    display_size: tuple[int, int] = (1920, 1080)
    corner_margin: int = 36
    table_depth_mm: float = 1000.0
    noise_mm: float = 0.0
    block_px: tuple[int, int] = (30, 120)
    block_height_mm: tuple[int, int] = (15, 80)

    @property
    def corners_uv(self) -> np.ndarray:
        m = self.corner_margin
        w, h = self.depth_size
        return np.array([[m, m], [w - m, m], [w - m, h - m], [m, h - m]],
                        dtype=np.float64)

    @property
    def nadir_uv(self) -> tuple[float, float]:
        return (self.depth_size[0] / 2.0, self.depth_size[1] / 2.0)


@dataclass
class _Block:
    # Base-footprint center and size at table height. Blocks are constructed
    # so the projected top face covers an exact integer pixel rectangle,
    # which keeps the detector's pixel centroid free of grid quantization.
    center_uv: tuple[float, float]
    size_px: tuple[float, float]
    height_mm: float


@dataclass
class TruthEvent:
    kind: str
    display_pos: tuple[float, float]
    footprint_px: tuple[float, float]
    height_mm: float
    from_pos: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "x": self.display_pos[0], "y": self.display_pos[1],
             "w": self.footprint_px[0], "h": self.footprint_px[1],
             "height_mm": self.height_mm}
        if self.from_pos is not None:
            d["from_x"], d["from_y"] = self.from_pos
        return d


class SyntheticScene:
    def __init__(self, cfg: SynthConfig | None = None, rng: np.random.Generator | None = None):
        self.cfg = cfg or SynthConfig()
        self.rng = rng or np.random.default_rng(0)
        self.blocks: dict[int, _Block] = {}
        self._next_block = 0
        w, h = self.cfg.display_size
        display_corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
        self._homography = solve_homography(self.cfg.corners_uv, display_corners)
        self._frame_id = 0

    # -- rendering -------------------------------------------------------------

    def _top_rect(self, block: _Block) -> tuple[float, float, float, float]:
        d = self.cfg.table_depth_mm
        factor = d / (d - block.height_mm)
        nx, ny = self.cfg.nadir_uv
        cx = nx + (block.center_uv[0] - nx) * factor
        cy = ny + (block.center_uv[1] - ny) * factor
        hw = block.size_px[0] * factor / 2.0
        hh = block.size_px[1] * factor / 2.0
        return (cx - hw, cy - hh, cx + hw, cy + hh)

    def render(self, noise: bool | None = None) -> DepthFrame:
        w, h = self.cfg.depth_size
        depth = np.full((h, w), self.cfg.table_depth_mm, dtype=np.float32)
        for block in self.blocks.values():
            x0, y0, x1, y1 = self._top_rect(block)
            u0 = max(0, int(np.ceil(x0 - 0.5)))
            u1 = min(w - 1, int(np.floor(x1 - 0.5 - 1e-9)))
            v0 = max(0, int(np.ceil(y0 - 0.5)))
            v1 = min(h - 1, int(np.floor(y1 - 0.5 - 1e-9)))
            depth[v0:v1 + 1, u0:u1 + 1] = self.cfg.table_depth_mm - block.height_mm
        if noise is None:
            noise = self.cfg.noise_mm > 0
        if noise and self.cfg.noise_mm > 0:
            depth += self.rng.uniform(-self.cfg.noise_mm, self.cfg.noise_mm,
                                      size=depth.shape).astype(np.float32)
        self._frame_id += 1
        return DepthFrame(width=w, height=h, depth_mm=depth, frame_id=self._frame_id)

    def display_pos(self, uv: tuple[float, float]) -> tuple[float, float]:
        p = self._homography @ np.array([uv[0], uv[1], 1.0])
        return (float(p[0] / p[2]), float(p[1] / p[2]))

    def _footprint(self, block: _Block) -> tuple[float, float]:
        # Base rectangle extent through the corner homography (axis-aligned here).
        cx, cy = block.center_uv
        hw, hh = block.size_px[0] / 2.0, block.size_px[1] / 2.0
        corners = [self.display_pos((cx + sx * hw, cy + sy * hh))
                   for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
        xs = [c[0] for c in corners]
        ys = [c[1] for c in corners]
        return (max(xs) - min(xs), max(ys) - min(ys))

    # -- placement sampling ------------------------------------------------------

    def _fits(self, center, size_px, height_mm, clearance_of: float) -> bool:
        probe = _Block(center, size_px, height_mm)
        x0, y0, x1, y1 = self._top_rect(probe)
        m = self.cfg.corner_margin + 4
        w, h = self.cfg.depth_size
        if x0 < m or y0 < m or x1 > w - m or y1 > h - m:
            return False
        for other in self.blocks.values():
            ox0, oy0, ox1, oy1 = self._top_rect(other)
            gap = max(clearance_of, max(other.size_px))
            if x0 < ox1 + gap and ox0 < x1 + gap and y0 < oy1 + gap and oy0 < y1 + gap:
                return False
        return True

    def _grid_block(self, top_w: int, top_h: int, u0: int, v0: int,
                    height: float) -> _Block:
        """Block whose projected top face covers exactly the given pixel rect."""
        d = self.cfg.table_depth_mm
        factor = d / (d - height)
        nx, ny = self.cfg.nadir_uv
        top_cx, top_cy = u0 + top_w / 2.0, v0 + top_h / 2.0
        center = (nx + (top_cx - nx) / factor, ny + (top_cy - ny) / factor)
        return _Block(center, (top_w / factor, top_h / factor), height)

    def _sample_block(self, forbid: list[_Block] | None = None,
                      tries: int = 200) -> _Block | None:
        lo, hi = self.cfg.block_px
        hlo, hhi = self.cfg.block_height_mm
        w, h = self.cfg.depth_size
        for _ in range(tries):
            height = float(self.rng.integers(hlo, hhi + 1))
            factor = self.cfg.table_depth_mm / (self.cfg.table_depth_mm - height)
            top_w = int(round(int(self.rng.integers(lo, hi + 1)) * factor))
            top_h = int(round(int(self.rng.integers(lo, hi + 1)) * factor))
            u0 = int(self.rng.integers(0, w - top_w))
            v0 = int(self.rng.integers(0, h - top_h))
            cand = self._grid_block(top_w, top_h, u0, v0, height)
            if not self._fits(cand.center_uv, cand.size_px, height,
                              clearance_of=max(cand.size_px)):
                continue
            if forbid and not all(_distinct(cand, other) for other in forbid):
                continue
            return cand
        return None

    def _sample_spot(self, block: _Block, tries: int = 200) -> tuple[float, float] | None:
        """New grid-aligned base center for an existing block."""
        d = self.cfg.table_depth_mm
        factor = d / (d - block.height_mm)
        top_w = int(round(block.size_px[0] * factor))
        top_h = int(round(block.size_px[1] * factor))
        w, h = self.cfg.depth_size
        for _ in range(tries):
            u0 = int(self.rng.integers(0, w - top_w))
            v0 = int(self.rng.integers(0, h - top_h))
            cand = self._grid_block(top_w, top_h, u0, v0, block.height_mm)
            if self._fits(cand.center_uv, cand.size_px, block.height_mm,
                          clearance_of=max(cand.size_px)):
                return cand.center_uv
        return None

    # -- commit operations ---------------------------------------------------------

    def place(self, block: _Block) -> TruthEvent:
        self.blocks[self._next_block] = block
        self._next_block += 1
        return TruthEvent("placed", self.display_pos(block.center_uv),
                          self._footprint(block), block.height_mm)

    def remove(self, block_id: int) -> TruthEvent:
        block = self.blocks.pop(block_id)
        return TruthEvent("removed", self.display_pos(block.center_uv),
                          self._footprint(block), block.height_mm)

    def move(self, block_id: int, new_center: tuple[float, float]) -> TruthEvent:
        block = self.blocks[block_id]
        old = block.center_uv
        block.center_uv = new_center
        return TruthEvent("moved", self.display_pos(new_center),
                          self._footprint(block), block.height_mm,
                          from_pos=self.display_pos(old))


def _distinct(a: _Block, b: _Block) -> bool:
    """True when a and b can never satisfy the detector's pairing test."""
    area_a = a.size_px[0] * a.size_px[1]
    area_b = b.size_px[0] * b.size_px[1]
    if max(area_a, area_b) > AREA_MARGIN * min(area_a, area_b):
        return True
    return abs(a.height_mm - b.height_mm) > HEIGHT_MARGIN * max(a.height_mm, b.height_mm)


@dataclass
class CommitFixture:
    prev: DepthFrame
    frame: DepthFrame
    truth: list[TruthEvent] = field(default_factory=list)


def random_commits(n: int, seed: int = 0, cfg: SynthConfig | None = None):
    """Yield n randomized commit fixtures walking one synthetic scene.

    Op mix: placements, removals, a removal+placement of incompatible blocks,
    double placements/removals, and single moves. Every commit carries exact
    ground truth.
    """
    cfg = cfg or SynthConfig()
    rng = np.random.default_rng(seed)
    scene = SyntheticScene(cfg, rng)
    prev = scene.render()
    produced = 0
    while produced < n:
        truth: list[TruthEvent] = []
        roll = rng.uniform()
        ids = sorted(scene.blocks)
        if roll < 0.30 or not ids:
            block = scene._sample_block()
            if block is not None:
                truth.append(scene.place(block))
        elif roll < 0.45:
            truth.append(scene.remove(ids[int(rng.integers(len(ids)))]))
        elif roll < 0.65:
            # Move one block to a fresh legal spot. The block stays in the
            # scene during sampling so the new spot also clears the old
            # position by a block width (overlapping old/new regions would
            # leave no height change where they intersect).
            bid = ids[int(rng.integers(len(ids)))]
            spot = scene._sample_spot(scene.blocks[bid])
            if spot is not None:
                truth.append(scene.move(bid, spot))
        elif roll < 0.80:
            first = scene._sample_block()
            if first is not None:
                truth.append(scene.place(first))
            second = scene._sample_block()
            if second is not None:
                truth.append(scene.place(second))
        elif roll < 0.90 and len(ids) >= 2:
            picks = rng.choice(len(ids), size=2, replace=False)
            for i in sorted(picks, reverse=True):
                truth.append(scene.remove(ids[int(i)]))
        elif ids:
            # Removal plus an unrelated placement, forced incompatible so the
            # detector cannot legally pair them into a move.
            bid = ids[int(rng.integers(len(ids)))]
            victim = scene.blocks[bid]
            newcomer = scene._sample_block(forbid=[victim])
            if newcomer is not None:
                truth.append(scene.remove(bid))
                truth.append(scene.place(newcomer))
        if not truth:
            continue
        frame = scene.render()
        yield CommitFixture(prev=prev, frame=frame, truth=truth)
        prev = frame
        produced += 1


def write_fixture_set(out_dir: str | Path, n: int, seed: int = 0,
                      cfg: SynthConfig | None = None) -> Path:
    """genfix output: depth frames plus a ground-truth sidecar."""
    cfg = cfg or SynthConfig()
    out = Path(out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    meta = {
        "depth_size": list(cfg.depth_size),
        "display_size": list(cfg.display_size),
        "corners_uv": cfg.corners_uv.tolist(),
        "table_depth_mm": cfg.table_depth_mm,
        "noise_mm": cfg.noise_mm,
        "seed": seed,
        "commits": n,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    sidecar = open(out / "ground_truth.ndjson", "w", encoding="utf-8")
    first = True
    with sidecar:
        for i, fix in enumerate(random_commits(n, seed=seed, cfg=cfg)):
            if first:
                write_depth(out / "frames" / "frame_0000.df", fix.prev)
                first = False
            write_depth(out / "frames" / f"frame_{i + 1:04d}.df", fix.frame)
            record = {"commit": i + 1,
                      "events": [t.to_dict() for t in fix.truth]}
            sidecar.write(json.dumps(record, sort_keys=True) + "\n")
    return out
