"""Depth-map diffing: classify placed/removed/moved artifacts between commits.

A commit compares the stored reference against the incoming frame once users
have left the interaction volume (gating is the caller's contract). Raised
regions become placements, lowered ones removals; an area- and height-
compatible raised/lowered pair collapses into one move. Centroids are
parallax-corrected toward the sensor nadir before the homography maps them to
display coordinates.
"""

from __future__ import annotations

import numpy as np

from ..errors import CommitRejected, ValidationError
from ._kernel import region_stats
from .calibrate import calibrate
from .types import Calibration, ChangeRegion, DepthFrame, InteractionEvent, SenseConfig


def _regions_from_stats(stats: np.ndarray, sign: float, a_min: float) -> list[ChangeRegion]:
    out = []
    for row in stats:
        area = int(row[0])
        if area < a_min:
            continue
        out.append(ChangeRegion(
            centroid_uv=(row[1] / area + 0.5, row[2] / area + 0.5),
            bbox=(int(row[4]), int(row[6]), int(row[5]), int(row[7])),
            mean_dheight_mm=sign * row[3] / area,
            area_px=area,
        ))
    return out


def parallax_correct(uv: np.ndarray, height_mm: float, cal: Calibration) -> np.ndarray:
    """Shift observed coordinates toward the nadir by height/table_depth."""
    pts = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
    nadir = np.asarray(cal.nadir_uv)
    out = np.empty_like(pts)
    for i, (u, v) in enumerate(pts):
        depth = cal.table_depth_at(u, v)
        factor = 1.0 - height_mm / depth if depth > 0 else 1.0
        out[i] = nadir + (pts[i] - nadir) * factor
    return out


def region_display_pos(region: ChangeRegion, cal: Calibration) -> tuple[float, float]:
    height = abs(region.mean_dheight_mm)
    corrected = parallax_correct(np.array([region.centroid_uv]), height, cal)
    xy = cal.to_display(corrected)[0]
    return (float(xy[0]), float(xy[1]))


def footprint_of(region: ChangeRegion, cal: Calibration) -> tuple[float, float]:
    """Bounding box extent in display pixels after parallax correction."""
    u0, v0, u1, v1 = region.bbox
    corners = np.array([
        [u0, v0], [u1 + 1, v0], [u1 + 1, v1 + 1], [u0, v1 + 1],
    ], dtype=np.float64)
    corrected = parallax_correct(corners, abs(region.mean_dheight_mm), cal)
    xy = cal.to_display(corrected)
    return (float(xy[:, 0].max() - xy[:, 0].min()),
            float(xy[:, 1].max() - xy[:, 1].min()))


def _scanline(region: ChangeRegion) -> tuple[float, float]:
    return (region.centroid_uv[1], region.centroid_uv[0])


def _pair_compatible(raised: ChangeRegion, lowered: ChangeRegion, cfg: SenseConfig) -> bool:
    a1, a2 = raised.area_px, lowered.area_px
    if max(a1, a2) > cfg.pair_area_ratio * min(a1, a2):
        return False
    h1, h2 = abs(raised.mean_dheight_mm), abs(lowered.mean_dheight_mm)
    return abs(h1 - h2) <= cfg.pair_height_tol * max(h1, h2)


def diff_events(prev: DepthFrame, frame: DepthFrame, cal: Calibration,
                cfg: SenseConfig | None = None, commit_id: int = 0) -> list[InteractionEvent]:
    """Pure diff of two committed frames into interaction events."""
    cfg = cfg or SenseConfig()
    if (prev.width, prev.height) != (frame.width, frame.height):
        raise ValidationError("frame dimensions do not match the stored reference")
    invalid_frac = 1.0 - float(frame.valid_mask.mean())
    if invalid_frac > cfg.max_invalid_frac:
        raise CommitRejected(f"{invalid_frac:.0%} of pixels invalid")

    valid = prev.valid_mask & frame.valid_mask
    delta = np.where(valid, prev.depth_mm - frame.depth_mm, 0.0).astype(np.float32)

    raised_stats, lowered_stats = region_stats(delta, cfg.h_min_mm)
    a_min = cfg.a_min_for(frame.width, frame.height)
    raised = _regions_from_stats(raised_stats, 1.0, a_min)
    lowered = _regions_from_stats(lowered_stats, -1.0, a_min)

    # Greedy nearest-area pairing of raised (new position) with lowered
    # (old position) regions, scanning in centroid scanline order.
    moved: list[tuple[ChangeRegion, ChangeRegion]] = []
    free_lowered = sorted(lowered, key=_scanline)
    placed_regions = []
    for r in sorted(raised, key=_scanline):
        candidates = [lw for lw in free_lowered if _pair_compatible(r, lw, cfg)]
        if candidates:
            best = min(candidates, key=lambda lw: (abs(lw.area_px - r.area_px),
                                                   _scanline(lw)))
            free_lowered.remove(best)
            moved.append((r, best))
        else:
            placed_regions.append(r)

    w, h = cal.display_size
    events: list[tuple[tuple[float, float], InteractionEvent]] = []

    def clamp(pos):
        x = min(max(pos[0], 0.0), float(w))
        y = min(max(pos[1], 0.0), float(h))
        return (x, y), (x, y) != pos

    for r, lw in moved:
        pos, clamped = clamp(region_display_pos(r, cal))
        from_pos, fclamped = clamp(region_display_pos(lw, cal))
        events.append((_scanline(r), InteractionEvent.make(
            "moved", pos, footprint_of(r, cal), r.mean_dheight_mm, commit_id,
            from_pos=from_pos, clamped=clamped or fclamped)))
    for r in placed_regions:
        pos, clamped = clamp(region_display_pos(r, cal))
        events.append((_scanline(r), InteractionEvent.make(
            "placed", pos, footprint_of(r, cal), r.mean_dheight_mm, commit_id,
            clamped=clamped)))
    for lw in free_lowered:
        pos, clamped = clamp(region_display_pos(lw, cal))
        events.append((_scanline(lw), InteractionEvent.make(
            "removed", pos, footprint_of(lw, cal), abs(lw.mean_dheight_mm), commit_id,
            clamped=clamped)))

    events.sort(key=lambda pair: pair[0])
    concurrent = len(events) > 1
    out = []
    for _, ev in events:
        if concurrent:
            ev = InteractionEvent.make(
                ev.kind, ev.display_pos, ev.footprint_px, ev.height_mm, ev.commit_id,
                concurrent_flag=True, from_pos=ev.from_pos, clamped=ev.clamped)
        out.append(ev)
    return out


class TangibleSensor:
    """Stateful wrapper: calibration plus the rolling reference frame."""

    def __init__(self, cal: Calibration, reference: DepthFrame,
                 cfg: SenseConfig | None = None):
        self.cal = cal
        self.reference = reference
        self.cfg = cfg or SenseConfig()
        self._commit_id = 0

    @classmethod
    def start(cls, baseline: DepthFrame, corners_uv, display_size,
              cfg: SenseConfig | None = None,
              nadir_uv: tuple[float, float] | None = None) -> "TangibleSensor":
        cal = calibrate(baseline, corners_uv, display_size, nadir_uv=nadir_uv)
        return cls(cal, baseline, cfg)

    def commit(self, frame: DepthFrame) -> list[InteractionEvent]:
        """Diff against the reference; the frame becomes the new reference."""
        self._commit_id += 1
        events = diff_events(self.reference, frame, self.cal, self.cfg,
                             commit_id=self._commit_id)
        self.reference = frame
        return events
