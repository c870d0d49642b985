"""Depth sensing domain types."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

MAX_DEPTH_MM = 10_000.0


@dataclass(frozen=True)
class DepthFrame:
    """Row-major sensor distances in millimetres; 0 marks an invalid pixel."""

    width: int
    height: int
    depth_mm: np.ndarray
    frame_id: int = 0

    def __post_init__(self):
        arr = np.asarray(self.depth_mm, dtype=np.float32)
        if arr.shape != (self.height, self.width):
            if arr.size == self.width * self.height:
                arr = arr.reshape(self.height, self.width)
            else:
                raise ValidationError(
                    f"depth array size {arr.size} != {self.width}x{self.height}")
        if float(arr.min(initial=0.0)) < 0 or float(arr.max(initial=0.0)) > MAX_DEPTH_MM:
            raise ValidationError("depth values must lie in [0, 10000] mm")
        object.__setattr__(self, "depth_mm", arr)

    @property
    def valid_mask(self) -> np.ndarray:
        return self.depth_mm > 0


@dataclass(frozen=True)
class Calibration:
    """Depth-pixel to display-pixel mapping plus the table reference plane."""

    homography: np.ndarray          # 3x3, maps (u, v, 1) at table height to display px
    corners_uv: np.ndarray          # 4x2 depth-pixel corners (TL, TR, BR, BL order)
    corner_depth_mm: np.ndarray     # sensor-to-table distance at each corner
    table_plane: tuple[float, float, float]  # depth(u,v) = a*u + b*v + c
    sensor_height_mm: float
    nadir_uv: tuple[float, float]
    display_size: tuple[int, int]

    def table_depth_at(self, u: float, v: float) -> float:
        a, b, c = self.table_plane
        return a * u + b * v + c

    def to_display(self, uv: np.ndarray) -> np.ndarray:
        """Map an (n, 2) array of depth coords to display coords."""
        pts = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
        ones = np.ones((pts.shape[0], 1))
        proj = (self.homography @ np.hstack([pts, ones]).T).T
        return proj[:, :2] / proj[:, 2:3]


@dataclass(frozen=True)
class ChangeRegion:
    """One 4-connected region of height change; every member pixel passed h_min."""

    centroid_uv: tuple[float, float]
    bbox: tuple[int, int, int, int]   # min_u, min_v, max_u, max_v inclusive
    mean_dheight_mm: float            # signed: + raised, - lowered
    area_px: int


@dataclass(frozen=True)
class InteractionEvent:
    kind: str                          # placed | removed | moved
    display_pos: tuple[float, float]
    footprint_px: tuple[float, float]
    height_mm: float
    commit_id: int
    concurrent_flag: bool = False
    from_pos: tuple[float, float] | None = None
    clamped: bool = False
    participant: str | None = None

    @classmethod
    def make(cls, kind: str, display_pos, footprint_px, height_mm, commit_id,
             concurrent_flag=False, from_pos=None, clamped=False, participant=None):
        """Build with positions rounded to fixed precision for stable logs."""
        r3 = lambda t: (round(float(t[0]), 3), round(float(t[1]), 3))
        return cls(kind=kind, display_pos=r3(display_pos),
                   footprint_px=r3(footprint_px), height_mm=round(float(height_mm), 3),
                   commit_id=commit_id, concurrent_flag=concurrent_flag,
                   from_pos=r3(from_pos) if from_pos is not None else None,
                   clamped=clamped, participant=participant)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "x": self.display_pos[0],
            "y": self.display_pos[1],
            "w": self.footprint_px[0],
            "h": self.footprint_px[1],
            "height_mm": self.height_mm,
            "commit_id": self.commit_id,
            "concurrent": self.concurrent_flag,
        }
        if self.from_pos is not None:
            d["from_x"] = self.from_pos[0]
            d["from_y"] = self.from_pos[1]
        if self.clamped:
            d["clamped"] = True
        if self.participant is not None:
            d["participant"] = self.participant
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionEvent":
        from_pos = (d["from_x"], d["from_y"]) if "from_x" in d else None
        return cls.make(kind=d["kind"], display_pos=(d["x"], d["y"]),
                        footprint_px=(d["w"], d["h"]), height_mm=d["height_mm"],
                        commit_id=d["commit_id"], concurrent_flag=d.get("concurrent", False),
                        from_pos=from_pos, clamped=d.get("clamped", False),
                        participant=d.get("participant"))


@dataclass(frozen=True)
class SenseConfig:
    h_min_mm: float = 12.0
    a_min_px: int = 100          # at 512x512; scaled with frame area
    ref_frame_px: int = 512
    pair_area_ratio: float = 1.6
    pair_height_tol: float = 0.20
    max_invalid_frac: float = 0.50
    stack_height_tol: float = 0.25

    def a_min_for(self, width: int, height: int) -> float:
        return self.a_min_px * (width * height) / float(self.ref_frame_px ** 2)
