"""Corner calibration: homography, table plane, and validity checks."""

from __future__ import annotations

import numpy as np

from ..errors import CalibrationError
from .types import Calibration, DepthFrame


def solve_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Direct linear transform for a 4-point correspondence."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        u, v = src[i]
        x, y = dst[i]
        a[2 * i] = [u, v, 1, 0, 0, 0, -x * u, -x * v]
        b[2 * i] = x
        a[2 * i + 1] = [0, 0, 0, u, v, 1, -y * u, -y * v]
        b[2 * i + 1] = y
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise CalibrationError(f"degenerate corner configuration: {exc}") from exc
    return np.array([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], 1.0]])


def is_convex_quad(corners: np.ndarray) -> bool:
    corners = np.asarray(corners, dtype=np.float64)
    if corners.shape != (4, 2):
        return False
    sign = 0.0
    for i in range(4):
        a, b, c = corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) < 1e-9:
            return False
        if sign == 0.0:
            sign = cross
        elif cross * sign < 0:
            return False
    return True


def quad_mask(corners: np.ndarray, width: int, height: int) -> np.ndarray:
    """Boolean mask of pixels whose centers lie inside the convex quad."""
    uu, vv = np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)
    inside = np.ones((height, width), dtype=bool)
    # Winding established by the first edge's sign against the centroid.
    cx, cy = corners.mean(axis=0)
    for i in range(4):
        ax, ay = corners[i]
        bx, by = corners[(i + 1) % 4]
        edge = (bx - ax) * (vv - ay) - (by - ay) * (uu - ax)
        ref = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        inside &= (edge * np.sign(ref)) >= 0
    return inside


def _corner_depth(frame: DepthFrame, u: float, v: float, window: int = 2) -> float:
    u0 = max(0, int(round(u)) - window)
    u1 = min(frame.width, int(round(u)) + window + 1)
    v0 = max(0, int(round(v)) - window)
    v1 = min(frame.height, int(round(v)) + window + 1)
    patch = frame.depth_mm[v0:v1, u0:u1]
    valid = patch[patch > 0]
    if valid.size == 0:
        raise CalibrationError(f"no valid depth near corner ({u}, {v})")
    return float(np.median(valid))


def calibrate(baseline: DepthFrame, corners_uv, display_size: tuple[int, int],
              nadir_uv: tuple[float, float] | None = None) -> Calibration:
    """Build the depth-to-display mapping from the four interface corners.

    Requires a convex corner quad and >= 99% valid pixels inside it; the
    baseline becomes the first committed reference frame (see TangibleSensor).
    """
    corners = np.asarray(corners_uv, dtype=np.float64)
    if not is_convex_quad(corners):
        raise CalibrationError("display corners must form a convex quadrilateral")

    inside = quad_mask(corners, baseline.width, baseline.height)
    n_inside = int(inside.sum())
    if n_inside == 0:
        raise CalibrationError("corner quad covers no pixels")
    valid_frac = float((baseline.valid_mask & inside).sum()) / n_inside
    if valid_frac < 0.99:
        raise CalibrationError(
            f"only {valid_frac:.1%} of pixels inside the quad are valid (need 99%)")

    w, h = display_size
    display_corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=np.float64)
    homography = solve_homography(corners, display_corners)

    proj = (homography @ np.hstack([corners, np.ones((4, 1))]).T).T
    proj = proj[:, :2] / proj[:, 2:3]
    err = np.abs(proj - display_corners).max()
    if err > 1.0:
        raise CalibrationError(f"corner round-trip error {err:.3f} px exceeds 1 px")

    depths = np.array([_corner_depth(baseline, u, v) for u, v in corners])
    design = np.hstack([corners, np.ones((4, 1))])
    plane, *_ = np.linalg.lstsq(design, depths, rcond=None)

    if nadir_uv is None:
        nadir_uv = (baseline.width / 2.0, baseline.height / 2.0)

    return Calibration(
        homography=homography,
        corners_uv=corners,
        corner_depth_mm=depths,
        table_plane=(float(plane[0]), float(plane[1]), float(plane[2])),
        sensor_height_mm=float(depths.mean()),
        nadir_uv=(float(nadir_uv[0]), float(nadir_uv[1])),
        display_size=(int(w), int(h)),
    )
