"""Depth-frame fixture files.

Header line: `width height scale_mm_per_unit fmt` (fmt: text | u16), then
row-major values. u16 payloads are little-endian and quantized by the scale,
which keeps replayed fixtures bit-stable.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .types import DepthFrame


def write_depth(path: str | Path, frame: DepthFrame, scale: float = 0.25,
                fmt: str = "u16") -> None:
    if fmt not in ("u16", "text"):
        raise ValidationError(f"unknown depth-frame format {fmt!r}")
    path = Path(path)
    header = f"{frame.width} {frame.height} {scale} {fmt}\n".encode("ascii")
    units = np.round(frame.depth_mm / scale).astype(np.uint16)
    with open(path, "wb") as fh:
        fh.write(header)
        if fmt == "u16":
            fh.write(units.astype("<u2").tobytes())
        else:
            for row in units:
                fh.write((" ".join(str(int(x)) for x in row) + "\n").encode("ascii"))


def read_depth(path: str | Path, frame_id: int = 0) -> DepthFrame:
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) not in (3, 4):
            raise ValidationError(f"{path}: bad depth-frame header")
        width, height = int(header[0]), int(header[1])
        scale = float(header[2])
        fmt = header[3] if len(header) == 4 else "text"
        if fmt == "u16":
            raw = fh.read(width * height * 2)
            if len(raw) != width * height * 2:
                raise ValidationError(f"{path}: truncated u16 payload")
            units = np.frombuffer(raw, dtype="<u2").reshape(height, width)
        elif fmt == "text":
            units = np.loadtxt(fh, dtype=np.float64).reshape(height, width)
        else:
            raise ValidationError(f"{path}: unknown format {fmt!r}")
    return DepthFrame(width=width, height=height,
                      depth_mm=(units * scale).astype(np.float32), frame_id=frame_id)
