"""Token-agnostic tangible sensing from depth-map diffs."""

from ._kernel import BACKEND as KERNEL_BACKEND
from .calibrate import calibrate, solve_homography
from .detect import TangibleSensor, diff_events, footprint_of
from .frameio import read_depth, write_depth
from .types import Calibration, ChangeRegion, DepthFrame, InteractionEvent, SenseConfig

__all__ = [
    "KERNEL_BACKEND", "calibrate", "solve_homography", "TangibleSensor",
    "diff_events", "footprint_of", "read_depth", "write_depth",
    "Calibration", "ChangeRegion", "DepthFrame", "InteractionEvent", "SenseConfig",
]
