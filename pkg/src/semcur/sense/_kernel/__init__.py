"""Labeling kernel selection: compiled extension if present, numpy otherwise.

Set SEMCUR_KERNEL=c to require the compiled kernel, =py to force the numpy
fallback; the default tries the extension and falls back silently.
"""

import os

_choice = os.environ.get("SEMCUR_KERNEL", "auto")

if _choice == "py":
    from ._ccl_np import region_stats
    BACKEND = "numpy"
elif _choice == "c":
    from ._ccl_cy import region_stats  # noqa: F401
    BACKEND = "c"
else:
    try:
        from ._ccl_cy import region_stats  # noqa: F401
        BACKEND = "c"
    except ImportError:
        from ._ccl_np import region_stats  # noqa: F401
        BACKEND = "numpy"

__all__ = ["region_stats", "BACKEND"]
