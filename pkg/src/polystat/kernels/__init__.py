"""Kernel selection.

The compiled extension is preferred when present; POLYSTAT_KERNEL=pure
forces the Python twin (useful for debugging and for the benchmark).
"""

import os

_requested = os.environ.get("POLYSTAT_KERNEL", "").strip().lower()

if _requested in {"pure", "python"}:
    from .pure import fm_combine, pivot, row_reduce

    KERNEL_BACKEND = "pure"
elif _requested in {"compiled", "speedups", "cython"}:
    from polystat._speedups import fm_combine, pivot, row_reduce  # noqa: F401

    KERNEL_BACKEND = "compiled"
else:
    try:
        from polystat._speedups import fm_combine, pivot, row_reduce

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from .pure import fm_combine, pivot, row_reduce

        KERNEL_BACKEND = "pure"

__all__ = ["pivot", "fm_combine", "row_reduce", "KERNEL_BACKEND"]
