"""Selects the quorum-scan backend at import time.

The compiled extension is used when it imported cleanly and the environment
variable REGSIM_PURE is unset/empty; otherwise the pure-Python twin serves.
Both expose first_contained(masks, responders) and
view3_exists(masks, current, maxset) with identical results.
"""

from __future__ import annotations

import os

from regsim import _maskops_py

if os.environ.get("REGSIM_PURE"):
    _impl = _maskops_py
    BACKEND = "python"
else:
    try:
        from regsim import _maskops_c as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        _impl = _maskops_py
        BACKEND = "python"

first_contained = _impl.first_contained
view3_exists = _impl.view3_exists

__all__ = ["BACKEND", "first_contained", "view3_exists"]
