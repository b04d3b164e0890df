"""Kernel backend selection.

The hot inner loops (strided composite marking, residue first-hit scans) have
two interchangeable implementations: a Cython extension (`sievelab._core`)
and a numpy fallback (`sievelab._pykernels`).  The extension is used when it
imported cleanly and SIEVELAB_PURE is unset; `BACKEND` records the choice.
`benchmarks/bench_kernels.py` compares the two.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
mark_strided = _pykernels.mark_strided
pmin_scan = _pykernels.pmin_scan

if os.environ.get("SIEVELAB_PURE") != "1":
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        BACKEND = "compiled"
        mark_strided = _core.mark_strided
        pmin_scan = _core.pmin_scan

__all__ = ["BACKEND", "mark_strided", "pmin_scan"]
