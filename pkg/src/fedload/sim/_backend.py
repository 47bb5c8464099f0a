"""Selects the event-loop kernel: compiled extension if present, else Python.

Both kernels implement the same algorithm with the same PRNG and consume
draws in the same order, so results are bit-identical across backends.
Set ``FEDLOAD_PURE_PYTHON=1`` to force the Python kernel (used by the
benchmark and the parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("FEDLOAD_PURE_PYTHON") == "1":
    from . import _kernel_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernel_py as _impl

        BACKEND = "python"

run_events = _impl.run_events
