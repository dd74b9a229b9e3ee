"""Kernel backend selection.

The compiled extension is used when importable; the pure module otherwise.
Set IMPRESCHED_PURE=1 to force the pure backend (useful for benchmarking and
for environments without a compiler).
"""

import os

from . import pure

if os.environ.get("IMPRESCHED_PURE"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

busy_period_response = _impl.busy_period_response


def backend_name() -> str:
    return BACKEND
