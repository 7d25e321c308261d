"""Backend selection for the hot numeric kernels.

Kernels in :mod:`solarcast.kernels` ship in two variants: numba ``@njit``
loops and pure-numpy vectorized code. The numba path is used when numba
imports successfully and ``SOLARCAST_DISABLE_NUMBA`` is unset (or "0").
The choice is made once, at import time.
"""

import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


def _env_disabled() -> bool:
    flag = os.environ.get("SOLARCAST_DISABLE_NUMBA", "0").strip().lower()
    return flag in ("1", "true", "yes", "on")


NUMBA_ENABLED = HAVE_NUMBA and not _env_disabled()


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
