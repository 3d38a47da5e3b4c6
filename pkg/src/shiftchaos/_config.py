"""Runtime switches for the compiled kernels.

``SHIFTCHAOS_DISABLE_NUMBA=1`` forces the pure-numpy path even when numba is
importable. ``SHIFTCHAOS_THREADS`` caps the threads used by parallel kernels.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # the default probe warns about old TBB builds; workqueue is always present
        numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _flag("SHIFTCHAOS_DISABLE_NUMBA")

numba_default = {
    "nogil": True,
    "cache": True,
    "fastmath": False,
    "error_model": "numpy",
}

numba_parallel = dict(numba_default, parallel=True)


def thread_cap():
    """Thread limit from ``SHIFTCHAOS_THREADS``; ``None`` when unset."""
    raw = os.environ.get("SHIFTCHAOS_THREADS", "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(1, n)
