"""Backend selection for the hot numeric kernels.

The kernels in :mod:`cdmaps._hot` exist twice: a numba ``@njit`` version and a
vectorised numpy version. ``CDMAPS_BACKEND=numpy`` forces the fallback; the
default is numba whenever it imports.
"""
import contextlib
import os

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def _initial_backend():
    name = os.environ.get("CDMAPS_BACKEND", "").strip().lower()
    if name == "numpy":
        return "numpy"
    if name not in ("", "numba"):
        raise ValueError(f"CDMAPS_BACKEND must be one of {BACKENDS}, got {name!r}")
    return "numba" if HAVE_NUMBA else "numpy"


_current = _initial_backend()


def get_backend():
    return _current


def set_backend(name):
    global _current
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _current = name


@contextlib.contextmanager
def use_backend(name):
    """Temporarily switch backend (tests and benchmarks)."""
    previous = _current
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
