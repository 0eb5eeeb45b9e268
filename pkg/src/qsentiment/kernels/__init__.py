"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
``QSENTIMENT_NO_NUMBA`` is unset or ``0``.  Both paths expose the same
functions; :func:`use_backend` switches at runtime (mainly for tests and
benchmarks).
"""
import os

from . import _numpy

ENV_FLAG = "QSENTIMENT_NO_NUMBA"

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None

_BACKENDS = {"numpy": _numpy}
if _numba is not None:
    _BACKENDS["numba"] = _numba

_FUNCS = ("simulate", "parity_expectation", "fidelity_matrix", "smo")


def available_backends():
    return tuple(_BACKENDS)


def _default_backend():
    if os.environ.get(ENV_FLAG, "0") not in ("", "0") or _numba is None:
        return "numpy"
    return "numba"


def use_backend(name):
    """Route the module-level kernel functions to backend ``name``."""
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    mod = _BACKENDS[name]
    g = globals()
    for fn in _FUNCS:
        g[fn] = getattr(mod, fn)
    g["BACKEND"] = name


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    return _BACKENDS[name or BACKEND]


BACKEND = _default_backend()
use_backend(BACKEND)
