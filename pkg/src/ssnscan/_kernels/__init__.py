"""Kernel backend selection.

The compiled Cython backend is preferred; the pure-Python backend is the
fallback.  ``SSNSCAN_KERNELS`` overrides: ``auto`` (default), ``cython``
(fail if the extension is missing), or ``python``.

Both backends implement the same three entry points with identical results:
``radius_windows``, ``knn_windows``, ``window_stats``.
"""

import os

from ._grid import GridData, build_grid

_CHOICES = ("auto", "cython", "python")


def load_backend(name: str):
    """Import and return a kernel backend module by name."""
    if name == "python":
        from . import _scan_py
        return _scan_py
    if name == "cython":
        from . import _scan_cy
        return _scan_cy
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    requested = os.environ.get("SSNSCAN_KERNELS", "auto").lower()
    if requested not in _CHOICES:
        raise ValueError(
            f"SSNSCAN_KERNELS must be one of {_CHOICES}, got {requested!r}")
    if requested in ("auto", "cython"):
        try:
            return load_backend("cython"), "cython"
        except ImportError:
            if requested == "cython":
                raise
    return load_backend("python"), "python"


_impl, implementation = _select()

radius_windows = _impl.radius_windows
knn_windows = _impl.knn_windows
window_stats = _impl.window_stats

METRIC_EUCLIDEAN = 0
METRIC_MANHATTAN = 1

__all__ = [
    "GridData",
    "build_grid",
    "implementation",
    "load_backend",
    "radius_windows",
    "knn_windows",
    "window_stats",
    "METRIC_EUCLIDEAN",
    "METRIC_MANHATTAN",
]
