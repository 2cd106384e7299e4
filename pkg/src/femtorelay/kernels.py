"""Batch kernels, compiled when available.

The Cython extension ``_kernels`` is used if it imports; otherwise the numpy
versions in ``_pure`` are. Set ``FEMTORELAY_KERNELS=python`` to force the
fallback.
"""
import os

from . import _pure

COLUMNS = _pure.COLUMNS


def load_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pure
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("FEMTORELAY_KERNELS", "").lower() == "python":
        return "python", _pure
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _pure


BACKEND, _impl = _select()

scheme_corners = _impl.scheme_corners
evaluate_batch = _impl.evaluate_batch
max_min_pairs = _impl.max_min_pairs
oracle_max_min = _impl.oracle_max_min
