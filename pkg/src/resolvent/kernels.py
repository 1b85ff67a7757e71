"""Kernel dispatch: the compiled extension when importable, else numpy fallbacks.

Set RESOLVENT_PURE=1 to force the fallback (used by the cross-backend tests
and the benchmark).
"""
from __future__ import annotations

import os

from . import _fallback
from ._resolvent_table import RESOLVENT_TERMS

_NAMES = ("echelon_mod_p", "hist_d3", "hist_d4_field", "hist_range", "disc_val",
          "chunk_seed", "mc_hist")

try:
    if os.environ.get("RESOLVENT_PURE"):
        raise ImportError("pure backend requested")
    from . import _core as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def backend(name: str | None = None):
    """Return the kernel namespace: 'compiled', 'python' or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _fallback
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(name)


def echelon_mod_p(indptr, indices, data, ncols, p):
    return _impl.echelon_mod_p(indptr, indices, data, ncols, p)


def hist_d3(p, n, threads=1):
    return _impl.hist_d3(p, n, threads)


def hist_d4_field(p, threads=1):
    return _impl.hist_d4_field(p, RESOLVENT_TERMS, threads)


def hist_range(d, p, n, start, count):
    return _impl.hist_range(d, p, n, start, count, RESOLVENT_TERMS)


def disc_val(d, v, p, n):
    import numpy as np
    return int(_impl.disc_val(d, np.ascontiguousarray(v, dtype=np.int64) % p, p, n, RESOLVENT_TERMS))


def chunk_seed(master, chunk):
    return _impl.chunk_seed(master, chunk)


def mc_hist(d, p, n, samples, seed, chunk=65536, threads=1):
    return _impl.mc_hist(d, p, n, samples, seed, RESOLVENT_TERMS, chunk, threads)
