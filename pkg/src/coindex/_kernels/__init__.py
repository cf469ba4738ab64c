"""Backend selection for the hot kernels.

Two backends exist: "numba" jit-compiles the kernel sources, "python"
runs the same coset-enumeration source interpreted (and uses dict-based
closures instead of the packed-key closure kernel).  Selection order:
the COINDEX_BACKEND environment variable if set, else numba when it
imports cleanly, else python.  Both backends produce identical results;
the benchmarks/ script compares their speed.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

_CACHE: dict[str, SimpleNamespace] = {}


def backend_name() -> str:
    env = os.environ.get("COINDEX_BACKEND", "").strip().lower()
    if env in ("python", "numba"):
        return env
    if env:
        raise ValueError(f"COINDEX_BACKEND must be 'python' or 'numba', got {env!r}")
    try:
        import numba  # noqa: F401
        return "numba"
    except Exception:
        return "python"


def get_kernels(name: str | None = None) -> SimpleNamespace:
    """Kernel namespace for a backend: tc_core plus closure_count (numba only)."""
    if name is None:
        name = backend_name()
    if name in _CACHE:
        return _CACHE[name]

    if name == "python":
        from . import _tc_source

        ns = SimpleNamespace(name="python", tc_core=_tc_source.tc_core,
                             closure_count=None)
    elif name == "numba":
        from . import _closure_jit, _tc_jit

        ns = SimpleNamespace(name="numba", tc_core=_tc_jit.tc_core,
                             closure_count=_closure_jit.closure_count)
    else:
        raise ValueError(f"unknown backend {name!r}")
    _CACHE[name] = ns
    return ns


def warm_up(name: str | None = None) -> None:
    """Trigger jit compilation so timed sections exclude compile cost."""
    import numpy as np

    ks = get_kernels(name)
    rel = np.array([0, 0], dtype=np.int32)
    off = np.array([0, 2], dtype=np.int32)
    empty = np.array([], dtype=np.int32)
    eoff = np.array([0], dtype=np.int32)
    ks.tc_core(2, rel, off, empty, eoff, 16, 0)
    ks.tc_core(2, rel, off, empty, eoff, 16, 1)
    if ks.closure_count is not None:
        gens = np.array([[1, 1, 0, 1], [1, 4, 0, 1]], dtype=np.int64)
        ks.closure_count(gens, 5, 1, 1000, 2003)
        gens2 = np.zeros((1, 8), dtype=np.int64)
        gens2[0, 0] = 1
        gens2[0, 6] = 1
        ks.closure_count(gens2, 2, 2, 16, 37)
