"""Jit-compiled instantiation of the coset-enumeration source.

The shared source is exec'd into this module's namespace so that the
njit-decorated functions resolve each other here rather than in the
interpreted module; this keeps one source of truth for both backends
while letting numba's on-disk cache reference a real importable module.
"""

from pathlib import Path

from numba import njit

_src = Path(__file__).with_name("_tc_source.py")
exec(compile(_src.read_text(), str(_src), "exec"), globals())

uf_find = njit(cache=True)(uf_find)  # noqa: F821
uf_merge = njit(cache=True)(uf_merge)  # noqa: F821
process_coincidence = njit(cache=True)(process_coincidence)  # noqa: F821
audit_consistency = njit(cache=True)(audit_consistency)  # noqa: F821
tc_core = njit(cache=True)(tc_core)  # noqa: F821
