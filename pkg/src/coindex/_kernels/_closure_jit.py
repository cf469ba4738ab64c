"""Jit-compiled instantiation of the matrix-closure source."""

from pathlib import Path

from numba import njit

_src = Path(__file__).with_name("_closure_source.py")
exec(compile(_src.read_text(), str(_src), "exec"), globals())

closure_count = njit(cache=True)(closure_count)  # noqa: F821
