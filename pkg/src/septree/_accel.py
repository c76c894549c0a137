"""Backend selection for the numeric kernels.

Kernels are written once in plain Python over numpy arrays.  When numba is
importable and ``SEPTREE_DISABLE_NUMBA`` is unset (or ``0``), each kernel is
also compiled with ``@njit``; :func:`use_numba` switches between the two at
runtime so tests and benchmarks can run both paths in one process.
"""
from __future__ import annotations

import os
from contextlib import contextmanager

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAS_NUMBA = False


def _env_disabled() -> bool:
    return os.environ.get("SEPTREE_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


_enabled = HAS_NUMBA and not _env_disabled()


def numba_enabled() -> bool:
    return _enabled


def set_numba(enabled: bool) -> None:
    global _enabled
    if enabled and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _enabled = bool(enabled)


@contextmanager
def use_numba(enabled: bool):
    """Temporarily force the compiled (True) or interpreted (False) kernels."""
    previous = _enabled
    set_numba(enabled)
    try:
        yield
    finally:
        set_numba(previous)


class Kernel:
    """A function with an optional compiled twin.

    Calling the object dispatches on the current backend; ``.py`` is always
    the interpreted source.  Compilation is lazy so importing the package
    stays cheap and ``SEPTREE_DISABLE_NUMBA=1`` never touches the JIT.
    """

    def __init__(self, func):
        self.py = func
        self._jit = None
        self.__name__ = func.__name__
        self.__doc__ = func.__doc__

    @property
    def jit(self):
        if self._jit is None:
            self._jit = numba.njit(cache=True, nogil=True)(self.py)
        return self._jit

    def __call__(self, *args):
        if _enabled:
            return self.jit(*args)
        return self.py(*args)


def kernel(func) -> Kernel:
    return Kernel(func)

