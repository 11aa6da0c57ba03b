"""Numba switch.

Hot kernels in :mod:`liedual.kernels` come in two flavours: an explicit-loop
version compiled with numba and a vectorised pure-numpy version. The numba
flavour is used by default; set ``LIEDUAL_DISABLE_NUMBA=1`` (numba's own
``NUMBA_DISABLE_JIT=1`` is honoured too) to route everything through numpy.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
    jit = numba.njit(cache=True, nogil=True)
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

    def jit(func):
        return func


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not (_flag("LIEDUAL_DISABLE_NUMBA") or _flag("NUMBA_DISABLE_JIT"))


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
