"""Kernel backend selection.

MWPKD_BACKEND=numba   force the numba-jitted kernels (error if numba missing)
MWPKD_BACKEND=numpy   force the pure-numpy fallbacks
unset                 numba when importable, numpy otherwise

The flag is read once at import. Both backends compute the same quantities;
floating-point summation order may differ at machine precision, so identical
results are only guaranteed within one backend.
"""

import os

_ENV_FLAG = "MWPKD_BACKEND"

try:
    import numba  # noqa: F401
    _NUMBA_IMPORTABLE = True
except ImportError:
    _NUMBA_IMPORTABLE = False


def _resolve() -> str:
    req = os.environ.get(_ENV_FLAG, "").strip().lower()
    if req in ("", "auto"):
        return "numba" if _NUMBA_IMPORTABLE else "numpy"
    if req == "numpy":
        return "numpy"
    if req == "numba":
        if not _NUMBA_IMPORTABLE:
            raise ImportError(
                f"{_ENV_FLAG}=numba requested but numba is not importable"
            )
        return "numba"
    raise ValueError(f"unrecognized {_ENV_FLAG}={req!r}; use 'numba' or 'numpy'")


ACTIVE = _resolve()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return ACTIVE


def numba_available() -> bool:
    return _NUMBA_IMPORTABLE


def set_threads(n: int) -> None:
    """Cap the numba threading layer; no-op on the numpy backend."""
    if ACTIVE == "numba" and n >= 1:
        import numba
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
