"""Select between numba-compiled kernels and their pure-numpy fallbacks.

Set ``DIGITPRIMES_DISABLE_NUMBA=1`` to force the numpy path; it is also used
automatically when numba cannot be imported.
"""

import os

_FLAG = "DIGITPRIMES_DISABLE_NUMBA"


def _numba_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def numba_enabled():
    if os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        return False
    return HAVE_NUMBA


HAVE_NUMBA = _numba_available()

if HAVE_NUMBA:
    from numba import njit
else:

    def njit(*args, **kwargs):
        # decorator stand-in so kernel modules still import
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
