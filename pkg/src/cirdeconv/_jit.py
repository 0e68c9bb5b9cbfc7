"""JIT toggling layer.

Hot kernels are compiled with numba unless the environment variable
``CIRDECONV_NO_NUMBA`` is set to a non-empty value (other than ``0``), in
which case plain-Python/numpy fallbacks run instead.  The flag is read once
at import time because numba decoration happens at module load.
"""

import os

JIT_ENABLED = os.environ.get("CIRDECONV_NO_NUMBA", "") in ("", "0")

if JIT_ENABLED:
    from numba import njit, prange
else:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrapper(func):
            return func

        return wrapper

    prange = range
