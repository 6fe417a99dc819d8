"""Backend selection for the elimination kernels.

The compiled extension (``semistab._kernels``) is used when it imports and
``SEMISTAB_BACKEND`` is not set to ``python``.  Otherwise the pure-Python
sparse kernels in ``semistab._pykernels`` are used.  Both backends return
identical results; the compiled one falls back to Python integers when an
entry leaves the int64 range.
"""

import os
from math import gcd

from . import _pykernels

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

import numpy as np

# dense int64 copies above this many cells are not worth the memory
_DENSE_CELL_LIMIT = 16_000_000
_INT64_SAFE = 2**62


def _select():
    wanted = os.environ.get("SEMISTAB_BACKEND", "").lower()
    if wanted == "python" or _kernels is None:
        return "python"
    return "compiled"


BACKEND = _select()


def normalize_diagonal(diag):
    """Turn nonzero diagonal entries into invariant factors d1 | d2 | ...

    The Smith form of a diagonal matrix is reached by replacing pairs with
    (gcd, lcm); units are already in place and skipped.
    """
    ones = [d for d in diag if d == 1]
    rest = sorted(abs(d) for d in diag if abs(d) != 1)
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            a, b = rest[i], rest[j]
            if b % a:
                g = gcd(a, b)
                rest[i], rest[j] = g, a // g * b
        rest[i + 1:] = sorted(rest[i + 1:])
    return ones + rest


def _dense(entries, nrows, ncols):
    a = np.zeros((nrows, ncols), dtype=np.int64)
    for (i, j), v in entries.items():
        a[i, j] = v
    return a


def _compiled_ok(entries, nrows, ncols):
    if nrows * ncols > _DENSE_CELL_LIMIT:
        return False
    return all(-_INT64_SAFE < v < _INT64_SAFE for v in entries.values())


def elementary_divisors(entries, nrows, ncols, backend=None):
    """Invariant factors (all nonzero ones, including 1s) of a sparse matrix."""
    backend = backend or BACKEND
    if not entries or nrows == 0 or ncols == 0:
        return []
    if backend == "compiled" and _kernels is not None and _compiled_ok(entries, nrows, ncols):
        try:
            diag = _kernels.diagonalize(_dense(entries, nrows, ncols))
        except OverflowError:
            diag = _pykernels.diagonalize(entries)
    else:
        diag = _pykernels.diagonalize(entries)
    return normalize_diagonal(diag)


def rank_mod_p(entries, nrows, ncols, p, backend=None):
    backend = backend or BACKEND
    if not entries or nrows == 0 or ncols == 0:
        return 0
    if (backend == "compiled" and _kernels is not None and p < 2**31
            and nrows * ncols <= _DENSE_CELL_LIMIT):
        a = _dense({k: v % p for k, v in entries.items()}, nrows, ncols)
        return _kernels.rank_mod_p(a, p)
    return _pykernels.rank_mod_p(entries, p)
