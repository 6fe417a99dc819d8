import os
import sys
from itertools import combinations

import pytest

from semistab.exactalg import ChainComplex, IntegerMatrix, Ring

sys.path.insert(0, os.path.dirname(__file__))


def det(rows):
    """Bareiss fraction-free determinant, independent of the library."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def determinantal_divisors(rows):
    """Invariant factors from gcds of k x k minors (small matrices only)."""
    from math import gcd
    m = len(rows)
    n = len(rows[0]) if rows else 0
    dk = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        dk.append(g)
    return [dk[i] // dk[i - 1] for i in range(1, len(dk))]


def rank_mod_p_bruteforce(rows, p):
    """Largest k with a k x k minor nonzero mod p."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    for k in range(min(m, n), 0, -1):
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                if det([[rows[i][j] for j in cs] for i in rs]) % p:
                    return k
    return 0


def circle_complex(ring=Ring("Z")):
    # two vertices, two edges running between them
    d1 = IntegerMatrix.from_rows([[-1, -1], [1, 1]])
    return ChainComplex.from_boundaries(ring, 0, [2, 2], {1: d1})


def point_complex(ring=Ring("Z")):
    return ChainComplex.from_boundaries(ring, 0, [1], {})


@pytest.fixture
def circle():
    return circle_complex()
