# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels on dense int64 matrices.

Both routines destroy their input.  Callers in :mod:`semistab.kernels`
copy before handing a matrix over.
"""

from libc.stdint cimport int64_t

cdef extern from *:
    """
    static inline int semistab_mul_overflow(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int semistab_sub_overflow(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    bint semistab_mul_overflow(long long a, long long b, long long *r) nogil
    bint semistab_sub_overflow(long long a, long long b, long long *r) nogil


cdef inline int64_t _abs(int64_t x) nogil:
    return -x if x < 0 else x


cdef int _axpy_row(int64_t[:, ::1] a, Py_ssize_t dst, Py_ssize_t src,
                   int64_t q, Py_ssize_t c0, Py_ssize_t ncols) nogil:
    # row[dst] -= q * row[src] on columns c0.., returns 1 on overflow
    cdef Py_ssize_t j
    cdef long long prod, res
    for j in range(c0, ncols):
        if a[src, j] == 0:
            continue
        if semistab_mul_overflow(q, a[src, j], &prod):
            return 1
        if semistab_sub_overflow(a[dst, j], prod, &res):
            return 1
        a[dst, j] = res
    return 0


cdef int _axpy_col(int64_t[:, ::1] a, Py_ssize_t dst, Py_ssize_t src,
                   int64_t q, Py_ssize_t r0, Py_ssize_t nrows) nogil:
    cdef Py_ssize_t i
    cdef long long prod, res
    for i in range(r0, nrows):
        if a[i, src] == 0:
            continue
        if semistab_mul_overflow(q, a[i, src], &prod):
            return 1
        if semistab_sub_overflow(a[i, dst], prod, &res):
            return 1
        a[i, dst] = res
    return 0


cdef void _swap_rows(int64_t[:, ::1] a, Py_ssize_t r1, Py_ssize_t r2) nogil:
    cdef Py_ssize_t j
    cdef int64_t tmp
    if r1 == r2:
        return
    for j in range(a.shape[1]):
        tmp = a[r1, j]
        a[r1, j] = a[r2, j]
        a[r2, j] = tmp


cdef void _swap_cols(int64_t[:, ::1] a, Py_ssize_t c1, Py_ssize_t c2) nogil:
    cdef Py_ssize_t i
    cdef int64_t tmp
    if c1 == c2:
        return
    for i in range(a.shape[0]):
        tmp = a[i, c1]
        a[i, c1] = a[i, c2]
        a[i, c2] = tmp


def diagonalize(int64_t[:, ::1] a):
    """Reduce ``a`` to diagonal form by unimodular row and column operations.

    Returns the list of nonzero diagonal entries (absolute values, not yet
    normalised to a divisibility chain).  Raises OverflowError when an
    intermediate entry leaves the int64 range.
    """
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t t = 0, i, j, bi, bj
    cdef int64_t best, v, q, piv
    cdef bint clean
    diag = []
    while t < m and t < n:
        best = 0
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                v = _abs(a[i, j])
                if v != 0 and (best == 0 or v < best):
                    best = v
                    bi = i
                    bj = j
                    if best == 1:
                        break
            if best == 1:
                break
        if best == 0:
            break
        _swap_rows(a, t, bi)
        _swap_cols(a, t, bj)
        while True:
            piv = a[t, t]
            clean = True
            for i in range(t + 1, m):
                if a[i, t] != 0:
                    q = a[i, t] // piv
                    if _axpy_row(a, i, t, q, t, n):
                        raise OverflowError("int64 overflow in row elimination")
                    if a[i, t] != 0:
                        clean = False
            for j in range(t + 1, n):
                if a[t, j] != 0:
                    q = a[t, j] // piv
                    if _axpy_col(a, j, t, q, t, m):
                        raise OverflowError("int64 overflow in column elimination")
                    if a[t, j] != 0:
                        clean = False
            if clean:
                break
            # a remainder survived: move the smallest one onto the diagonal
            best = _abs(piv)
            bi = -1
            bj = -1
            for i in range(t + 1, m):
                v = _abs(a[i, t])
                if v != 0 and v < best:
                    best = v
                    bi = i
                    bj = -1
            for j in range(t + 1, n):
                v = _abs(a[t, j])
                if v != 0 and v < best:
                    best = v
                    bj = j
                    bi = -1
            if bi >= 0:
                _swap_rows(a, t, bi)
            elif bj >= 0:
                _swap_cols(a, t, bj)
        diag.append(_abs(a[t, t]))
        t += 1
    return diag


def rank_mod_p(int64_t[:, ::1] a, int64_t p):
    """Rank of ``a`` over F_p, for a prime p < 2**31."""
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int64_t inv, f, base, e
    for i in range(m):
        for j in range(n):
            a[i, j] %= p
            if a[i, j] < 0:
                a[i, j] += p
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        _swap_rows(a, r, piv)
        # inverse by Fermat
        inv = 1
        base = a[r, c]
        e = p - 2
        while e > 0:
            if e & 1:
                inv = (inv * base) % p
            base = (base * base) % p
            e >>= 1
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(r + 1, m):
            f = a[i, c]
            if f != 0:
                for j in range(c, n):
                    if a[r, j] != 0:
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
                        if a[i, j] < 0:
                            a[i, j] += p
        r += 1
    return r
