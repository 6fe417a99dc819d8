"""Pure-Python elimination kernels on sparse matrices.

Matrices are given as ``{(i, j): value}`` dictionaries of nonzero entries.
Arithmetic uses Python integers, so nothing here can overflow.
"""

from collections import defaultdict


def _to_rows(entries):
    rows = defaultdict(dict)
    cols = defaultdict(set)
    for (i, j), v in entries.items():
        if v:
            rows[i][j] = v
            cols[j].add(i)
    return rows, cols


def _row_axpy(rows, cols, dst, src, q, mod=None):
    # rows[dst] -= q * rows[src]
    target = rows[dst]
    for j, v in rows[src].items():
        new = target.get(j, 0) - q * v
        if mod is not None:
            new %= mod
        if new:
            if j not in target:
                cols[j].add(dst)
            target[j] = new
        elif j in target:
            del target[j]
            cols[j].discard(dst)


def _pick_pivot(rows, cols):
    """Entry of least absolute value, ties broken by Markowitz cost then index."""
    best = None
    for i, row in rows.items():
        for j, v in row.items():
            key = (abs(v), (len(row) - 1) * (len(cols[j]) - 1), i, j)
            if best is None or key < best:
                best = key
                if key[0] == 1 and key[1] == 0:
                    return i, j
    return (best[2], best[3]) if best else None


def diagonalize(entries):
    """Nonzero diagonal entries after unimodular reduction (not normalised)."""
    rows, cols = _to_rows(entries)
    diag = []
    while True:
        for i in [i for i, row in rows.items() if not row]:
            del rows[i]
        if not rows:
            break
        # cheap pass for unit pivots before falling back to a full scan
        pivot = None
        for i, row in rows.items():
            for j, v in row.items():
                if v in (1, -1):
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            pivot = _pick_pivot(rows, cols)
        r, c = pivot
        while True:
            pv = rows[r][c]
            clean = True
            for i in sorted(cols[c] - {r}):
                q = rows[i][c] // pv
                _row_axpy(rows, cols, i, r, q)
                if c in rows[i]:
                    clean = False
            if clean:
                # column c holds only the pivot, so column operations touch row r alone
                row = rows[r]
                for j in [j for j in row if j != c]:
                    rem = row[j] - (row[j] // pv) * pv
                    if rem:
                        row[j] = rem
                        clean = False
                    else:
                        del row[j]
                        cols[j].discard(r)
            if clean:
                break
            # move to the smallest surviving remainder in row r or column c
            cand = [(abs(rows[i][c]), i, c) for i in cols[c] if i != r]
            cand += [(abs(v), r, j) for j, v in rows[r].items() if j != c]
            _, r, c = min(cand)
        diag.append(abs(rows[r][c]))
        for j in rows[r]:
            cols[j].discard(r)
        del rows[r]
        del cols[c]
    return diag


def rank_mod_p(entries, p):
    rows, cols = _to_rows({k: v % p for k, v in entries.items() if v % p})
    rank = 0
    while True:
        for i in [i for i, row in rows.items() if not row]:
            del rows[i]
        if not rows:
            return rank
        r = min(rows, key=lambda i: (len(rows[i]), i))
        c = min(rows[r], key=lambda j: (len(cols[j]), j))
        inv = pow(rows[r][c], -1, p)
        for i in sorted(cols[c] - {r}):
            q = (rows[i][c] * inv) % p
            _row_axpy(rows, cols, i, r, q, mod=p)
        for j in rows[r]:
            cols[j].discard(r)
        del rows[r]
        rank += 1
