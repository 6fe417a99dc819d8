"""Spectral sequence of the column filtration of a double complex over a field.

Bidegrees are (s, t) with s >= s_min (0, or -1 for augmented input) and
t >= 0.  The horizontal differential lowers s, the vertical one lowers t,
and the two anticommute so that their sum is a differential on the total
complex.  Pages are computed directly from the filtration: with
Z^r_p = {x in F_p : Dx in F_(p-r)},

    E^r_p = proj_p(Z^r_p) / proj_p(D Z^(r-1)_(p+r-1)),

and d^r sends the class of proj_p(x) to the class of proj_(p-r)(Dx).
"""

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import ZZ, IntegerMatrix, Ring, ValidationError
from .semisimp import realization_chains, reduced_realization_chains


class FieldOps:
    """Arithmetic on plain ints (F_p) or Fractions (Q)."""

    def __init__(self, ring):
        if not ring.is_field:
            raise ValidationError("spectral sequences need field coefficients (Q or Fp:P)")
        self.ring = ring
        self.p = ring.p if ring.kind == "Fp" else None

    def coerce(self, x):
        return x % self.p if self.p else Fraction(x)

    def div(self, a, b):
        if self.p:
            return a * pow(b, -1, self.p) % self.p
        return a / b

    def axpy(self, y, f, x):
        """y - f*x, entrywise."""
        if self.p:
            p = self.p
            return [(a - f * b) % p if b else a for a, b in zip(y, x)]
        return [a - f * b if b else a for a, b in zip(y, x)]


class Echelon:
    """Incrementally reduced spanning set remembering how rows were formed."""

    def __init__(self, ops, width):
        self.ops = ops
        self.width = width
        self.rows = []      # (pivot, vector, coefficients over tags)

    def reduce(self, v):
        ops = self.ops
        v = list(v)
        coeff = {}
        for piv, row, rc in self.rows:
            f = v[piv]
            if f:
                f = ops.div(f, row[piv])
                v = ops.axpy(v, f, row)
                for tag, c in rc.items():
                    coeff[tag] = coeff.get(tag, 0) + f * c
        if ops.p:
            coeff = {t: c % ops.p for t, c in coeff.items()}
        return v, coeff

    def add(self, v, tag):
        """Insert v; returns False (and stores nothing) when v is dependent."""
        res, coeff = self.reduce(v)
        piv = next((i for i, a in enumerate(res) if a), None)
        if piv is None:
            return False
        ops = self.ops
        rc = {t: (-c % ops.p if ops.p else -c) for t, c in coeff.items()}
        rc[tag] = rc.get(tag, 0) + 1
        self.rows.append((piv, res, rc))
        return True

    def __len__(self):
        return len(self.rows)


def _kernel(ops, rows, ncols):
    """Null space basis of the matrix with the given rows (RREF, free columns in order)."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = ops.div(1, m[r][c])
        m[r] = [ops.coerce(a * inv) if ops.p else a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = ops.axpy(m[i], m[i][c], m[r])
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [ops.coerce(0)] * ncols
        v[fc] = ops.coerce(1)
        for i, pc in enumerate(pivots):
            v[pc] = ops.coerce(-m[i][fc])
        basis.append(v)
    return basis


def _matvec(ops, mat, v):
    nz = [(j, x) for j, x in enumerate(v) if x]
    zero = ops.coerce(0)
    out = [sum((row[j] * x for j, x in nz if row[j]), zero) for row in mat]
    return [x % ops.p for x in out] if ops.p else out


def _rank(ops, mat):
    e = Echelon(ops, len(mat[0]) if mat else 0)
    for i, row in enumerate(mat):
        e.add(row, i)
    return len(e)


def _matmul(ops, a, b, inner):
    width = len(b[0]) if b else 0
    out = [[ops.coerce(0)] * width for _ in a]
    if not inner:
        return out
    sparse_b = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    for i, row in enumerate(a):
        acc = out[i]
        for k, x in enumerate(row):
            if x:
                for j, y in sparse_b[k]:
                    acc[j] += x * y
        if ops.p:
            out[i] = [x % ops.p for x in acc]
    return out


def _is_zero(mat):
    return all(not x for row in mat for x in row)


@dataclass
class DoubleComplex:
    """Bigraded vector spaces with anticommuting differentials.

    ``dh[s, t]`` maps (s, t) -> (s-1, t) and ``dv[s, t]`` maps (s, t) -> (s, t-1),
    stored as row lists; absent keys mean zero maps.
    """

    ring: Ring
    s_min: int
    dims: dict
    dh: dict = field(default_factory=dict)
    dv: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ops = FieldOps(self.ring)
        self.dims = {k: v for k, v in self.dims.items() if v}
        for s, t in self.dims:
            if s < self.s_min or t < 0:
                raise ValidationError(f"bidegree ({s},{t}) outside the first quadrant")
        self.dh = {k: [[self.ops.coerce(x) for x in row] for row in m] for k, m in self.dh.items()}
        self.dv = {k: [[self.ops.coerce(x) for x in row] for row in m] for k, m in self.dv.items()}

    def dim(self, s, t):
        return self.dims.get((s, t), 0)

    @property
    def s_max(self):
        return max((s for s, _ in self.dims), default=self.s_min)

    @property
    def t_max(self):
        return max((t for _, t in self.dims), default=0)

    def _map(self, table, key, rows, cols):
        m = table.get(key)
        if m is None:
            return [[self.ops.coerce(0)] * cols for _ in range(rows)]
        return m

    def horizontal(self, s, t):
        return self._map(self.dh, (s, t), self.dim(s - 1, t), self.dim(s, t))

    def vertical(self, s, t):
        return self._map(self.dv, (s, t), self.dim(s, t - 1), self.dim(s, t))

    def validate(self):
        ops = self.ops
        for table, name, shift in ((self.dh, "horizontal", (1, 0)), (self.dv, "vertical", (0, 1))):
            for (s, t), m in table.items():
                want = (self.dim(s - shift[0], t - shift[1]), self.dim(s, t))
                if len(m) != want[0] or any(len(r) != want[1] for r in m):
                    raise ValidationError(f"{name} differential at ({s},{t}) has the wrong shape")
        for (s, t) in self.dims:
            n = self.dim(s, t)
            hh = _matmul(ops, self.horizontal(s - 1, t), self.horizontal(s, t), self.dim(s - 1, t))
            if not _is_zero(hh):
                raise ValidationError(f"horizontal differential squares to nonzero at ({s},{t})")
            vv = _matmul(ops, self.vertical(s, t - 1), self.vertical(s, t), self.dim(s, t - 1))
            if not _is_zero(vv):
                raise ValidationError(f"vertical differential squares to nonzero at ({s},{t})")
            a = _matmul(ops, self.horizontal(s, t - 1), self.vertical(s, t), self.dim(s, t - 1))
            b = _matmul(ops, self.vertical(s - 1, t), self.horizontal(s, t), self.dim(s - 1, t))
            if n and a and any(ops.coerce(x + y) for ra, rb in zip(a, b) for x, y in zip(ra, rb)):
                raise ValidationError(f"differentials do not anticommute at ({s},{t})")
        return self

    # -- total complex ------------------------------------------------------

    def columns(self, n):
        """Columns contributing to total degree n, with their offsets."""
        out, off = [], 0
        for s in range(self.s_min, self.s_max + 1):
            d = self.dim(s, n - s) if n - s >= 0 else 0
            out.append((s, off, d))
            off += d
        return out, off

    def total_degrees(self):
        if not self.dims:
            return range(0)
        return range(min(s + t for s, t in self.dims), max(s + t for s, t in self.dims) + 1)

    def total_differential(self, n):
        """Matrix of D: Tot_n -> Tot_(n-1) in column-ordered bases."""
        cache = self.__dict__.setdefault("_cache", {})
        if ("D", n) not in cache:
            cache["D", n] = self._total_differential(n)
        return cache["D", n]

    def _total_differential(self, n):
        src, ns = self.columns(n)
        dst, nd = self.columns(n - 1)
        where = {s: off for s, off, _ in dst}
        mat = [[self.ops.coerce(0)] * ns for _ in range(nd)]
        for s, off, d in src:
            if not d:
                continue
            t = n - s
            for tgt_s, block in ((s - 1, self.horizontal(s, t)), (s, self.vertical(s, t))):
                if tgt_s not in where:
                    continue
                r0 = where[tgt_s]
                for i, row in enumerate(block):
                    for j, x in enumerate(row):
                        if x:
                            mat[r0 + i][off + j] = x
        return mat

    def total_homology_dims(self):
        out = {}
        for n in self.total_degrees():
            _, size = self.columns(n)
            out_rank = _rank(self.ops, self.total_differential(n)) if size else 0
            above = self.total_differential(n + 1)
            in_rank = _rank(self.ops, above) if above and above[0] else 0
            out[n] = size - out_rank - in_rank
        return out


# ---------------------------------------------------------------------------
# constructors


def _int_rows(M):
    return M.to_rows() if isinstance(M, IntegerMatrix) else M


def from_semisimplicial(X, ring, augmented=False, levelwise=None, face_maps=None):
    """Double complex of a semi-simplicial set.

    Discrete levels give a single row t = 0 whose horizontal differential is
    the alternating face sum (reduced chains for pointed sets).  With
    ``levelwise`` chain complexes and ``face_maps`` the columns are those
    complexes instead; see :func:`from_levelwise`.
    """
    if levelwise is not None:
        s_min = -1 if augmented else 0
        if set(levelwise) != set(range(s_min, X.dim + 1)):
            raise ValidationError("need one chain complex per level of X")
        return from_levelwise(levelwise, face_maps, ring, s_min)
    if X.pointed:
        if augmented:
            raise ValidationError("pointed sets carry no augmentation")
        C = reduced_realization_chains(X, ZZ)
    else:
        C = realization_chains(X, ZZ, augmented=augmented)
    dims, dh = {}, {}
    for d in C.degrees():
        dims[d, 0] = C.dim(d)
        if d > C.lo:
            dh[d, 0] = C.boundary(d).to_rows()
    return DoubleComplex(ring, C.lo, dims, dh).validate()


def from_levelwise(complexes, face_maps, ring, s_min=0):
    """Double complex from one chain complex per level and face chain maps.

    ``face_maps[s]`` lists the chain maps d_0..d_s out of level s (a single
    augmentation map for s = 0 when s_min = -1).  The simplicial identities
    must hold on the nose; the vertical differential of column s carries the
    sign (-1)^s.
    """
    s_max = max(complexes)
    for C in complexes.values():
        if C.lo < 0:
            raise ValidationError("levelwise complexes must live in degrees >= 0")
        C.with_ring(ring).validate()
    for s in range(s_min + 1, s_max + 1):
        maps = face_maps.get(s, [])
        expected = 1 if s == 0 else s + 1
        if len(maps) != expected:
            raise ValidationError(f"level {s} needs {expected} face maps")
        for i, f in enumerate(maps):
            try:
                f.validate()
            except ValidationError as exc:
                raise ValidationError(f"face map ({s}, {i}): {exc}") from None
    for s in range(max(s_min + 2, 1), s_max + 1):
        for j in range(s + 1):
            for i in range(j):
                for t in complexes[s].degrees():
                    lhs = face_maps[s - 1][i if s > 1 else 0].component(t) @ face_maps[s][j].component(t)
                    rhs = face_maps[s - 1][j - 1 if s > 1 else 0].component(t) @ face_maps[s][i].component(t)
                    diff = lhs - rhs
                    if ring.kind == "Fp":
                        diff = diff.mod(ring.p)
                    if not diff.is_zero():
                        raise ValidationError(f"simplicial identity fails at (s={s}, i={i}, j={j})")
    dims, dh, dv = {}, {}, {}
    for s, C in complexes.items():
        for t in C.degrees():
            dims[s, t] = C.dim(t)
            if t > C.lo:
                dv[s, t] = (C.boundary(t) if s % 2 == 0 else -C.boundary(t)).to_rows()
    for s in range(s_min + 1, s_max + 1):
        for t in complexes[s].degrees():
            total = None
            for i, f in enumerate(face_maps[s]):
                m = f.component(t)
                m = m if i % 2 == 0 else -m
                total = m if total is None else total + m
            if total is not None and total.nrows and total.ncols:
                dh[s, t] = total.to_rows()
    return DoubleComplex(ring, s_min, dims, dh, dv).validate()


def _elementary_piece(kind, s, t):
    """Basis elements (bidegrees) and nonzero differential entries of a piece."""
    if kind == "dot":
        return [(s, t)], [], []
    if kind == "square":
        # a -> b horizontally, a -> c vertically, c -> e horizontally, b -> -e vertically
        return [(s, t), (s - 1, t), (s, t - 1), (s - 1, t - 1)], [(0, 1, 1), (2, 3, 1)], [(0, 2, 1), (1, 3, -1)]
    # staircase of length L: x -h-> c1 <-v- b1 -h-> c2 <-v- b2 ... -h-> c_(L+1)
    L = kind
    cells = [(s, t)]
    hs, vs = [], []
    prev = 0
    for k in range(1, L + 2):
        cells.append((s - k, t + k - 1))
        c = len(cells) - 1
        hs.append((prev, c, 1))
        if k <= L:
            cells.append((s - k, t + k))
            b = len(cells) - 1
            vs.append((b, c, 1))
            prev = b
    return cells, hs, vs


def random_double_complex(rng, ring, width=4, height=4, s_min=0, pieces=6, shuffle=True):
    """Random valid double complex on the grid [s_min, s_min+width) x [0, height).

    Built as a direct sum of dots, squares and staircases (which carry
    higher differentials), then hidden by a random change of basis in every
    bidegree.
    """
    ops = FieldOps(ring)
    cells, hs, vs = [], [], []
    s_hi = s_min + width - 1
    for _ in range(pieces):
        kind = rng.choice(["dot", "square", 0, 1, 2])
        for _ in range(20):
            s = rng.randint(s_min, s_hi)
            t = rng.randint(0, height - 1)
            pc, ph, pv = _elementary_piece(kind, s, t)
            if all(s_min <= a <= s_hi and 0 <= b < height for a, b in pc):
                base = len(cells)
                cells += pc
                hs += [(base + i, base + j, c) for i, j, c in ph]
                vs += [(base + i, base + j, c) for i, j, c in pv]
                break
    slot, dims = {}, {}
    for k, bd in enumerate(cells):
        slot[k] = dims.get(bd, 0)
        dims[bd] = slot[k] + 1

    def assemble(edges, shift):
        out = {}
        for i, j, c in edges:
            key = cells[i]
            tgt = (key[0] - shift[0], key[1] - shift[1])
            m = out.setdefault(key, [[0] * dims[key] for _ in range(dims[tgt])])
            m[slot[j]][slot[i]] = c
        return out

    dh = assemble(hs, (1, 0))
    dv = assemble(vs, (0, 1))
    if shuffle:
        change = {bd: _random_invertible(rng, ops, d) for bd, d in dims.items()}
        dh = {k: _conjugate(ops, m, change[(k[0] - 1, k[1])], change[k]) for k, m in dh.items()}
        dv = {k: _conjugate(ops, m, change[(k[0], k[1] - 1)], change[k]) for k, m in dv.items()}
    return DoubleComplex(ring, s_min, dims, dh, dv).validate()


def _random_invertible(rng, ops, n):
    """(P, P^-1) from a product of elementary row operations."""
    P = [[ops.coerce(int(i == j)) for j in range(n)] for i in range(n)]
    Q = [row[:] for row in P]
    if n < 2:
        return P, Q
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2)
        c = ops.coerce(rng.randint(-2, 2))
        # P <- E P with E = I + c e_ij; Q <- Q E^-1
        P[i] = [ops.coerce(a + c * b) for a, b in zip(P[i], P[j])]
        for row in Q:
            row[j] = ops.coerce(row[j] - c * row[i])
    return P, Q


def _conjugate(ops, m, tgt_change, src_change):
    P, _ = tgt_change
    _, Qinv = src_change
    inner = _matmul(ops, P, m, len(m))
    return _matmul(ops, inner, Qinv, len(Qinv))


# ---------------------------------------------------------------------------
# pages


@dataclass
class Page:
    r: int
    dims: dict                    # (s, t) -> dimension
    differentials: dict           # (s, t) -> matrix of d^r out of (s, t)

    def dim(self, s, t):
        return self.dims.get((s, t), 0)

    def total(self, n):
        return sum(d for (s, t), d in self.dims.items() if s + t == n)


def _cycles(D, n, top, floor):
    """Basis of {x in Tot_n supported in columns <= top : Dx supported in
    columns <= floor}, padded to full length.  Cached per complex."""
    top = min(top, D.s_max)
    floor = max(floor, D.s_min - 1)
    cache = D.__dict__.setdefault("_cache", {})
    key = ("Z", n, top, floor)
    if key not in cache:
        ops = D.ops
        cols, size = D.columns(n)
        dcols, _ = D.columns(n - 1)
        mat = D.total_differential(n)
        support = sum(d for s, _, d in cols if s <= top)
        bad_rows = [off + i for s, off, d in dcols if s > floor for i in range(d)]
        restricted = [[mat[i][j] for j in range(support)] for i in bad_rows]
        basis = _kernel(ops, restricted, support) if support else []
        cache[key] = [v + [ops.coerce(0)] * (size - support) for v in basis]
    return cache[key]


def _filtration_data(D, n, p, r):
    """Z^r_p in total degree n (basis of lifts) and the boundary subspace
    proj_p(D Z^(r-1)_(p+r-1)), both projected to column p."""
    ops = D.ops
    cols, _ = D.columns(n)
    offs = {s: (off, d) for s, off, d in cols}
    mat = D.total_differential(n)
    lifts = _cycles(D, n, p, p - r)
    off, d = offs.get(p, (0, 0))
    mat_up = D.total_differential(n + 1)
    rows_p = mat_up[off:off + d]
    bounds = [_matvec(ops, rows_p, v) for v in _cycles(D, n + 1, p + r - 1, p)]
    return lifts, bounds, off, d, mat


def pages(D, r_max=None):
    """Pages E^1 .. E^r_max (default: until every later page is equal)."""
    D.validate()
    ops = D.ops
    extent = D.s_max - D.s_min
    if r_max is None:
        r_max = extent + 1
    out = []
    for r in range(1, r_max + 1):
        reps = {}          # (p, n) -> (Echelon seeded with boundaries, list of lifts)
        dims = {}
        for n in D.total_degrees():
            for p in range(D.s_min, D.s_max + 1):
                t = n - p
                if t < 0 or not D.dim(p, t):
                    continue
                lifts, bounds, off, d, mat = _filtration_data(D, n, p, r)
                ech = Echelon(ops, d)
                for k, b in enumerate(bounds):
                    ech.add(b, ("b", k))
                chosen = []
                for k, x in enumerate(lifts):
                    if ech.add(x[off:off + d], ("e", len(chosen))):
                        chosen.append(x)
                reps[p, n] = (ech, chosen, mat)
                if chosen:
                    dims[p, t] = len(chosen)
        diffs = {}
        for (p, n), (ech, chosen, mat) in reps.items():
            q = p - r
            if not chosen or (q, n - 1) not in reps or not reps[q, n - 1][1]:
                continue
            tgt_ech, tgt_chosen, _ = reps[q, n - 1]
            tcols, _ = D.columns(n - 1)
            toff, tdim = next((off, d) for s, off, d in tcols if s == q)
            m = [[ops.coerce(0)] * len(chosen) for _ in tgt_chosen]
            for j, x in enumerate(chosen):
                image = _matvec(ops, mat, x)[toff:toff + tdim]
                residual, coeff = tgt_ech.reduce(image)
                if any(residual):
                    raise AssertionError("d^r image left the filtration subspace")
                for (kind, idx), c in coeff.items():
                    if kind == "e":
                        m[idx][j] = ops.coerce(c)
            if not _is_zero(m):
                diffs[p, n - p] = m
        out.append(Page(r, dims, diffs))
    return out


def infinity_page(D):
    return pages(D)[-1]


@dataclass
class AbutmentReport:
    ok: bool
    rows: list          # (n, sum of E^inf dims, dim H_n(Tot))

    def lines(self, shift=0):
        out = []
        for n, e, h in self.rows:
            label = f"n={n}" if not shift else f"n={n} (cone degree {n + shift})"
            out.append(f"{label}: E_inf={e} H(Tot)={h} {'ok' if e == h else 'MISMATCH'}")
        return out


def abutment_check(D, page_list=None):
    """Compare E^infinity totals with the homology of the total complex."""
    D.validate()
    last = (page_list or pages(D))[-1]
    homology = D.total_homology_dims()
    rows = [(n, last.total(n), homology.get(n, 0)) for n in D.total_degrees()]
    return AbutmentReport(all(e == h for _, e, h in rows), rows)


@dataclass
class AugmentedResult:
    pages: list
    abutment: AbutmentReport

    def cone_dims(self):
        """Homology of the cone of the augmentation, indexed by cone degree."""
        return {n + 1: h for n, _, h in self.abutment.rows}


def augmented_pages(X_or_D, ring=None, r_max=None):
    """Pages of the augmented spectral sequence (column s = -1 present).

    Total degree n corresponds to degree n+1 of the cone of the augmentation.
    """
    if isinstance(X_or_D, DoubleComplex):
        D = X_or_D
        if D.s_min != -1:
            raise ValidationError("augmented pages need a column at s = -1")
    else:
        if not X_or_D.augmented:
            raise ValidationError("augmented pages need an augmented set")
        D = from_semisimplicial(X_or_D, ring, augmented=True)
    ps = pages(D, r_max)
    return AugmentedResult(ps, abutment_check(D, ps if r_max is None else None))


# ---------------------------------------------------------------------------
# output


def format_pages(D, page_list):
    lines = []
    s_range = range(D.s_min, D.s_max + 1)
    width = max([len(str(d)) for p in page_list for d in p.dims.values()] + [len(str(D.s_max)), len(str(D.s_min))])
    for pg in page_list:
        lines.append(f"E^{pg.r}")
        for t in range(D.t_max, -1, -1):
            cells = " ".join(str(pg.dim(s, t)).rjust(width) for s in s_range)
            lines.append(f"t={t:<3}| {cells}")
        lines.append("     +" + "-" * (len(s_range) * (width + 1)))
        lines.append("    s= " + " ".join(str(s).rjust(width) for s in s_range))
        for (s, t), m in sorted(pg.differentials.items()):
            lines.append(f"  d^{pg.r}: ({s},{t}) -> ({s - pg.r},{t + pg.r - 1}) rank {_rank(D.ops, m)}")
    return "\n".join(lines)


def _entry(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def pages_to_dict(D, page_list, abutment=None):
    out = {
        "field": D.ring.symbol if D.ring.kind == "Q" else f"Fp:{D.ring.p}",
        "s_min": D.s_min,
        "pages": [{
            "r": pg.r,
            "dims": [[s, t, d] for (s, t), d in sorted(pg.dims.items())],
            "differentials": [{"source": [s, t], "target": [s - pg.r, t + pg.r - 1],
                               "matrix": [[_entry(x) for x in row] for row in m]}
                              for (s, t), m in sorted(pg.differentials.items())],
        } for pg in page_list],
    }
    if abutment is not None:
        out["abutment"] = [{"n": n, "e_infinity": e, "total_homology": h} for n, e, h in abutment.rows]
        out["abutment_ok"] = abutment.ok
    return out


def pages_to_json(D, page_list, abutment=None):
    return json.dumps(pages_to_dict(D, page_list, abutment), indent=1, sort_keys=True) + "\n"


def seeded_rng(seed):
    return random.Random(seed)
