"""Exact linear algebra over Z, Q and F_p.

Integer matrices, Smith normal form, chain complexes, homology with torsion
and algebraic mapping cones.  Nothing in here touches floating point.
"""

from dataclasses import dataclass, field

from . import kernels


class ValidationError(ValueError):
    """A structure violates one of its defining identities."""


# ---------------------------------------------------------------------------
# coefficient rings


@dataclass(frozen=True)
class Ring:
    kind: str  # "Z", "Q" or "Fp"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown ring {self.kind!r}")
        if self.kind == "Fp" and not is_prime(self.p):
            raise ValueError(f"F_p needs a prime, got {self.p}")

    @property
    def is_field(self):
        return self.kind != "Z"

    def __str__(self):
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    @property
    def symbol(self):
        return f"F{self.p}" if self.kind == "Fp" else self.kind

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("Z", "Q"):
            return cls(text)
        if text.startswith("Fp:"):
            try:
                p = int(text[3:])
            except ValueError:
                raise ValueError(f"bad prime in {text!r}") from None
            if p > 2**31:
                raise ValueError(f"prime {p} exceeds 2^31")
            return cls("Fp", p)
        raise ValueError(f"unknown coefficients {text!r} (expected Z, Q or Fp:P)")


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p):
    return Ring("Fp", p)


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# matrices


class IntegerMatrix:
    """Immutable integer matrix, stored sparsely with dense semantics."""

    __slots__ = ("_rows", "_cols", "_data")

    def __init__(self, nrows, ncols, entries=None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix dimension")
        data = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            v = int(v)
            if v:
                data[i, j] = v
        self._rows = nrows
        self._cols = ncols
        self._data = data

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols,
                   {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def zeros(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def shape(self):
        return self._rows, self._cols

    @property
    def nrows(self):
        return self._rows

    @property
    def ncols(self):
        return self._cols

    def entries(self):
        """Copy of the nonzero entries as ``{(i, j): value}``."""
        return dict(self._data)

    def __getitem__(self, key):
        i, j = key
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(key)
        return self._data.get((i, j), 0)

    def to_rows(self):
        out = [[0] * self._cols for _ in range(self._rows)]
        for (i, j), v in self._data.items():
            out[i][j] = v
        return out

    def is_zero(self):
        return not self._data

    def transpose(self):
        return IntegerMatrix(self._cols, self._rows, {(j, i): v for (i, j), v in self._data.items()})

    def mod(self, p):
        return IntegerMatrix(self._rows, self._cols, {k: v % p for k, v in self._data.items()})

    def __neg__(self):
        return IntegerMatrix(self._rows, self._cols, {k: -v for k, v in self._data.items()})

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        data = dict(self._data)
        for k, v in other._data.items():
            data[k] = data.get(k, 0) + v
        return IntegerMatrix(self._rows, self._cols, data)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if self._cols != other._rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row = {}
        for (k, j), v in other._data.items():
            by_row.setdefault(k, []).append((j, v))
        data = {}
        for (i, k), a in self._data.items():
            for j, b in by_row.get(k, ()):
                data[i, j] = data.get((i, j), 0) + a * b
        return IntegerMatrix(self._rows, other._cols, data)

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, frozenset(self._data.items())))

    def __repr__(self):
        return f"IntegerMatrix({self._rows}, {self._cols}, {self.to_rows()!r})"

    @staticmethod
    def block(blocks):
        """Assemble a block matrix from a grid of IntegerMatrix blocks."""
        heights = [row[0].nrows for row in blocks]
        widths = [b.ncols for b in blocks[0]] if blocks else []
        data = {}
        r0 = 0
        for bi, row in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(row):
                if b.shape != (heights[bi], widths[bj]):
                    raise ValueError("inconsistent block shapes")
                for (i, j), v in b._data.items():
                    data[r0 + i, c0 + j] = v
                c0 += widths[bj]
            r0 += heights[bi]
        return IntegerMatrix(sum(heights), sum(widths), data)


def rank(M, ring=ZZ):
    """Rank over the fraction field of Z (for Z and Q) or over F_p."""
    if ring.kind == "Fp":
        return kernels.rank_mod_p(M.entries(), M.nrows, M.ncols, ring.p)
    return len(kernels.elementary_divisors(M.entries(), M.nrows, M.ncols))


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple
    rank: int
    U: IntegerMatrix = None
    V: IntegerMatrix = None


def smith_normal_form(M, with_transforms=False):
    """Elementary divisors of ``M`` and optionally unimodular U, V with U M V = D."""
    if not with_transforms:
        d = kernels.elementary_divisors(M.entries(), M.nrows, M.ncols)
        return SmithForm(tuple(d), len(d))
    A, U, V = _snf_with_transforms(M.to_rows(), M.nrows, M.ncols)
    diag = tuple(A[i][i] for i in range(min(M.nrows, M.ncols)) if A[i][i])
    return SmithForm(diag, len(diag), IntegerMatrix.from_rows(U, M.nrows),
                     IntegerMatrix.from_rows(V, M.ncols))


def _snf_with_transforms(A, m, n):
    # dense big-int SNF; U accumulates row operations, V column operations
    A = [row[:] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
            rem = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rem += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rem:
                _, i, j = min(rem, key=lambda x: x[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                changed = True
            else:
                # enforce divisibility of the remaining block by the pivot
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % A[t][t]), None)
                if bad is not None:
                    add_row(t, bad[0], 1)
                    changed = True
            if not changed:
                break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V


# ---------------------------------------------------------------------------
# chain complexes


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    free_rank: int
    torsion: tuple = ()

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def format(self, ring=ZZ):
        parts = []
        sym = ring.symbol
        if self.free_rank == 1:
            parts.append(sym)
        elif self.free_rank > 1:
            parts.append(f"{sym}^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ChainComplex:
    """Graded free modules in degrees ``lo .. lo+len(dims)-1`` with boundaries.

    ``boundaries[k]`` is the matrix of the boundary out of degree ``lo + k``;
    it has ``dims[k-1]`` rows (0 rows for the lowest degree) and ``dims[k]``
    columns.
    """

    ring: Ring
    lo: int
    dims: tuple
    boundaries: tuple
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.dims) != len(self.boundaries):
            raise ValueError("one boundary per degree required")
        for k, (dim, b) in enumerate(zip(self.dims, self.boundaries)):
            below = self.dims[k - 1] if k else 0
            if b.shape != (below, dim):
                raise ValueError(f"boundary out of degree {self.lo + k} has shape {b.shape}, "
                                 f"expected {(below, dim)}")

    @classmethod
    def from_boundaries(cls, ring, lo, dims, boundaries):
        """Build from a dict or sequence of boundaries; missing ones are zero."""
        dims = tuple(dims)
        if not isinstance(boundaries, dict):
            boundaries = {lo + k: b for k, b in enumerate(boundaries)}
        mats = []
        for k, dim in enumerate(dims):
            below = dims[k - 1] if k else 0
            b = boundaries.get(lo + k)
            mats.append(b if b is not None else IntegerMatrix.zeros(below, dim))
        return cls(ring, lo, dims, tuple(mats))

    @property
    def hi(self):
        return self.lo + len(self.dims) - 1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, d):
        return self.dims[d - self.lo] if self.lo <= d <= self.hi else 0

    def boundary(self, d):
        """Boundary C_d -> C_{d-1}; a zero matrix outside the stored range."""
        if self.lo <= d <= self.hi:
            return self.boundaries[d - self.lo]
        return IntegerMatrix.zeros(self.dim(d - 1), self.dim(d))

    def with_ring(self, ring):
        return ChainComplex(ring, self.lo, self.dims, self.boundaries)

    def euler_characteristic(self):
        return sum((-1) ** d * self.dim(d) for d in self.degrees())

    def validate(self):
        """Raise ValidationError unless every composite of boundaries vanishes."""
        if self._cache.get("valid"):
            return self
        for d in range(self.lo + 1, self.hi + 1):
            prod = self.boundary(d - 1) @ self.boundary(d)
            if self.ring.kind == "Fp":
                prod = prod.mod(self.ring.p)
            if not prod.is_zero():
                raise ValidationError(f"boundary composite is nonzero out of degree {d}")
        self._cache["valid"] = True
        return self

    def _divisors(self, d):
        key = ("div", d)
        if key not in self._cache:
            b = self.boundary(d)
            if self.ring.kind == "Fp":
                r = rank(b, self.ring)
                self._cache[key] = (1,) * r
            else:
                self._cache[key] = tuple(kernels.elementary_divisors(b.entries(), b.nrows, b.ncols))
        return self._cache[key]


def homology(C, d):
    """H_d(C): free rank plus torsion divisors over Z, dimension over a field."""
    if not (C.lo <= d <= C.hi):
        return HomologyGroup(d, 0)
    C.validate()
    out_rank = len(C._divisors(d))
    incoming = C._divisors(d + 1)
    free = C.dim(d) - out_rank - len(incoming)
    torsion = tuple(t for t in incoming if t > 1) if C.ring.kind == "Z" else ()
    return HomologyGroup(d, free, torsion)


def homology_all(C):
    C.validate()
    return [homology(C, d) for d in C.degrees()]


def reduced_homology_all(C):
    """Homology with the degree-0 rank lowered by one when C_0 is nonzero.

    Meant for unaugmented cellular complexes of nonempty spaces.
    """
    groups = homology_all(C)
    if C.dim(0):
        groups = [HomologyGroup(g.degree, g.free_rank - (g.degree == 0), g.torsion) for g in groups]
    return groups


# ---------------------------------------------------------------------------
# chain maps and cones


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices ``maps[d]`` : source_d -> target_d (missing = zero)."""

    source: ChainComplex
    target: ChainComplex
    maps: dict

    def component(self, d):
        m = self.maps.get(d)
        if m is None:
            return IntegerMatrix.zeros(self.target.dim(d), self.source.dim(d))
        return m

    def validate(self):
        for d, m in self.maps.items():
            if m.shape != (self.target.dim(d), self.source.dim(d)):
                raise ValidationError(f"chain map component in degree {d} has shape {m.shape}")
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for d in range(lo, hi + 1):
            lhs = self.target.boundary(d) @ self.component(d)
            rhs = self.component(d - 1) @ self.source.boundary(d)
            diff = lhs - rhs
            if self.source.ring.kind == "Fp":
                diff = diff.mod(self.source.ring.p)
            if not diff.is_zero():
                raise ValidationError(f"map does not commute with boundaries in degree {d}")
        return self

    def induced_ranks(self, d):
        """Rank of the induced map on H_d over Q or F_p (used in tests)."""
        ring = self.source.ring if self.source.ring.is_field else QQ
        # image of cycles modulo boundaries: rank[f Z_d + B_d] - rank[B_d]
        z = _kernel_basis(self.source.boundary(d), ring)
        fz = self.component(d) @ z if z.ncols else IntegerMatrix.zeros(self.target.dim(d), 0)
        b = self.target.boundary(d + 1)
        both = IntegerMatrix.block([[fz, b]]) if fz.ncols or b.ncols else fz
        return rank(both, ring) - rank(b, ring)


def _kernel_basis(M, ring):
    """Integer matrix whose columns span ker M over the field attached to ``ring``."""
    n = M.ncols
    if ring.kind == "Fp":
        p = ring.p
        rows = [[v % p for v in r] for r in M.to_rows()]
        piv_cols = []
        r = 0
        for c in range(n):
            piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = pow(rows[r][c], -1, p)
            rows[r] = [v * inv % p for v in rows[r]]
            for i in range(len(rows)):
                if i != r and rows[i][c]:
                    f = rows[i][c]
                    rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
            piv_cols.append(c)
            r += 1
        free = [c for c in range(n) if c not in piv_cols]
        cols = {}
        for k, fc in enumerate(free):
            cols[fc, k] = 1
            for i, pc in enumerate(piv_cols):
                if rows[i][fc]:
                    cols[pc, k] = (-rows[i][fc]) % p
        return IntegerMatrix(n, len(free), cols)
    # over Q: integral kernel basis from V of the Smith form
    snf = smith_normal_form(M, with_transforms=True)
    V = snf.V
    return IntegerMatrix(n, n - snf.rank,
                         {(i, j - snf.rank): V[i, j] for i in range(n) for j in range(snf.rank, n) if V[i, j]})


def mapping_cone(f):
    """Cone(f)_d = source_{d-1} + target_d with differential
    (a, b) -> (-da, f(a) + db)."""
    f.source.validate()
    f.target.validate()
    f.validate()
    S, T = f.source, f.target
    if S.ring != T.ring:
        raise ValidationError("source and target have different rings")
    degs = [d for d in range(S.lo + 1, S.hi + 2)] + list(T.degrees())
    if not degs:
        return ChainComplex.from_boundaries(T.ring, 0, (), {})
    lo, hi = min(degs), max(degs)
    dims = [S.dim(d - 1) + T.dim(d) for d in range(lo, hi + 1)]
    bds = {}
    for d in range(lo, hi + 1):
        blocks = [[-S.boundary(d - 1), IntegerMatrix.zeros(S.dim(d - 2), T.dim(d))],
                  [f.component(d - 1), T.boundary(d)]]
        bds[d] = IntegerMatrix.block(blocks)
    return ChainComplex.from_boundaries(T.ring, lo, dims, bds)

