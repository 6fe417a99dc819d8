import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circle_complex
from semistab import specseq as S
from semistab.constructions import injective_words
from semistab.exactalg import GF, QQ, ZZ, ChainComplex, ChainMap, IntegerMatrix, ValidationError
from semistab.semisimp import SemiSimplicialSet


# --- independent field arithmetic and filtration oracle --------------------

class Field:
    def __init__(self, p=None):
        self.p = p

    def norm(self, x):
        return int(x) % self.p if self.p else Fraction(x)

    def inv(self, x):
        return pow(int(x), -1, self.p) if self.p else 1 / x


def rref_rank(F, rows):
    rows = [[F.norm(x) for x in r] for r in rows if any(r)]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        c = F.inv(rows[rank][col])
        rows[rank] = [F.norm(x * c) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [F.norm(a - f * b) for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def nullspace(F, rows, ncols):
    """Basis of {x : rows x = 0}."""
    rows = [[F.norm(x) for x in r] for r in rows]
    pivots, r = [], 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        c = F.inv(rows[r][col])
        rows[r] = [F.norm(x * c) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [F.norm(a - f * b) for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [F.norm(0)] * ncols
        v[free] = F.norm(1)
        for i, pc in enumerate(pivots):
            v[pc] = F.norm(-rows[i][free])
        basis.append(v)
    return basis


def total_complex(D, n):
    """Column layout and total differential built from the blocks."""
    def layout(m):
        cols, off = [], 0
        for s in range(D.s_min, D.s_max + 1):
            d = D.dim(s, m - s)
            cols.append((s, off, d))
            off += d
        return cols, off
    src, ns = layout(n)
    tgt, nt = layout(n - 1)
    toff = {s: o for s, o, _ in tgt}
    M = [[0] * ns for _ in range(nt)]
    for s, off, d in src:
        t = n - s
        if not d:
            continue
        for blk, ts in ((D.horizontal(s, t), s - 1), (D.vertical(s, t), s)):
            if ts not in toff:
                continue
            for i, row in enumerate(blk):
                for j, x in enumerate(row):
                    M[toff[ts] + i][off + j] = x
    return src, tgt, M


def z_space(F, D, n, p, r):
    """{x supported in columns <= p : Dx supported in columns <= p - r}."""
    src, tgt, M = total_complex(D, n)
    support = [off + i for s, off, d in src if s <= p for i in range(d)]
    bad = [off + i for s, off, d in tgt if s > p - r for i in range(d)]
    sub = [[M[i][j] for j in support] for i in bad]
    out = []
    for v in nullspace(F, sub, len(support)):
        full = [F.norm(0)] * sum(d for _, _, d in src)
        for k, j in enumerate(support):
            full[j] = v[k]
        out.append(full)
    return out


def oracle_dim(F, D, n, p, r):
    """dim E^r_p in total degree n = dim Z^r_p - dim(Z^(r-1)_(p-1) + D Z^(r-1)_(p+r-1))."""
    z = z_space(F, D, n, p, r)
    lower = z_space(F, D, n, p - 1, r - 1)
    _, _, M_up = total_complex(D, n + 1)
    bounds = [[sum(F.norm(a * b) for a, b in zip(row, v)) for row in M_up] for v in z_space(F, D, n + 1, p + r - 1, r - 1)]
    return rref_rank(F, z) - rref_rank(F, lower + bounds)


def check_against_oracle(D, F):
    ps = S.pages(D)
    for pg in ps:
        for n in D.total_degrees():
            for p in range(D.s_min, D.s_max + 1):
                if n - p < 0:
                    continue
                assert pg.dim(p, n - p) == oracle_dim(F, D, n, p, pg.r), (pg.r, p, n)
    return ps


# --- tests ---------------------------------------------------------------

class TestConstruction:
    def test_discrete_injective_words(self):
        D = S.from_semisimplicial(injective_words(3), GF(2))
        assert D.dims == {(0, 0): 3, (1, 0): 6, (2, 0): 6}

    def test_augmented_adds_column(self):
        D = S.from_semisimplicial(injective_words(3), GF(2), augmented=True)
        assert D.s_min == -1 and D.dim(-1, 0) == 1

    def test_levelwise_two_columns(self):
        # loop: one vertex, one edge with both faces on it; every level carries Q -0-> Q
        X = SemiSimplicialSet([["v"], ["e"]], [[()], [(0, 0)]])
        C = ChainComplex.from_boundaries(ZZ, 0, [1, 1], {1: IntegerMatrix.zeros(1, 1)})
        ident = ChainMap(C, C, {0: IntegerMatrix.identity(1), 1: IntegerMatrix.identity(1)})
        D = S.from_semisimplicial(X, QQ, levelwise={0: C, 1: C}, face_maps={1: [ident, ident]})
        assert D.dims == {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
        assert D.total_homology_dims() == {0: 1, 1: 2, 2: 1}

    def test_levelwise_identity_violation(self):
        C = circle_complex()
        ident = ChainMap(C, C, {0: IntegerMatrix.identity(2), 1: IntegerMatrix.identity(2)})
        # swapping the two parallel edges is a chain map but breaks d_0 d_1 = d_0 d_0
        swap = ChainMap(C, C, {0: IntegerMatrix.identity(2),
                               1: IntegerMatrix.from_rows([[0, 1], [1, 0]])})
        faces = {1: [ident, ident], 2: [ident, swap, ident]}
        with pytest.raises(ValidationError, match=r"s=2, i=0, j=1"):
            S.from_levelwise({0: C, 1: C, 2: C}, faces, QQ)

    def test_corrupted_horizontal(self):
        D = S.DoubleComplex(QQ, 0, {(0, 0): 1, (1, 0): 1, (2, 0): 1},
                            dh={(1, 0): [[1]], (2, 0): [[1]]})
        with pytest.raises(ValidationError):
            S.abutment_check(D)

    def test_first_quadrant(self):
        with pytest.raises(ValidationError):
            S.DoubleComplex(QQ, 0, {(-1, 0): 1})


class TestPages:
    def test_injective_words_f2(self):
        ps = S.pages(S.from_semisimplicial(injective_words(3), GF(2)))
        assert [ps[-1].total(n) for n in range(3)] == [1, 0, 2]
        assert ps[1].dims == ps[-1].dims

    def test_cone_of_identity(self):
        C = circle_complex()
        ident = ChainMap(C, C, {0: IntegerMatrix.identity(2), 1: IntegerMatrix.identity(2)})
        D = S.from_levelwise({-1: C, 0: C}, {0: [ident]}, QQ, s_min=-1)
        ps = S.pages(D)
        assert ps[0].dims and ps[1].dims == {}

    @pytest.mark.parametrize("field", [QQ, GF(2), GF(3)])
    def test_discrete_e2_is_final(self, field):
        D = S.from_semisimplicial(injective_words(4), field)
        ps = S.pages(D)
        for pg in ps[1:]:
            assert pg.dims == ps[1].dims

    def test_abutment_injective_words_4(self):
        rep = S.abutment_check(S.from_semisimplicial(injective_words(4), QQ))
        assert rep.ok and [h for _, _, h in rep.rows] == [1, 0, 0, 9]

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("field,p", [(QQ, None), (GF(2), 2), (GF(3), 3)])
    def test_random_against_filtration_oracle(self, seed, field, p):
        D = S.random_double_complex(S.seeded_rng(seed), field, width=3, height=3)
        check_against_oracle(D, Field(p))

    def test_augmented_oracle(self):
        D = S.from_semisimplicial(injective_words(3), QQ, augmented=True)
        check_against_oracle(D, Field())

    @given(st.integers(0, 10**6), st.sampled_from([QQ, GF(2), GF(3)]))
    @settings(max_examples=30, deadline=None)
    def test_page_laws(self, seed, field):
        D = S.random_double_complex(S.seeded_rng(seed), field, width=3, height=3)
        ps = S.pages(D)
        F = Field(field.p if field.kind == "Fp" else None)
        for a, b in zip(ps, ps[1:]):
            for key, d in b.dims.items():
                assert d <= a.dim(*key)
            # next page = ker d^r / im d^r, read off the matrix ranks
            for (s, t), dim in a.dims.items():
                out = a.differentials.get((s, t))
                inc = a.differentials.get((s + a.r, t - a.r + 1))
                rk_out = rref_rank(F, out) if out else 0
                rk_in = rref_rank(F, inc) if inc else 0
                assert b.dim(s, t) == dim - rk_out - rk_in
            for (s, t), m in a.differentials.items():
                nxt = a.differentials.get((s - a.r, t + a.r - 1))
                if nxt:
                    prod = [[sum(F.norm(x * y) for x, y in zip(row, col)) for col in zip(*m)] for row in nxt]
                    assert all(F.norm(v) == 0 for row in prod for v in row)
        assert S.abutment_check(D, ps).ok

    def test_higher_differentials_occur(self):
        seen = set()
        for seed in range(40):
            D = S.random_double_complex(S.seeded_rng(seed), QQ)
            for pg in S.pages(D):
                if pg.differentials:
                    seen.add(pg.r)
        assert {1, 2}.issubset(seen) and max(seen) >= 3


class TestAugmented:
    def test_three_letters(self):
        res = S.augmented_pages(injective_words(3), GF(2))
        totals = {n: h for n, _, h in res.abutment.rows}
        assert totals[-1] == totals[0] == totals[1] == 0 and totals[2] == 2
        assert res.cone_dims()[3] == 2

    def test_one_letter(self):
        res = S.augmented_pages(injective_words(1), QQ)
        assert all(h == 0 for _, _, h in res.abutment.rows)

    def test_four_letters(self):
        res = S.augmented_pages(injective_words(4), QQ)
        assert all(h == 0 for n, _, h in res.abutment.rows if n <= 2)

    def test_needs_augmentation(self):
        with pytest.raises(ValidationError):
            S.augmented_pages(SemiSimplicialSet([["a"]], [[()]]), QQ)


class TestOutput:
    def test_text_grid(self):
        D = S.from_semisimplicial(injective_words(3), GF(2), augmented=True)
        text = S.format_pages(D, S.pages(D, 2))
        assert text.splitlines()[0] == "E^1"
        assert "t=0  |  1  3  6  6" in text
        assert "s= -1  0  1  2" in text
        assert "d^1: (2,0) -> (1,0) rank 4" in text

    def test_json(self):
        D = S.from_semisimplicial(injective_words(2), QQ)
        ps = S.pages(D)
        data = json.loads(S.pages_to_json(D, ps, S.abutment_check(D, ps)))
        assert data["field"] == "Q" and data["abutment_ok"]
        assert data["pages"][0]["dims"] == [[0, 0, 2], [1, 0, 2]]
        # rationals are written as exact strings; (1,2) has boundary (2) - (1)
        assert data["pages"][0]["differentials"][0]["matrix"] == [["-1", "1"], ["1", "-1"]]
