from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semistab import ranges as R
from semistab.exactalg import ValidationError

# closed forms written out independently of the library
def oriented_k1(name, g):
    return (2 * g + 1) // 3 if name in "FX" else 2 * g // 3


def oriented_k2(name, g):
    return {"F": 2 * g // 3, "Y": 2 * g // 3, "G": (2 * g - 1) // 3, "X": (2 * g + 1) // 3}[name]


def eps(i, n):
    return int(n >= i and (n - i) % 6 == 0)


def nonorientable_k1(name, n):
    if name in ("F'", "X'"):
        return n // 3 + eps(2, n)
    if name in ("G'", "Y'"):
        return (n - 1) // 3 + eps(6, n)
    return n // 3


systems = st.one_of(
    st.builds(R.RangeSystem, st.just(R.ORIENTED), st.integers(0, 3), st.integers(1, 5), st.integers(-1, 14)),
    st.builds(R.RangeSystem, st.just(R.NONORIENTABLE), st.integers(0, 3), st.integers(1, 4), st.integers(-1, 12),
              st.integers(0, 3), st.integers(1, 4)),
)


class TestSolve:
    def test_oriented_k1_table(self):
        t = R.solve(R.RangeSystem(R.ORIENTED, 0, 1, 10))
        assert t.column("F", 0) == t.column("X", 0) == [0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 7]
        assert t.column("G", 0) == t.column("Y", 0) == [0, 0, 1, 2, 2, 3, 4, 4, 5, 6, 6]
        assert not t.forced

    def test_oriented_k2_points(self):
        t = R.solve(R.RangeSystem(R.ORIENTED, 0, 2, 10))
        assert (t("F", 6), t("G", 5), t("X", 4), t("Y", 7)) == (4, 3, 3, 4)

    def test_oriented_k2_forced_at_start(self):
        # G(-1) <= X(-2) = -1 contradicts G(-1) >= 0
        t = R.solve(R.RangeSystem(R.ORIENTED, 0, 2, 10))
        assert [(v.function, v.g) for v in t.forced] == [("G", -1)]

    def test_nonorientable_points(self):
        t = R.solve(R.RangeSystem(R.NONORIENTABLE, 0, 1, 12, 0, 1))
        assert (t("F'", 8), t("G'", 6), t("H'", 9), t("F'", 2)) == (3, 2, 3, 1)

    def test_projective_defaults(self):
        a = R.solve(R.RangeSystem(R.NONORIENTABLE, 1, 2, 8))
        b = R.solve(R.RangeSystem(R.NONORIENTABLE, 1, 2, 8, 1, 2))
        assert a.values == b.values

    def test_oriented_rejects_projective(self):
        with pytest.raises(ValidationError):
            R.RangeSystem(R.ORIENTED, 0, 1, 5, 0, 1)

    def test_rejects_k0(self):
        with pytest.raises(ValidationError):
            R.RangeSystem(R.ORIENTED, 0, 0, 5)

    def test_empty_domain(self):
        t = R.solve(R.RangeSystem(R.ORIENTED, 4, 1, 1))
        assert list(t.domain()) == []
        assert t.to_csv() == "g,F,G,X,Y\n"

    def test_convention_below_domain(self):
        t = R.solve(R.RangeSystem(R.ORIENTED, 3, 1, 6))
        assert t("F", 0) == -1 and t("F", 2) >= 0

    @given(systems)
    @settings(max_examples=60, deadline=None)
    def test_round_trip_and_invariants(self, sys):
        t = R.solve(sys)
        bad = R.check_feasible(t, sys)
        assert all(v.kind == "lower" for v in bad)
        assert bad == t.forced
        assert R.project(t.copy(), sys) == 0
        for f in t.names:
            col = t.column(f, sys.lo(f))
            assert all(0 <= b - a <= 1 for a, b in zip(col, col[1:]))

    @given(systems)
    @settings(max_examples=60, deadline=None)
    def test_caps(self, sys):
        t = R.solve(sys)
        caps = {"X": lambda g: g, "Y": lambda g: g - 1, "X'": lambda n: n // 2,
                "Y'": lambda n: n // 2 - 1, "Z'": lambda n: n // 3}
        for f, cap in caps.items():
            if f not in t.names:
                continue
            for g in t.domain():
                if t(f, g) >= 1:
                    assert t(f, g) <= cap(g)


class TestCheckFeasible:
    def test_solution_is_clean(self):
        sys = R.RangeSystem(R.ORIENTED, 0, 1, 10)
        assert R.check_feasible(R.solve(sys), sys) == []

    def test_bumped_entry(self):
        sys = R.RangeSystem(R.ORIENTED, 0, 1, 10)
        t = R.solve(sys)
        t.set("F", 3, 3)
        labels = {(v.inequality, v.g) for v in R.check_feasible(t, sys)}
        assert ("F(g) ≤ X(g)", 3) in labels

    def test_convention_violation(self):
        sys = R.RangeSystem(R.ORIENTED, 5, 1, 8)
        names = R.FUNCTIONS[R.ORIENTED]
        t = R.RangeTable(R.ORIENTED, -1, 8, {f: -1 for f in names}, {f: [0] * 10 for f in names})
        bad = [v for v in R.check_feasible(t, sys) if v.kind == "convention"]
        assert sorted({v.g for v in bad}) == [-1, 0, 1, 2, 3]

    def test_domain_mismatch(self):
        sys = R.RangeSystem(R.ORIENTED, 0, 1, 10)
        t = R.solve(R.RangeSystem(R.ORIENTED, 0, 1, 9))
        assert [v.kind for v in R.check_feasible(t, sys)] == ["domain"]

    def test_csv_round_trip(self):
        sys = R.RangeSystem(R.NONORIENTABLE, 1, 1, 9, 2, 1)
        t = R.solve(sys)
        back = R.RangeTable.from_csv(t.to_csv(), sys)
        assert back.values == t.values and back.start == t.start

    @pytest.mark.parametrize("text", ["", "a,b\n1,2\n", "g,F,G,X,Y\n0,1,x,0,0\n", "g,F,G,X,Y\n0,0,0,0,0\n2,0,0,0,0\n"])
    def test_csv_rejects(self, text):
        with pytest.raises(ValidationError):
            R.RangeTable.from_csv(text)


class TestClosedForms:
    def test_examples(self):
        assert R.closed_form_reference("oriented-k1", "F", 7) == 5
        assert R.closed_form_reference("nonorientable-k1", "G'", 12) == 4
        assert R.closed_form_reference("oriented-k2", "G", 2) == 1

    def test_unknown_variant(self):
        with pytest.raises(ValidationError):
            R.closed_form_reference("oriented-k3", "F", 1)

    @pytest.mark.parametrize("variant,ref,names", [
        ("oriented-k1", oriented_k1, "FGXY"),
        ("oriented-k2", oriented_k2, "FGXY"),
        ("nonorientable-k1", nonorientable_k1, ["F'", "G'", "H'", "X'", "Y'", "Z'"]),
    ])
    def test_against_independent_formulas(self, variant, ref, names):
        for f in names:
            for g in range(0, 40):
                assert R.closed_form_reference(variant, f, g) == ref(f, g)

    def test_epsilon(self):
        assert [R.epsilon(2, n) for n in range(0, 15)] == [eps(2, n) for n in range(0, 15)]
        assert R.epsilon(6, 0) == 0


class TestOracle:
    @pytest.mark.parametrize("sys", [
        R.RangeSystem(R.ORIENTED, 0, 1, 6),
        R.RangeSystem(R.ORIENTED, 0, 2, 6),
        R.RangeSystem(R.ORIENTED, 1, 3, 6),
    ])
    def test_confirms(self, sys):
        assert R.maximality_oracle(sys).confirmed

    def test_refuses_large(self):
        with pytest.raises(ValidationError):
            R.maximality_oracle(R.RangeSystem(R.ORIENTED, 0, 1, 9))

    def test_trivial_domain(self):
        res = R.maximality_oracle(R.RangeSystem(R.ORIENTED, 4, 1, 2))
        assert res.confirmed and res.states_explored == 0

    @pytest.mark.parametrize("k", [1, 2])
    def test_bruteforce_tiny(self, k):
        # every table on g = -1..1 with steps in {0, 1}, filtered by check_feasible
        sys = R.RangeSystem(R.ORIENTED, 0, k, 1)
        names = R.FUNCTIONS[R.ORIENTED]
        cols = [[s, s + a, s + a + b] for s in (-1, 0) for a in (0, 1) for b in (0, 1)]
        best = {f: [-9] * 3 for f in names}
        for choice in product(cols, repeat=4):
            t = R.RangeTable(R.ORIENTED, -1, 1, {f: -1 for f in names}, dict(zip(names, choice)))
            if any(v.kind == "upper" for v in R.check_feasible(t, sys)):
                continue
            for f, col in zip(names, choice):
                best[f] = [max(a, b) for a, b in zip(best[f], col)]
        assert best == R.solve(sys).values


class TestTransforms:
    def test_formal_k(self):
        assert R.formal_k_from_pi0(0) == 2
        assert R.formal_k_from_pi0(2) == 5
        assert R.formal_k_from_pi0(3, projective_planes=True) == 3

    def test_background(self):
        assert R.background_space_transform(0, 1) == (0, 2)
        assert R.background_space_transform(3, 5) == (3, 5)
        assert R.background_space_transform(0, 1, 0, 1) == (0, 2, 0, 2)
