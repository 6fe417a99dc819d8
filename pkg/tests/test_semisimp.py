import json

import pytest
from hypothesis import given, settings

from semistab.constructions import injective_words, letter_inclusion
from semistab.exactalg import QQ, ZZ, ChainMap, ValidationError, homology_all, mapping_cone
from semistab.semisimp import (CONTRACTIBLE, SemiSimplicialMap, SemiSimplicialSet, chain_map,
                               homological_connectivity, identity_map, levelwise_cone,
                               realization_chains, reduced_homology, reduced_realization_chains)
from strategies import simplicial_sets, subcomplex_inclusions


def ranks(groups):
    return {g.degree: g.free_rank for g in groups if not g.is_zero()}


def two_points():
    return SemiSimplicialSet([["a", "b"]], [[(), ()]])


class TestValidate:
    def test_injective_words_valid(self):
        for n in range(0, 6):
            assert injective_words(n).validate() == []

    def test_empty_is_valid(self):
        assert SemiSimplicialSet.empty().validate() == []

    def test_broken_identity_names_triple(self):
        # one 2-simplex over a triangle whose second face is wired the wrong way round
        X = SemiSimplicialSet(
            [["0", "1", "2"], ["01", "02", "12"], ["012"]],
            [[(), (), ()], [(1, 0), (2, 0), (2, 1)], [(2, 0, 1)]],
        )
        bad = X.validate()
        assert bad and all(v.level == 2 and v.simplex == 0 for v in bad)
        assert {(v.i, v.j) for v in bad} <= {(0, 1), (0, 2), (1, 2)}

    def test_bad_augmentation(self):
        X = SemiSimplicialSet([["a", "b"], ["e"]], [[(), ()], [(1, 0)]], ["p", "q"], [0, 1])
        assert [v.kind for v in X.validate()] == ["augmentation identity e d_0 = e d_1"]

    def test_bad_basepoint(self):
        X = SemiSimplicialSet([["*", "a"], ["*"]], [[(), ()], [(1, 0)]], basepoints=[0, 0])
        assert any("basepoint" in v.kind for v in X.validate())

    def test_pointed_and_augmented_rejected(self):
        with pytest.raises(ValueError):
            SemiSimplicialSet([["a"]], [[()]], ["*"], [0], basepoints=[0])


class TestJson:
    @pytest.mark.parametrize("X", [injective_words(3), two_points(), SemiSimplicialSet.empty(),
                                   levelwise_cone(letter_inclusion(3, 3))])
    def test_round_trip(self, X):
        text = X.to_json()
        assert SemiSimplicialSet.from_json(text) == X
        assert SemiSimplicialSet.from_json(text).to_json() == text

    def test_layout(self):
        data = json.loads(injective_words(2).to_json())
        assert data["augmented"] and not data["pointed"]
        assert data["levels"] == [["()"], ["(1)", "(2)"], ["(1,2)", "(2,1)"]]
        assert data["faces"] == [[[0], [0]], [[1, 0], [0, 1]]]

    @pytest.mark.parametrize("text,where", [
        ("{", "malformed"),
        ('{"augmented": true, "pointed": false, "levels": [[""], ["a"]], "faces": []}', "$.faces"),
        ('{"augmented": false, "pointed": false, "levels": [["a"], [3]], "faces": [[]]}', "$.levels[1]"),
        ('{"augmented": false, "pointed": false, "levels": [["a"], ["e"]], "faces": [[[0, "x"]]]}',
         "$.faces[0][0]"),
        ('{"augmented": false, "pointed": false, "levels": [["a"], ["e"]], "faces": [[[0, 5]]]}',
         "out of range"),
        ('{"augmented": false, "levels": [], "faces": []}', "$.pointed"),
    ])
    def test_errors_carry_paths(self, text, where):
        with pytest.raises(ValidationError, match=where.replace("[", r"\[").replace("$", r"\$")):
            SemiSimplicialSet.from_json(text)


class TestChains:
    def test_two_points(self):
        assert ranks(homology_all(realization_chains(two_points()))) == {0: 2}

    def test_circle(self):
        assert ranks(homology_all(realization_chains(injective_words(2)))) == {0: 1, 1: 1}

    def test_injective_words_4_augmented(self):
        groups = homology_all(realization_chains(injective_words(4), augmented=True))
        assert ranks(groups) == {3: 9}
        assert all(not g.torsion for g in groups)

    def test_pointed_needs_reduced(self):
        with pytest.raises(ValidationError):
            realization_chains(levelwise_cone(letter_inclusion(2, 2)))

    def test_reduced_needs_pointed(self):
        with pytest.raises(ValidationError):
            reduced_realization_chains(two_points())

    def test_only_basepoints(self):
        X = SemiSimplicialSet([["*"], ["*"]], [[()], [(0, 0)]], basepoints=[0, 0])
        C = reduced_realization_chains(X)
        assert [C.dim(d) for d in C.degrees()] == [0, 0]

    @given(simplicial_sets())
    @settings(max_examples=60, deadline=None)
    def test_boundary_squares_to_zero(self, X):
        C = realization_chains(X, augmented=True)
        for d in C.degrees():
            assert (C.boundary(d) @ C.boundary(d + 1)).is_zero()

    @given(simplicial_sets(augmented=False))
    @settings(max_examples=60, deadline=None)
    def test_euler_characteristic(self, X):
        alt = sum((-1) ** d * len(lv) for d, lv in enumerate(X.levels))
        hom = sum((-1) ** g.degree * g.free_rank for g in homology_all(realization_chains(X, QQ)))
        assert alt == hom

    @given(simplicial_sets(augmented=False))
    @settings(max_examples=40, deadline=None)
    def test_top_simplex_only_touches_top_degrees(self, X):
        D = X.dim
        if D < 1:
            return
        smaller = SemiSimplicialSet(list(X.levels[:D]) + [X.levels[D][1:]],
                                    list(X.faces[:D]) + [X.faces[D][1:]])
        a = {g.degree: g for g in reduced_homology(X)}
        b = {g.degree: g for g in reduced_homology(smaller)}
        for d in range(0, D - 1):
            assert a[d] == b[d]


class TestConnectivity:
    def test_examples(self):
        assert homological_connectivity(injective_words(4)) == 2
        assert homological_connectivity(injective_words(2)) == 0
        assert homological_connectivity(injective_words(1)) == CONTRACTIBLE
        assert homological_connectivity(injective_words(0)) == -2

    def test_disconnected(self):
        X = SemiSimplicialSet([["a", "b"]], [[(), ()]], ["*"], [0, 0])
        assert homological_connectivity(X) == -1

    def test_needs_augmentation(self):
        with pytest.raises(ValidationError):
            homological_connectivity(two_points())


class TestMaps:
    def test_identity(self):
        X = injective_words(3)
        f = identity_map(X)
        assert f.validate() == [] and f.is_levelwise_injective()

    def test_non_commuting_map(self):
        X = injective_words(2)
        f = SemiSimplicialMap(X, X, [[0, 1], [1, 1]], [0])
        assert f.validate()

    def test_cone_rejects_non_injective(self):
        X = injective_words(2)
        pt = SemiSimplicialSet([["p"], ["e"]], [[()], [(0, 0)]], ["*"], [0])
        f = SemiSimplicialMap(X, pt, [[0, 0], [0, 0]], [0])
        assert f.validate() == []
        with pytest.raises(ValidationError, match="injective"):
            levelwise_cone(f)


class TestLevelwiseCone:
    def test_identity_cone_is_trivial(self):
        Y = levelwise_cone(identity_map(injective_words(3)))
        assert all(len(lv) == 1 for lv in Y.levels)
        assert all(g.is_zero() for g in reduced_homology(Y))

    def test_letter_inclusion_cone(self):
        Y = levelwise_cone(letter_inclusion(3, 3))
        C = reduced_realization_chains(Y)
        assert [C.dim(d) for d in C.degrees()] == [1, 4, 6]
        assert ranks(reduced_homology(Y)) == {2: 3}

    def test_empty_source(self):
        W = injective_words(2)
        X = SemiSimplicialSet(W.levels, W.faces)
        f = SemiSimplicialMap(SemiSimplicialSet.empty(), X, [])
        assert ranks(reduced_homology(levelwise_cone(f))) == ranks(homology_all(realization_chains(X)))

    @given(subcomplex_inclusions())
    @settings(max_examples=60, deadline=None)
    def test_matches_algebraic_cone(self, f):
        Y = levelwise_cone(f)
        assert Y.validate() == []
        lhs = {g.degree: g for g in reduced_homology(Y) if not g.is_zero()}
        rhs = {g.degree: g for g in homology_all(mapping_cone(chain_map(f))) if not g.is_zero()}
        assert lhs == rhs

    def test_chain_map_commutes(self):
        f = letter_inclusion(4, 2)
        F = chain_map(f)
        assert isinstance(F, ChainMap)
        F.validate()
