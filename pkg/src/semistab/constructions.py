"""Injective words, the half-smash construction and their comparisons."""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import permutations

from .exactalg import ZZ, HomologyGroup, ValidationError, homology_all
from .semisimp import (CONTRACTIBLE, SemiSimplicialMap, SemiSimplicialSet,
                       homological_connectivity, levelwise_cone,
                       realization_chains, reduced_realization_chains)


def word_label(word):
    return "(" + ",".join(map(str, word)) + ")"


def parse_word(label):
    body = label.strip()[1:-1]
    return tuple(int(t) for t in body.split(",")) if body else ()


def words_on(letters):
    """Augmented set of injective words on the given letters, lexicographic."""
    letters = sorted(letters)
    levels, faces = [], []
    index = {(): 0}
    for i in range(len(letters)):
        words = list(permutations(letters, i + 1))
        levels.append([word_label(w) for w in words])
        if i == 0:
            faces.append([()] * len(words))
        else:
            faces.append([tuple(index[w[:j] + w[j + 1:]] for j in range(i + 1)) for w in words])
        index = {w: k for k, w in enumerate(words)}
    return SemiSimplicialSet(levels, faces, aug_labels=["()"], epsilon=[0] * len(letters))


def injective_words(n):
    """Words of distinct letters from 1..n; level i holds the words of length i+1."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    return words_on(range(1, n + 1))


def letter_inclusion(n, p):
    """Inclusion of the words avoiding letter p into all words on 1..n."""
    if n < 1 or not 1 <= p <= n:
        raise ValidationError(f"letter {p} is not in 1..{n}")
    source = words_on([a for a in range(1, n + 1) if a != p])
    target = injective_words(n)
    maps = []
    for d in range(source.dim + 1):
        where = {lab: k for k, lab in enumerate(target.levels[d])}
        maps.append([where[lab] for lab in source.levels[d]])
    return SemiSimplicialMap(source, target, maps, aug_map=[0])


def half_smash(X):
    """The pointed set with n-simplices X_{n-1} x {0..n} plus a basepoint.

    Simplex ``x|j`` at level n has index ``1 + x*(n+1) + j``; the basepoint is
    index 0 on every level.  Face i sends x|j to d_i(x)|(j-1) when i < j, to
    the basepoint when i = j and to d_(i-1)(x)|j when i > j.
    """
    if not X.augmented:
        raise ValidationError("half_smash needs an augmented input")
    X.require_valid()
    levels, faces = [], []
    for n in range(X.dim + 2):
        src = X.aug_labels if n == 0 else X.levels[n - 1]
        levels.append(["*"] + [f"{lab}|{j}" for lab in src for j in range(n + 1)])
        if n == 0:
            faces.append([()] * len(levels[0]))
            continue
        table = [(0,) * (n + 1)]
        for x in range(len(src)):
            for j in range(n + 1):
                fs = []
                for i in range(n + 1):
                    if i < j:
                        fs.append(1 + X.face(n - 1, x, i) * n + j - 1)
                    elif i == j:
                        fs.append(0)
                    else:
                        fs.append(1 + X.face(n - 1, x, i - 1) * n + j)
                table.append(tuple(fs))
        faces.append(table)
    return SemiSimplicialSet(levels, faces, basepoints=[0] * len(levels))


def non_base_counts(Y):
    return [Y.size(d) - 1 for d in range(Y.dim + 1)]


@dataclass
class CofiberCheck:
    ok: bool
    cone_counts: list
    half_smash_counts: list
    # bijection[d][k] = half-smash index of cone simplex k at level d
    bijection: list = field(default_factory=list)
    counterexample: tuple = None


def cofiber_halfsmash_check(n, p):
    """Match the cofibre of letter_inclusion(n, p) with half_smash(F(n-1)).

    A word with p in position j goes to (word without p, letters above p
    shifted down) | j.  Returns the levelwise bijection, or the first
    simplex where the faces fail to commute.
    """
    cone = levelwise_cone(letter_inclusion(n, p))
    hs = half_smash(injective_words(n - 1))
    report = CofiberCheck(False, non_base_counts(cone), non_base_counts(hs))
    if cone.dim != hs.dim or report.cone_counts != report.half_smash_counts:
        report.counterexample = ("level sizes differ", None, None)
        return report

    def phi(d, k):
        if k == 0:
            return 0
        w = parse_word(cone.levels[d][k])
        j = w.index(p)
        rest = tuple(a - (a > p) for a in w[:j] + w[j + 1:])
        return hs_index[d][f"{word_label(rest)}|{j}"]

    hs_index = [{lab: k for k, lab in enumerate(lv)} for lv in hs.levels]
    for d in range(cone.dim + 1):
        images = [phi(d, k) for k in range(cone.size(d))]
        if len(set(images)) != len(images):
            report.counterexample = ("not injective", d, None)
            return report
        report.bijection.append(images)
    for d in range(1, cone.dim + 1):
        for k in range(1, cone.size(d)):
            for i in range(d + 1):
                lhs = report.bijection[d - 1][cone.faces[d][k][i]]
                rhs = hs.faces[d][report.bijection[d][k]][i]
                if lhs != rhs:
                    report.counterexample = (cone.levels[d][k], d, i)
                    report.bijection = []
                    return report
    report.ok = True
    return report


def _fibre(X, i, y, base):
    """Augmented set over y: level j holds the x in X_{i+j} lying over y,
    with faces d_i, ..., d_{i+j}."""
    levels, faces, index = [], [], None
    for j in range(X.dim - i + 1):
        members = [x for x in range(X.size(i + j)) if base[i + j][x] == y]
        if not members:
            break
        where = {x: k for k, x in enumerate(members)}
        levels.append([X.levels[i + j][x] for x in members])
        if j == 0:
            faces.append([()] * len(members))
        else:
            faces.append([tuple(index[X.faces[i + j][x][i + l]] for l in range(j + 1))
                          for x in members])
        index = where
    return SemiSimplicialSet(levels, faces, aug_labels=["*"],
                             epsilon=[0] * (len(levels[0]) if levels else 0))


def star_map_fiber_connectivity(X, i, ring=ZZ):
    """Least homological connectivity among the fibres of d_i on ||X_{>= i}||.

    Simplices of level >= i are sorted by their image in X_{i-1} under
    iterated d_i; each class is an augmented set over a point.  An empty
    fibre has connectivity -2; with no fibres at all the result is
    ``CONTRACTIBLE``.
    """
    if not X.augmented:
        raise ValidationError("fibre connectivity needs an augmented set")
    if not 1 <= i <= X.dim + 1:
        raise ValidationError(f"level {i} outside 1..{X.dim + 1}")
    X.require_valid()
    base = {}
    base[i - 1] = list(range(X.size(i - 1)))
    for d in range(i, X.dim + 1):
        base[d] = [base[d - 1][X.face(d, x, i)] for x in range(X.size(d))]
    best = CONTRACTIBLE
    for y in range(X.size(i - 1)):
        c = homological_connectivity(_fibre(X, i, y, base), ring)
        best = min(best, c)
        if best == -2:
            break
    return best


def derived_connectivity_bound(X, ring=ZZ):
    """Largest k for which every d_i has (k-i)-connected fibres, i.e.
    min over i of (fibre connectivity + 1 + i)."""
    k = CONTRACTIBLE
    for i in range(1, X.dim + 2):
        c = star_map_fiber_connectivity(X, i, ring)
        k = min(k, c + 1 + i)
    return k


def _p_parts(torsion):
    parts = defaultdict(list)
    for t in torsion:
        q = 2
        while t > 1:
            if t % q == 0:
                e = 0
                while t % q == 0:
                    t //= q
                    e += 1
                parts[q].append(e)
            q += 1
    return {p: sorted(es, reverse=True) for p, es in parts.items()}


def is_quotient(A, B):
    """Whether B is isomorphic to a quotient of A (finitely generated groups)."""
    spare = A.free_rank - B.free_rank
    if spare < 0:
        return False
    pa, pb = _p_parts(A.torsion), _p_parts(B.torsion)
    for p, eb in pb.items():
        # spare free summands absorb the largest cyclic factors of B
        eb = eb[spare:]
        ea = pa.get(p, [])
        if len(eb) > len(ea) or any(b > a for a, b in zip(ea, eb)):
            return False
    return True


def is_isomorphic(A, B):
    return A.free_rank == B.free_rank and Counter(A.torsion) == Counter(B.torsion)


@dataclass
class ComparisonRow:
    degree: int
    source: HomologyGroup   # reduced homology of X one degree down
    target: HomologyGroup   # reduced homology of the half-smash
    status: str             # iso | epi | fail


@dataclass
class SuspensionReport:
    k: int
    rows: list
    passed: bool

    def lines(self, ring=ZZ):
        out = [f"k={self.k}"]
        for r in self.rows:
            need = "iso" if r.degree < self.k else "epi" if r.degree == self.k else "-"
            out.append(f"degree {r.degree}: {r.source.format(ring)} -> {r.target.format(ring)} "
                       f"{r.status} (required: {need})")
        out.append("PASS" if self.passed else "FAIL")
        return out


def suspension_comparison(X, k=None, ring=ZZ):
    """Compare the suspension of ||X|| with the half-smash degree by degree.

    The comparison map is not built; each degree records whether the groups
    could be related by an isomorphism or an epimorphism.  Passing means iso
    in degrees < k and at least epi in degree k.  Without k, the bound
    derived from the fibre connectivities is used.
    """
    if not X.augmented:
        raise ValidationError("suspension comparison needs an augmented set")
    if k is None:
        k = derived_connectivity_bound(X, ring)
    src = {g.degree + 1: g for g in homology_all(realization_chains(X, ring, augmented=True))}
    tgt = {g.degree: g for g in homology_all(reduced_realization_chains(half_smash(X), ring))}
    rows, passed = [], True
    top = X.dim + 1
    for d in range(0, top + 1):
        a = src.get(d, HomologyGroup(d - 1, 0))
        b = tgt.get(d, HomologyGroup(d, 0))
        status = "iso" if is_isomorphic(a, b) else "epi" if is_quotient(a, b) else "fail"
        rows.append(ComparisonRow(d, a, b, status))
        if d < k and status != "iso":
            passed = False
        if d == k and status == "fail":
            passed = False
    if isinstance(k, float) and math.isinf(k):
        k = top + 1
    return SuspensionReport(k, rows, passed)
