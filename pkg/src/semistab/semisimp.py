"""Finite semi-simplicial sets, possibly augmented or pointed.

Simplices are addressed by ``(level, index)``; labels are opaque strings
used for I/O and ordering only.  Face ``i`` of an ``d``-simplex is stored at
``faces[d][index][i]``.
"""

import json
import math
from dataclasses import dataclass

from .exactalg import (ZZ, ChainComplex, ChainMap, IntegerMatrix, ValidationError,
                       homology_all)

#: returned by :func:`homological_connectivity` when no reduced homology survives
CONTRACTIBLE = math.inf


@dataclass(frozen=True)
class Violation:
    kind: str
    level: int
    simplex: int
    i: int = None
    j: int = None

    def __str__(self):
        where = f"level {self.level}, simplex {self.simplex}"
        if self.i is not None:
            where += f", i={self.i}"
        if self.j is not None:
            where += f", j={self.j}"
        return f"{self.kind} ({where})"


@dataclass(frozen=True)
class SemiSimplicialSet:
    levels: tuple
    faces: tuple
    aug_labels: tuple = None
    epsilon: tuple = None
    basepoints: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(lv) for lv in self.levels))
        object.__setattr__(self, "faces", tuple(tuple(tuple(f) for f in lv) for lv in self.faces))
        if len(self.faces) != len(self.levels):
            raise ValueError("need one face table per level")
        if (self.aug_labels is None) != (self.epsilon is None):
            raise ValueError("augmentation needs both labels and epsilon")
        if self.aug_labels is not None:
            object.__setattr__(self, "aug_labels", tuple(self.aug_labels))
            object.__setattr__(self, "epsilon", tuple(self.epsilon))
        if self.basepoints is not None:
            if self.aug_labels is not None:
                raise ValueError("pointed augmented sets are not supported")
            object.__setattr__(self, "basepoints", tuple(self.basepoints))

    @classmethod
    def empty(cls):
        return cls((), ())

    @property
    def augmented(self):
        return self.aug_labels is not None

    @property
    def pointed(self):
        return self.basepoints is not None

    @property
    def dim(self):
        return len(self.levels) - 1

    def size(self, d):
        if d == -1 and self.augmented:
            return len(self.aug_labels)
        return len(self.levels[d]) if 0 <= d <= self.dim else 0

    def sizes(self):
        out = [len(lv) for lv in self.levels]
        return [len(self.aug_labels)] + out if self.augmented else out

    def face(self, d, x, i):
        if d == 0:
            if i != 0 or not self.augmented:
                raise IndexError("0-simplices have no faces")
            return self.epsilon[x]
        return self.faces[d][x][i]

    def num_simplices(self):
        return sum(self.sizes())

    # -- validation ---------------------------------------------------------

    def validate(self):
        """List every violated identity; an empty list means valid."""
        bad = []
        for d in range(self.dim + 1):
            below = self.size(d - 1) if d else 0
            for x, fs in enumerate(self.faces[d]):
                if len(fs) != (d + 1 if d else 0):
                    bad.append(Violation("wrong number of faces", d, x))
                elif any(not 0 <= y < below for y in fs):
                    bad.append(Violation("face index out of range", d, x))
            if len(self.faces[d]) != self.size(d):
                bad.append(Violation("face table size mismatch", d, -1))
        if self.augmented:
            if len(self.epsilon) != self.size(0):
                bad.append(Violation("augmentation size mismatch", 0, -1))
            elif any(not 0 <= e < len(self.aug_labels) for e in self.epsilon):
                bad.append(Violation("augmentation index out of range", 0, -1))
        if bad:
            return bad
        for d in range(2, self.dim + 1):
            lower = self.faces[d - 1]
            for x, fs in enumerate(self.faces[d]):
                for j in range(d + 1):
                    for i in range(j):
                        if lower[fs[j]][i] != lower[fs[i]][j - 1]:
                            bad.append(Violation("simplicial identity d_i d_j = d_(j-1) d_i", d, x, i, j))
        if self.augmented and self.dim >= 1:
            eps = self.epsilon
            for x, (a, b) in enumerate(self.faces[1]):
                if eps[a] != eps[b]:
                    bad.append(Violation("augmentation identity e d_0 = e d_1", 1, x, 0, 1))
        if self.pointed:
            if len(self.basepoints) != len(self.levels):
                bad.append(Violation("one basepoint per level required", -1, -1))
                return bad
            for d in range(self.dim + 1):
                if not 0 <= self.basepoints[d] < self.size(d):
                    bad.append(Violation("basepoint index out of range", d, -1))
                    continue
                for i, y in enumerate(self.faces[d][self.basepoints[d]]):
                    if y != self.basepoints[d - 1]:
                        bad.append(Violation("face of basepoint is not the basepoint", d, self.basepoints[d], i))
        return bad

    def require_valid(self):
        bad = self.validate()
        if bad:
            raise ValidationError("invalid semi-simplicial set: " + "; ".join(map(str, bad[:5])))
        return self

    # -- JSON ---------------------------------------------------------------

    def to_dict(self):
        levels = [list(lv) for lv in self.levels]
        faces = [[list(f) for f in lv] for lv in self.faces[1:]]
        if self.augmented:
            levels = [list(self.aug_labels)] + levels
            faces = [[[e] for e in self.epsilon]] + faces
        out = {"augmented": self.augmented, "pointed": self.pointed,
               "levels": levels, "faces": faces}
        if self.pointed:
            out["basepoints"] = list(self.basepoints)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data):
        path = "$"
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: expected an object")
        for key, typ in (("augmented", bool), ("pointed", bool), ("levels", list), ("faces", list)):
            if not isinstance(data.get(key), typ):
                raise ValidationError(f"{path}.{key}: missing or not a {typ.__name__}")
        levels = data["levels"]
        for d, lv in enumerate(levels):
            if not isinstance(lv, list) or not all(isinstance(s, str) for s in lv):
                raise ValidationError(f"$.levels[{d}]: expected an array of strings")
        faces = data["faces"]
        if len(faces) != max(len(levels) - 1, 0):
            raise ValidationError(f"$.faces: expected {max(len(levels) - 1, 0)} face tables")
        for d, lv in enumerate(faces):
            if not isinstance(lv, list):
                raise ValidationError(f"$.faces[{d}]: expected an array")
            for x, fs in enumerate(lv):
                if not isinstance(fs, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in fs):
                    raise ValidationError(f"$.faces[{d}][{x}]: expected an array of integers")
        aug_labels = epsilon = None
        if data["augmented"]:
            if not levels:
                raise ValidationError("$.levels: augmented set needs level -1")
            aug_labels = levels[0]
            levels = levels[1:]
            epsilon = []
            if faces:
                for x, fs in enumerate(faces[0]):
                    if len(fs) != 1:
                        raise ValidationError(f"$.faces[0][{x}]: augmentation takes one index")
                    epsilon.append(fs[0])
                faces = faces[1:]
        basepoints = None
        if data["pointed"]:
            bp = data.get("basepoints")
            if not isinstance(bp, list) or len(bp) != len(levels):
                raise ValidationError("$.basepoints: expected one index per level")
            basepoints = bp
        face_tables = [[()] * len(levels[0])] + faces if levels else []
        try:
            X = cls(levels, face_tables, aug_labels, epsilon, basepoints)
        except ValueError as exc:
            raise ValidationError(f"$: {exc}") from None
        bad = X.validate()
        if bad:
            raise ValidationError(f"$: {bad[0]}")
        return X

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"$: malformed JSON ({exc.msg} at line {exc.lineno})") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class SemiSimplicialMap:
    """Levelwise index maps ``maps[d][x]`` (and ``aug_map`` on level -1)."""

    source: SemiSimplicialSet
    target: SemiSimplicialSet
    maps: tuple
    aug_map: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(tuple(m) for m in self.maps))
        if self.aug_map is not None:
            object.__setattr__(self, "aug_map", tuple(self.aug_map))

    def __call__(self, d, x):
        if d == -1:
            return self.aug_map[x]
        return self.maps[d][x]

    def validate(self):
        S, T = self.source, self.target
        bad = []
        if len(self.maps) != S.dim + 1 or S.dim > T.dim:
            return [Violation("map has wrong number of levels", -1, -1)]
        for d in range(S.dim + 1):
            if len(self.maps[d]) != S.size(d) or any(not 0 <= y < T.size(d) for y in self.maps[d]):
                bad.append(Violation("map level has wrong size or range", d, -1))
        if bad:
            return bad
        for d in range(1, S.dim + 1):
            for x in range(S.size(d)):
                fx = self.maps[d][x]
                for i in range(d + 1):
                    if T.faces[d][fx][i] != self.maps[d - 1][S.faces[d][x][i]]:
                        bad.append(Violation("map does not commute with face", d, x, i))
        if S.augmented or T.augmented:
            if not (S.augmented and T.augmented and self.aug_map is not None):
                bad.append(Violation("augmentation missing on one side", -1, -1))
            else:
                for x in range(S.size(0)):
                    if T.epsilon[self.maps[0][x]] != self.aug_map[S.epsilon[x]]:
                        bad.append(Violation("map does not commute with augmentation", 0, x))
        if S.pointed or T.pointed:
            if not (S.pointed and T.pointed):
                bad.append(Violation("basepoint missing on one side", -1, -1))
            else:
                for d in range(S.dim + 1):
                    if self.maps[d][S.basepoints[d]] != T.basepoints[d]:
                        bad.append(Violation("map does not preserve basepoint", d, S.basepoints[d]))
        return bad

    def is_levelwise_injective(self):
        levels = list(self.maps) + ([self.aug_map] if self.aug_map is not None else [])
        return all(len(set(m)) == len(m) for m in levels)


def identity_map(X):
    return SemiSimplicialMap(X, X, [range(X.size(d)) for d in range(X.dim + 1)],
                             range(X.size(-1)) if X.augmented else None)


# ---------------------------------------------------------------------------
# chains


def realization_chains(X, ring=ZZ, augmented=False):
    """Cellular chains of the realization; with ``augmented`` the level -1 is
    appended in degree -1 and the result computes the homology of the cone
    of the augmentation (reduced homology when level -1 is a point)."""
    if X.pointed:
        raise ValidationError("pointed input: use reduced_realization_chains")
    X.require_valid()
    if augmented and not X.augmented:
        raise ValidationError("augmented chains requested for an unaugmented set")
    bds = {}
    for d in range(1, X.dim + 1):
        data = {}
        for x, fs in enumerate(X.faces[d]):
            for i, y in enumerate(fs):
                data[y, x] = data.get((y, x), 0) + (-1) ** i
        bds[d] = IntegerMatrix(X.size(d - 1), X.size(d), data)
    if augmented:
        bds[0] = IntegerMatrix(X.size(-1), X.size(0), {(e, x): 1 for x, e in enumerate(X.epsilon)})
        return ChainComplex.from_boundaries(ring, -1, X.sizes(), bds)
    return ChainComplex.from_boundaries(ring, 0, [len(lv) for lv in X.levels], bds)


def reduced_realization_chains(X, ring=ZZ):
    """Chains on the non-basepoint simplices; faces hitting a basepoint vanish."""
    if not X.pointed:
        raise ValidationError("reduced chains need a pointed set")
    X.require_valid()
    index = []
    for d in range(X.dim + 1):
        base = X.basepoints[d]
        index.append({x: k for k, x in enumerate(y for y in range(X.size(d)) if y != base)})
    bds = {}
    for d in range(1, X.dim + 1):
        data = {}
        below = index[d - 1]
        for x, k in index[d].items():
            for i, y in enumerate(X.faces[d][x]):
                if y in below:
                    data[below[y], k] = data.get((below[y], k), 0) + (-1) ** i
        bds[d] = IntegerMatrix(len(below), len(index[d]), data)
    return ChainComplex.from_boundaries(ring, 0, [len(ix) for ix in index], bds)


def reduced_homology(X, ring=ZZ):
    """Reduced homology of the realization, one group per degree.

    Augmented sets use the augmented complex (degrees from -1), pointed
    sets their reduced complex, plain sets the usual degree-0 correction.
    """
    if X.pointed:
        return homology_all(reduced_realization_chains(X, ring))
    if X.augmented:
        return homology_all(realization_chains(X, ring, augmented=True))
    from .exactalg import reduced_homology_all
    return reduced_homology_all(realization_chains(X, ring))


def homological_connectivity(X, ring=ZZ):
    """Largest c with vanishing reduced homology in all degrees <= c.

    -2 when X is empty over a nonempty augmentation, and ``CONTRACTIBLE``
    when nothing survives at all.
    """
    if not X.augmented:
        raise ValidationError("connectivity is measured on augmented sets")
    for g in homology_all(realization_chains(X, ring, augmented=True)):
        if not g.is_zero():
            return g.degree - 1
    return CONTRACTIBLE


def chain_map(f, ring=ZZ):
    """The induced map on (unaugmented) realization chains."""
    S, T = f.source, f.target
    CS, CT = realization_chains(S, ring), realization_chains(T, ring)
    maps = {d: IntegerMatrix(T.size(d), S.size(d), {(y, x): 1 for x, y in enumerate(f.maps[d])})
            for d in range(S.dim + 1)}
    return ChainMap(CS, CT, maps)


def levelwise_cone(f):
    """Set-level cofibre of a levelwise injective map, as a pointed set.

    Level d is the target level minus the image, plus a basepoint at index
    0; faces landing in the image go to the basepoint.  Level -1 is dropped.
    """
    bad = f.validate()
    if bad:
        raise ValidationError(f"invalid map: {bad[0]}")
    if not f.is_levelwise_injective():
        raise ValidationError("levelwise cone needs a levelwise injective map")
    S, T = f.source, f.target
    levels, faces, keep = [], [], []
    for d in range(T.dim + 1):
        image = set(f.maps[d]) if d <= S.dim else set()
        rest = [x for x in range(T.size(d)) if x not in image]
        keep.append({x: k + 1 for k, x in enumerate(rest)})
        levels.append(["*"] + [T.levels[d][x] for x in rest])
        if d == 0:
            faces.append([()] * (len(rest) + 1))
        else:
            below = keep[d - 1]
            table = [(0,) * (d + 1)]
            for x in rest:
                table.append(tuple(below.get(y, 0) for y in T.faces[d][x]))
            faces.append(table)
    return SemiSimplicialSet(levels, faces, basepoints=[0] * len(levels))
