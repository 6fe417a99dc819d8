"""Surface types, stabilisation maps, arc cuts and stability-range reports."""

import math
import re
from dataclasses import dataclass

from .exactalg import ValidationError
from .ranges import NONORIENTABLE, ORIENTED

_SPEC = re.compile(r"^\s*S\[g=(\d+),b=(\d+),or=([+-])\]\s*$")


@dataclass(frozen=True)
class SurfaceType:
    """Orientable surface of genus g, or non-orientable with g crosscaps."""

    orientable: bool
    genus: int
    boundary: int

    def __post_init__(self):
        if self.genus < 0 or self.boundary < 0:
            raise ValidationError("genus and boundary count must be non-negative")

    @classmethod
    def parse(cls, text):
        m = _SPEC.match(text)
        if not m:
            raise ValidationError(f"bad surface {text!r}; expected S[g=G,b=B,or=+|-]")
        return cls(m.group(3) == "+", int(m.group(1)), int(m.group(2)))

    def __str__(self):
        return f"S[g={self.genus},b={self.boundary},or={'+' if self.orientable else '-'}]"

    @property
    def family(self):
        return ORIENTED if self.orientable else NONORIENTABLE


def orientable(g, b):
    return SurfaceType(True, g, b)


def nonorientable(n, b):
    return SurfaceType(False, n, b)


def euler_characteristic(S):
    return 2 - (2 * S.genus if S.orientable else S.genus) - S.boundary


STABILIZATIONS = ("alpha", "beta", "gamma", "mu")
_KIND_ALIASES = {"a": "alpha", "b": "beta", "g": "gamma", "m": "mu",
                 "α": "alpha", "β": "beta", "γ": "gamma", "μ": "mu"}


def stabilization_kind(name):
    kind = _KIND_ALIASES.get(name, name)
    if kind not in STABILIZATIONS:
        raise ValidationError(f"unknown stabilisation {name!r}")
    return kind


def stabilization_target(S, kind):
    """Surface after gluing on pants by the legs (alpha), pants by the waist
    (beta), a disc (gamma), or a Moebius band with a hole (mu)."""
    kind = stabilization_kind(kind)
    g, b = S.genus, S.boundary
    if kind == "alpha":
        # the two legs go to two distinct boundary components
        if b < 2:
            raise ValidationError(f"alpha needs b >= 2 (got b={b})")
        return SurfaceType(S.orientable, g + (1 if S.orientable else 2), b - 1)
    if kind in ("beta", "gamma") and b < 1:
        raise ValidationError(f"{kind} needs b >= 1 (got b={b})")
    if kind == "beta":
        return SurfaceType(S.orientable, g, b + 1)
    if kind == "gamma":
        return SurfaceType(S.orientable, g, b - 1)
    if S.orientable:
        raise ValidationError("mu only applies to non-orientable surfaces")
    if b < 1:
        raise ValidationError(f"mu needs b >= 1 (got b={b})")
    return SurfaceType(False, g + 1, b)


CUTS = ("handle", "boundary", "mobius")


def cut(S, kind, m):
    """Surface left after cutting along m arcs of the given kind.

    handle: arcs from one boundary back to itself, each removing a handle
    (two crosscaps when non-orientable) and adding a boundary component.
    boundary: the first arc joins two boundaries, the rest act as handle arcs.
    mobius: one-sided arcs, each removing a crosscap.
    """
    if kind not in CUTS:
        raise ValidationError(f"unknown cut {kind!r}")
    if m < 1:
        raise ValidationError("need at least one arc")
    g, b = S.genus, S.boundary

    def need(ok, what):
        if not ok:
            raise ValidationError(f"{kind} cut of {m} arcs on {S} needs {what}")

    if kind == "mobius":
        need(not S.orientable, "a non-orientable surface")
        need(b >= 1, "b >= 1")
        need(g >= m, f"n >= m ({g} < {m})")
        return SurfaceType(False, g - m, b)
    per_arc = 1 if S.orientable else 2
    sym = "g" if S.orientable else "n"
    if kind == "handle":
        need(b >= 1, "b >= 1")
        need(g >= per_arc * m, f"{sym} >= {per_arc if per_arc > 1 else ''}m ({g} < {per_arc * m})")
        return SurfaceType(S.orientable, g - per_arc * m, b + m)
    need(b >= 2, "b >= 2")
    need(g >= per_arc * (m - 1), f"{sym} >= {'2(m-1)' if per_arc > 1 else 'm-1'} ({g} < {per_arc * (m - 1)})")
    return SurfaceType(S.orientable, g - per_arc * (m - 1), b + m - 2)


@dataclass(frozen=True)
class StabilityReport:
    kind: str
    surface: SurfaceType
    epi: object         # int, math.inf for all degrees, or None
    iso: object
    note: str = ""

    @property
    def claim(self):
        return self.epi is not None or self.iso is not None

    def __str__(self):
        if not self.claim:
            return f"{self.kind} on {self.surface}: no claim ({self.note})"

        def deg(x):
            return "all degrees" if x == math.inf else f"* <= {x}"
        text = f"{self.kind} on {self.surface}: epi for {deg(self.epi)}, iso for {deg(self.iso)}"
        return text + (f" ({self.note})" if self.note else "")


def stability_range_report(kind, S, table, beta_split=False, closeable=False):
    """Epi/iso degree bounds for a stabilisation map out of S, read off a
    solved range table of the matching family."""
    kind = stabilization_kind(kind)
    stabilization_target(S, kind)
    if table.family != S.family:
        raise ValidationError(f"{table.family} table cannot describe {S}")
    g = S.genus
    if not table.start <= g <= table.N:
        raise ValidationError(f"table covers {table.start}..{table.N}, not genus {g}")
    prime = "" if S.orientable else "'"
    F, G = table.value("F" + prime, g), table.value("G" + prime, g)
    if kind == "alpha":
        return StabilityReport(kind, S, F, F - 1)
    if kind == "beta":
        if beta_split:
            return StabilityReport(kind, S, G, G, "split by capping the new boundary")
        return StabilityReport(kind, S, G, G - 1)
    if kind == "gamma":
        if S.boundary >= 2:
            return StabilityReport(kind, S, math.inf, G)
        if closeable:
            return StabilityReport(kind, S, G + 1, G, "closing the last boundary")
        return StabilityReport(kind, S, None, None, "closing the last boundary is not covered without the closeable flag")
    H = table.value("H'", g)
    return StabilityReport(kind, S, H, H - 1)
