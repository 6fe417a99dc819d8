"""Stability-range recurrences and their greatest solutions.

Every condition is an upper bound of the form ``f(g) <= min(terms)`` where a
term is another function at a shifted argument plus a constant, or a fixed
cap.  The feasible tables are closed under pointwise max, so the greatest
one is reached by descending from a large start value until nothing moves.
The lower bounds (values >= 0 from the stabilisation genus on) are checked
afterwards and may be violated when the upper bounds force it.
"""

import csv
import io
import math
from dataclasses import dataclass, field

from .exactalg import ValidationError

ORIENTED = "oriented"
NONORIENTABLE = "nonorientable"

FUNCTIONS = {
    ORIENTED: ("F", "G", "X", "Y"),
    NONORIENTABLE: ("F'", "G'", "H'", "X'", "Y'", "Z'"),
}
# Gauss-Seidel order: the X/Y bounds are refreshed before F/G read them
_SWEEP_ORDER = {
    ORIENTED: ("X", "Y", "F", "G"),
    NONORIENTABLE: ("X'", "Y'", "Z'", "F'", "G'", "H'"),
}


@dataclass(frozen=True)
class RangeSystem:
    family: str
    h: int
    k: int
    N: int
    hp: int = None
    kp: int = None

    def __post_init__(self):
        if self.family not in FUNCTIONS:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.h < 0 or self.k < 1:
            raise ValidationError("need h >= 0 and k >= 1")
        if self.family == NONORIENTABLE:
            if self.hp is None:
                object.__setattr__(self, "hp", self.h)
            if self.kp is None:
                object.__setattr__(self, "kp", self.k)
            if self.hp < 0 or self.kp < 1:
                raise ValidationError("need h' >= 0 and k' >= 1")
        elif self.hp is not None or self.kp is not None:
            raise ValidationError("projective-plane parameters only apply to the non-orientable family")

    @property
    def var(self):
        return "g" if self.family == ORIENTED else "n"

    @property
    def names(self):
        return FUNCTIONS[self.family]

    def lo(self, name):
        """First argument at which the function must be non-negative."""
        if name in ("H'", "Z'"):
            return self.hp - 1
        return self.h - 1

    @property
    def start(self):
        return min(self.lo(f) for f in self.names)


@dataclass(frozen=True)
class Term:
    fn: str = None
    shift: int = 0
    add: int = 0
    cap: object = None      # callable g -> int, for the arc-complex caps
    cap_label: str = ""

    def value(self, table, g):
        if self.cap is not None:
            return max(0, self.cap(g))
        arg = g + self.shift
        if arg > table.N:
            return None
        return table.value(self.fn, arg) + self.add

    def label(self, var):
        if self.cap is not None:
            return self.cap_label
        arg = var if not self.shift else f"{var}{self.shift:+d}"
        return f"{self.fn}({arg})" + (f"+{self.add}" if self.add else "")


@dataclass(frozen=True)
class Constraint:
    target: str
    terms: tuple
    label: str

    def bound(self, table, g):
        vals = [v for v in (t.value(table, g) for t in self.terms) if v is not None]
        return min(vals) if vals else None


def _ref(fn, shift=0, add=0):
    return Term(fn, shift, add)


def constraints(sys):
    """All upper-bound conditions of the system, labelled for reports."""
    var = sys.var
    out = []

    def add(target, *terms, label=None):
        text = label or " ".join(f"{target}({var}) ≤ {t.label(var)}" for t in terms)
        out.append(Constraint(target, tuple(terms), text))

    k = sys.k
    c, fl = (k + 1) // 2, k // 2
    if sys.family == ORIENTED:
        for a, b in (("X", ("Y", -1)), ("X", ("F", -1)), ("Y", ("X", -2)),
                     ("Y", ("F", -1)), ("Y", ("G", -1))):
            add(a, _ref(b[0], b[1], 1))
        add("X", _ref("G", 0, 1))
        add("X", Term(cap=lambda g: g, cap_label="g (when X(g) ≥ 1)"))
        add("Y", Term(cap=lambda g: g - 1, cap_label="g-1 (when Y(g) ≥ 1)"))
        if k == 1:
            add("F", _ref("X"))
            add("F", _ref("F", -1, 1))
            add("G", _ref("Y"))
            add("G", _ref("G", -1, 1))
        else:
            add("F", _ref("X", 1 - c))
            add("F", _ref("Y", 1 - fl))
            add("F", _ref("F", -fl - 1, 1) if k % 2 else _ref("G", -fl, 1))
            add("G", _ref("X", -fl))
            add("G", _ref("Y", 1 - c))
            add("G", _ref("G", -fl - 1, 1) if k % 2 else _ref("F", -fl - 1, 1))
    else:
        add("X'", _ref("Y'", -2, 1))
        add("X'", _ref("F'", -2, 1))
        add("X'", _ref("G'", 0, 1))
        add("Y'", _ref("X'", -4, 1))
        add("Y'", _ref("F'", -2, 1))
        add("Y'", _ref("G'", -2, 1))
        add("Z'", _ref("H'", -2, 1))
        add("X'", Term(cap=lambda n: n // 2, cap_label="floor(n/2) (when X'(n) ≥ 1)"))
        add("Y'", Term(cap=lambda n: n // 2 - 1, cap_label="floor(n/2)-1 (when Y'(n) ≥ 1)"))
        add("Z'", Term(cap=lambda n: n // 3, cap_label="floor(n/3) (when Z'(n) ≥ 1)"))
        if k == 1:
            add("F'", _ref("X'"))
            add("F'", _ref("F'", -2, 1))
            add("G'", _ref("Y'"))
            add("G'", _ref("G'", -2, 1))
        else:
            add("F'", _ref("X'", 2 - 2 * c))
            add("F'", _ref("Y'", 2 - 2 * fl))
            add("F'", _ref("F'", -2 * fl - 2, 1) if k % 2 else _ref("G'", -2 * fl, 1))
            add("G'", _ref("X'", -2 * fl))
            add("G'", _ref("Y'", 2 - 2 * c))
            add("G'", _ref("G'", -2 * fl - 2, 1) if k % 2 else _ref("F'", -2 * fl - 2, 1))
        kp = sys.kp
        add("H'", _ref("Z'", 1 - kp))
        add("H'", _ref("H'", -kp - 1, 1))
    for f in sys.names:
        add(f, _ref(f, -1, 1), label=f"{f}({var}) - {f}({var}-1) ≤ 1")
        add(f, _ref(f, 1), label=f"{f}({var}) ≤ {f}({var}+1)")
    return out


@dataclass
class RangeTable:
    family: str
    start: int
    N: int
    lo: dict
    values: dict                     # name -> list over start..N
    forced: list = field(default_factory=list)   # lower-bound violations forced by the system

    @property
    def names(self):
        return FUNCTIONS[self.family]

    @property
    def var(self):
        return "g" if self.family == ORIENTED else "n"

    def domain(self):
        return range(self.start, self.N + 1)

    def value(self, name, g):
        if g < self.lo[name]:
            return -1
        if g > self.N:
            raise IndexError(f"{name}({g}) is beyond the table")
        return self.values[name][g - self.start]

    def __call__(self, name, g):
        return self.value(name, g)

    def column(self, name, lo=None, hi=None):
        lo = self.start if lo is None else lo
        hi = self.N if hi is None else hi
        return [self.value(name, g) for g in range(lo, hi + 1)]

    def copy(self):
        return RangeTable(self.family, self.start, self.N, dict(self.lo),
                          {k: list(v) for k, v in self.values.items()}, list(self.forced))

    def set(self, name, g, v):
        self.values[name][g - self.start] = v

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.var] + list(self.names))
        for g in self.domain():
            w.writerow([g] + [self.value(f, g) for f in self.names])
        return buf.getvalue()

    def format(self):
        head = [self.var] + list(self.names)
        rows = [[str(g)] + [str(self.value(f, g)) for f in self.names] for g in self.domain()]
        width = max(len(x) for row in rows + [head] for x in row)
        return "\n".join(" ".join(x.rjust(width) for x in row) for row in [head] + rows) + "\n"

    @classmethod
    def from_csv(cls, text, sys=None):
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("empty CSV") from None
        family = next((fam for fam, names in FUNCTIONS.items() if header[1:] == list(names)), None)
        if family is None or header[0] not in ("g", "n"):
            raise ValidationError(f"unrecognised CSV header {','.join(header)!r}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([int(x) for x in row])
            except ValueError:
                raise ValidationError(f"line {line_no}: non-integer entry") from None
            if len(row) != len(header):
                raise ValidationError(f"line {line_no}: expected {len(header)} fields")
        if not rows:
            raise ValidationError("CSV has no rows")
        start, N = rows[0][0], rows[-1][0]
        if [r[0] for r in rows] != list(range(start, N + 1)):
            raise ValidationError("CSV rows must be consecutive")
        names = FUNCTIONS[family]
        values = {f: [r[i + 1] for r in rows] for i, f in enumerate(names)}
        if sys is not None:
            lo = {f: sys.lo(f) for f in names}
        else:
            # leading -1 entries are read as the convention region
            lo = {f: start + next((i for i, v in enumerate(values[f]) if v != -1), len(rows))
                  for f in names}
        return cls(family, start, N, lo, values)


def _initial(sys):
    names = sys.names
    lo = {f: sys.lo(f) for f in names}
    start = sys.start
    values = {f: [g - lo[f] if g >= lo[f] else -1 for g in range(start, sys.N + 1)] for f in names}
    return RangeTable(sys.family, start, sys.N, lo, values)


def project(table, sys, cons=None):
    """One sweep of every upper bound; returns the number of lowered entries."""
    cons = cons if cons is not None else constraints(sys)
    by_target = {}
    for c in cons:
        by_target.setdefault(c.target, []).append(c)
    changed = 0
    for g in table.domain():
        for f in _SWEEP_ORDER[sys.family]:
            if g < table.lo[f]:
                continue
            cur = table.value(f, g)
            for c in by_target.get(f, ()):
                b = c.bound(table, g)
                if b is not None and b < cur:
                    cur = b
            if cur < table.value(f, g):
                table.set(f, g, cur)
                changed += 1
    return changed


def solve(sys):
    """Pointwise-greatest table satisfying every upper bound.

    Lower-bound violations that the upper bounds force are recorded in
    ``table.forced``; for such systems no table satisfies everything.
    """
    table = _initial(sys)
    if sys.start > sys.N:
        return table
    cons = constraints(sys)
    while project(table, sys, cons):
        pass
    table.forced = [v for v in check_feasible(table, sys) if v.kind == "lower"]
    return table


@dataclass(frozen=True)
class Violation:
    kind: str           # upper | lower | convention | domain
    inequality: str
    function: str
    g: int
    value: int
    bound: int = None

    def __str__(self):
        extra = f" (value {self.value}, bound {self.bound})" if self.bound is not None else f" (value {self.value})"
        return f"{self.inequality} fails at {self.g}{extra}"


def check_feasible(table, sys):
    """Every violated condition, each naming the inequality and the argument."""
    out = []
    # a table may reach further down than the system; those entries must read -1
    if table.family != sys.family or table.start > sys.start or table.N != sys.N:
        return [Violation("domain", "table domain differs from the system", "", table.start, table.N)]
    var = sys.var
    for f in sys.names:
        lo = sys.lo(f)
        for g in table.domain():
            v = table.values[f][g - table.start]
            if g < lo and v != -1:
                out.append(Violation("convention", f"{f}({var}) = -1 below {lo}", f, g, v, -1))
            elif g >= lo and v < 0:
                out.append(Violation("lower", f"{f}({var}) ≥ 0", f, g, v, 0))
        for g in table.domain():
            if g > table.start and table.values[f][g - table.start] < table.values[f][g - table.start - 1]:
                out.append(Violation("lower", f"{f}({var}-1) ≤ {f}({var})", f, g,
                                     table.values[f][g - table.start]))
    checked = RangeTable(table.family, table.start, table.N, {f: sys.lo(f) for f in sys.names}, table.values)
    for c in constraints(sys):
        for g in table.domain():
            if g < sys.lo(c.target):
                continue
            b = c.bound(checked, g)
            v = checked.value(c.target, g)
            if b is not None and v > b:
                out.append(Violation("upper", c.label, c.target, g, v, b))
    return out


# ---------------------------------------------------------------------------
# closed forms


def epsilon(i, n):
    """1 when n = i + 6m for some m >= 0."""
    return int(n >= i and (n - i) % 6 == 0)


VARIANTS = ("oriented-k1", "oriented-k2", "nonorientable-k1")


def closed_form_reference(variant, name, g):
    """The published closed-form solutions, evaluated literally."""
    if variant == "oriented-k1":
        forms = {"F": (2 * g + 1) // 3, "X": (2 * g + 1) // 3, "G": 2 * g // 3, "Y": 2 * g // 3}
    elif variant == "oriented-k2":
        forms = {"F": 2 * g // 3, "Y": 2 * g // 3, "G": (2 * g - 1) // 3, "X": (2 * g + 1) // 3}
    elif variant == "nonorientable-k1":
        n = g
        a = n // 3 + epsilon(2, n)
        b = (n - 1) // 3 + epsilon(6, n)
        forms = {"F'": a, "X'": a, "G'": b, "Y'": b, "H'": n // 3, "Z'": n // 3}
    else:
        raise ValidationError(f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}")
    if name not in forms:
        raise ValidationError(f"{variant} has no function {name!r}")
    return forms[name]


def variant_for(sys):
    """Name of the closed form matching the system, or None."""
    if sys.family == ORIENTED and sys.h == 0 and sys.k in (1, 2):
        return f"oriented-k{sys.k}"
    if sys.family == NONORIENTABLE and (sys.h, sys.k, sys.hp, sys.kp) == (0, 1, 0, 1):
        return "nonorientable-k1"
    return None


@dataclass
class ClosedFormComparison:
    variant: str
    matches: list        # (name, g)
    excess: list         # (name, g, solved, closed)
    deficit: list

    @property
    def ok(self):
        return not self.deficit


def compare_with_closed_forms(table, sys, lo=0):
    variant = variant_for(sys)
    if variant is None:
        return None
    comp = ClosedFormComparison(variant, [], [], [])
    for f in sys.names:
        for g in range(max(lo, table.start), table.N + 1):
            s, c = table.value(f, g), closed_form_reference(variant, f, g)
            if s == c:
                comp.matches.append((f, g))
            elif s > c:
                comp.excess.append((f, g, s, c))
            else:
                comp.deficit.append((f, g, s, c))
    return comp


# ---------------------------------------------------------------------------
# exhaustive maximality check


@dataclass
class OracleResult:
    confirmed: bool
    pointwise_max: RangeTable
    states_explored: int
    counterexample: tuple = None     # (function, argument, value reached, solver value)


def maximality_oracle(sys, max_N=8):
    """Search all tables with steps in {0, 1} that satisfy every upper bound
    and compare their pointwise max with :func:`solve`.

    The scan keeps, for each argument, the reachable windows of recent
    values; windows with no continuation to N are pruned before taking the
    max, so the max is over complete feasible tables.
    """
    if sys.N > max_N:
        raise ValidationError(f"oracle limited to N <= {max_N} (got {sys.N})")
    solved = solve(sys)
    if sys.start > sys.N:
        return OracleResult(True, solved, 0)
    names = sys.names
    start, N = sys.start, sys.N
    lo = [sys.lo(f) for f in names]
    pos = {f: i for i, f in enumerate(names)}
    # forward monotonicity is built into the step choices, so it is dropped here
    cons = [c for c in constraints(sys) if not c.label.endswith(f"≤ {c.target}({sys.var}+1)")]
    # each function keeps just as many past values as some condition looks back
    depth = [1] * len(names)
    for c in cons:
        for t in c.terms:
            if t.cap is None:
                depth[pos[t.fn]] = max(depth[pos[t.fn]], -t.shift)
    compiled = [[] for _ in names]
    for c in cons:
        compiled[pos[c.target]].append(
            [("cap", t.cap) if t.cap is not None else (pos[t.fn], -t.shift, t.add) for t in c.terms])

    def feasible(g, cand):
        for i, rules in enumerate(compiled):
            if g < lo[i]:
                continue
            v = cand[i][-1]
            for terms in rules:
                bound = None
                for t in terms:
                    if t[0] == "cap":
                        b = max(0, t[1](g))
                    else:
                        j, back, add = t
                        b = (cand[j][-1 - back] if g - back >= lo[j] else -1) + add
                    if bound is None or b < bound:
                        bound = b
                if v > bound:
                    return False
        return True

    layers = []
    frontier = {tuple((-1,) * (d + 1) for d in depth): set()}
    explored = 0
    for g in range(start, N + 1):
        nxt = {}
        for state in frontier:
            options = []
            for i in range(len(names)):
                prev = state[i][-1]
                if g < lo[i]:
                    options.append((-1,))
                elif g == lo[i]:
                    options.append((-1, 0))
                else:
                    options.append((prev, prev + 1))
            for choice in _product(options):
                cand = tuple(state[i][1:] + (choice[i],) for i in range(len(names)))
                explored += 1
                if feasible(g, cand):
                    nxt.setdefault(cand, set()).add(state)
        layers.append(nxt)
        frontier = nxt
    # backward pruning: keep states that still reach the last layer
    alive = set(layers[-1])
    maxima = {f: [-math.inf] * (N - start + 1) for f in names}
    for idx in range(len(layers) - 1, -1, -1):
        for state in alive:
            for i, f in enumerate(names):
                maxima[f][idx] = max(maxima[f][idx], state[i][-1])
        if idx:
            alive = set().union(*(layers[idx][s] for s in alive))
    best = RangeTable(sys.family, start, N, dict(zip(names, lo)),
                      {f: [int(v) if v != -math.inf else None for v in maxima[f]] for f in names})
    for f in names:
        for g in range(start, N + 1):
            m, s = best.values[f][g - start], solved.value(f, g)
            if m is None or m != s:
                return OracleResult(False, best, explored, (f, g, m, s))
    return OracleResult(True, best, explored)


def _product(options):
    out = [()]
    for opts in options:
        out = [prefix + (o,) for prefix in out for o in dict.fromkeys(opts)]
    return out


# ---------------------------------------------------------------------------
# parameter transforms


def formal_k_from_pi0(h, projective_planes=False):
    if h < 0:
        raise ValidationError("h must be non-negative")
    return max(2, h) if projective_planes else max(2, 2 * h + 1)


def background_space_transform(h, k, hp=None, kp=None):
    """Parameters after adding a simply connected background space."""
    if (hp is None) != (kp is None):
        raise ValidationError("give both projective-plane parameters or neither")
    if hp is None:
        return (h, max(2, k))
    return (h, max(2, k), hp, max(2, kp))
