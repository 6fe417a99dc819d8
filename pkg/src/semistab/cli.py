"""Command-line front end: ``semistab <subcommand> ...``.

Exit codes: 0 on success, 1 when an input fails validation, 2 for usage
errors (argparse).
"""

import argparse
import json
import sys

from . import constructions, ranges, semisimp, specseq, surfaces
from .exactalg import ZZ, Ring, ValidationError, homology_all, mapping_cone, reduced_homology_all


class _Usage(Exception):
    pass


def _ring(text):
    try:
        return Ring.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _field(text):
    ring = _ring(text)
    if not ring.is_field:
        raise argparse.ArgumentTypeError("the spectral sequence needs a field: Q or Fp:P")
    return ring


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None


def _load_set(path):
    try:
        return semisimp.SemiSimplicialSet.from_json(_read(path))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _emit(text, out, stdout):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _format_groups(groups, ring, reduced):
    prefix = "H~" if reduced else "H"
    parts = []
    for g in groups:
        if g.degree < 0 and g.is_zero():
            continue
        parts.append(f"{prefix}{g.degree}={g.format(ring)}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# subcommands


def cmd_homology(args, out):
    X = _load_set(args.input)
    ring = args.coefficients
    if X.pointed:
        groups, reduced = homology_all(semisimp.reduced_realization_chains(X, ring)), True
    elif args.reduced and X.augmented:
        groups, reduced = homology_all(semisimp.realization_chains(X, ring, augmented=True)), True
    elif args.reduced:
        groups, reduced = reduced_homology_all(semisimp.realization_chains(X, ring)), True
    else:
        groups, reduced = homology_all(semisimp.realization_chains(X, ring)), False
    out.write(_format_groups(groups, ring, reduced) + "\n")


def cmd_injective_words(args, out):
    if args.n < 0:
        raise _Usage("--n must be non-negative")
    _emit(constructions.injective_words(args.n).to_json(), args.out, out)


def cmd_half_smash(args, out):
    _emit(constructions.half_smash(_load_set(args.input)).to_json(), args.out, out)


def _load_map(path, source, target):
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict) or not isinstance(data.get("maps"), list):
        raise ValidationError(f"{path}: $.maps: expected an array of index arrays")
    for d, lv in enumerate(data["maps"]):
        if not isinstance(lv, list) or not all(isinstance(v, int) for v in lv):
            raise ValidationError(f"{path}: $.maps[{d}]: expected an array of integers")
    aug = data.get("augmentation")
    if aug is not None and (not isinstance(aug, list) or not all(isinstance(v, int) for v in aug)):
        raise ValidationError(f"{path}: $.augmentation: expected an array of integers")
    f = semisimp.SemiSimplicialMap(source, target, data["maps"], aug)
    bad = f.validate()
    if bad:
        raise ValidationError(f"{path}: {bad[0]}")
    return f


def cmd_cone(args, out):
    S, T = _load_set(args.source), _load_set(args.target)
    f = _load_map(args.map, S, T)
    C = mapping_cone(semisimp.chain_map(f))
    out.write("cone " + _format_groups(homology_all(C), ZZ, False) + "\n")
    if args.out:
        if not f.is_levelwise_injective():
            raise ValidationError("--out needs a levelwise injective map for the set-level cone")
        _emit(semisimp.levelwise_cone(f).to_json(), args.out, out)


def cmd_suspension_check(args, out):
    X = _load_set(args.input)
    report = constructions.suspension_comparison(X, args.k)
    out.write("\n".join(report.lines()) + "\n")


def cmd_specseq(args, out):
    X = _load_set(args.input)
    D = specseq.from_semisimplicial(X, args.field, augmented=args.augmented)
    r_max = args.pages
    pages = specseq.pages(D, r_max)
    abut = specseq.abutment_check(D) if r_max is not None else specseq.abutment_check(D, pages)
    if args.format == "json":
        out.write(specseq.pages_to_json(D, pages, abut))
        return
    out.write(specseq.format_pages(D, pages) + "\n")
    if args.augmented:
        out.write("abutment (total degree n = cone degree n+1):\n")
        out.write("\n".join(abut.lines(shift=1)) + "\n")
    else:
        out.write("abutment:\n" + "\n".join(abut.lines()) + "\n")


def cmd_surface(args, out):
    S = surfaces.SurfaceType.parse(args.surface)
    chi = surfaces.euler_characteristic
    if args.action == "chi":
        out.write(f"{chi(S)}\n")
        return
    if args.action == "stabilize":
        T = surfaces.stabilization_target(S, args.kind)
    else:
        if args.arcs < 1:
            raise _Usage("--arcs must be at least 1")
        T = surfaces.cut(S, args.kind, args.arcs)
    out.write(f"{T} (chi: {chi(S)} -> {chi(T)})\n")


def cmd_ranges(args, out):
    if args.family == ranges.ORIENTED and (args.hp is not None or args.kp is not None):
        raise _Usage("--hp/--kp only apply to --family nonorientable")
    if args.oracle and args.max > 8:
        raise _Usage("--oracle is limited to --max 8")
    system = ranges.RangeSystem(args.family, args.h, args.k, args.max, args.hp, args.kp)
    table = ranges.solve(system)
    for v in table.forced:
        sys.stderr.write(f"note: forced by the upper bounds: {v}\n")
    if args.check_paper:
        comp = ranges.compare_with_closed_forms(table, system)
        if comp is None:
            out.write("INFO no closed form is known for these parameters\n")
        else:
            if comp.deficit:
                for f, g, s, c in comp.deficit:
                    out.write(f"FAIL {f}({g}) = {s} is below the closed form {c}\n")
            else:
                out.write(f"MATCH closed form {_describe(comp.variant)} family on 0..{system.N}"
                          + (" (up to the excess below)" if comp.excess else "") + "\n")
            for f, g, s, c in comp.excess:
                out.write(f"INFO {f}({g}) = {s} exceeds the closed form {c}\n")
    if args.oracle:
        res = ranges.maximality_oracle(system)
        if res.confirmed:
            out.write(f"ORACLE confirmed maximal ({res.states_explored} states)\n")
        else:
            f, g, m, s = res.counterexample
            out.write(f"ORACLE counterexample: {f}({g}) reaches {m}, solver has {s}\n")
    out.write(table.to_csv() if args.format == "csv" else table.format())


def _describe(variant):
    return {
        "oriented-k1": "F=X=⌊(2g+1)/3⌋, G=Y=⌊2g/3⌋",
        "oriented-k2": "F=Y=⌊2g/3⌋, G=⌊(2g-1)/3⌋, X=⌊(2g+1)/3⌋",
        "nonorientable-k1": "F'=X'=⌊n/3⌋+e2(n), G'=Y'=⌊(n-1)/3⌋+e6(n), H'=Z'=⌊n/3⌋",
    }[variant]


def cmd_report(args, out):
    kind = surfaces.stabilization_kind(args.kind)
    if args.beta_split and kind != "beta":
        raise _Usage("--beta-split only applies to --kind b")
    if args.closeable and kind != "gamma":
        raise _Usage("--closeable only applies to --kind g")
    S = surfaces.SurfaceType.parse(args.surface)
    table = ranges.RangeTable.from_csv(_read(args.ranges))
    report = surfaces.stability_range_report(kind, S, table, args.beta_split, args.closeable)
    out.write(f"{report}\n")


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="semistab", description="Semi-simplicial homology and stability-range toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("homology", help="homology of a semi-simplicial set (JSON)")
    s.add_argument("--input", required=True)
    s.add_argument("--coefficients", type=_ring, default=ZZ)
    s.add_argument("--reduced", action="store_true")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("injective-words", help="complex of injective words on n letters")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_injective_words)

    s = sub.add_parser("half-smash", help="half-smash construction of an augmented set")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_half_smash)

    s = sub.add_parser("cone", help="mapping cone of a semi-simplicial map")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--map", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("suspension-check", help="compare the suspension with the half-smash")
    s.add_argument("--input", required=True)
    s.add_argument("--k", type=int, help="connectivity to test (default: derived from the fibres)")
    s.set_defaults(func=cmd_suspension_check)

    s = sub.add_parser("specseq", help="spectral sequence of the skeletal filtration")
    s.add_argument("--input", required=True)
    s.add_argument("--field", type=_field, required=True)
    s.add_argument("--augmented", action="store_true")
    s.add_argument("--pages", type=int)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_specseq)

    s = sub.add_parser("surface", help="surface arithmetic")
    acts = s.add_subparsers(dest="action", required=True)
    a = acts.add_parser("chi")
    a.add_argument("--surface", required=True)
    a = acts.add_parser("stabilize")
    a.add_argument("--kind", choices=("a", "b", "g", "m"), required=True)
    a.add_argument("--surface", required=True)
    a = acts.add_parser("cut")
    a.add_argument("--kind", choices=surfaces.CUTS, required=True)
    a.add_argument("--arcs", type=int, required=True)
    a.add_argument("--surface", required=True)
    s.set_defaults(func=cmd_surface)

    s = sub.add_parser("ranges", help="solve the stability-range recurrences")
    s.add_argument("--family", choices=(ranges.ORIENTED, ranges.NONORIENTABLE), required=True)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--hp", type=int)
    s.add_argument("--kp", type=int)
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--format", choices=("table", "csv"), default="csv")
    s.add_argument("--check-paper", action="store_true")
    s.add_argument("--oracle", action="store_true")
    s.set_defaults(func=cmd_ranges)

    s = sub.add_parser("report", help="stability range for a stabilisation map")
    s.add_argument("--kind", choices=("a", "b", "g", "m"), required=True)
    s.add_argument("--surface", required=True)
    s.add_argument("--ranges", required=True)
    s.add_argument("--beta-split", action="store_true")
    s.add_argument("--closeable", action="store_true")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args, stdout)
    except _Usage as exc:
        parser.error(str(exc))
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
