"""Command-line entry point.

Exit status: 0 on success, 2 when a checked invariant fails, 1 on usage or
input errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import complex as cx
from . import csvio, entropy, freeproduct, graph, l1norm, permutahedron, systole, verify

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _floats(text: str) -> List[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None
    if not vals:
        raise UsageError("empty list")
    return vals


def _emit(args, name: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    """Write a table under --out, or print it when no directory is given."""
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name)
        csvio.export_csv(header, rows, path)
        print(f"wrote {path}")
    else:
        sys.stdout.write(csvio.to_csv(header, rows))


def _load_graph(path: str) -> graph.MetricGraph:
    try:
        return graph.parse_graph(_read(path))
    except graph.GraphError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_cover(path: Optional[str]) -> Optional[graph.CoverSpec]:
    if path is None:
        return None
    try:
        return graph.parse_cover(_read(path))
    except (graph.GraphError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from None


# ---------------------------------------------------------------- commands

def cmd_entropy(args) -> int:
    G = _load_graph(args.graph)
    spec = _load_cover(args.cover)
    status = EXIT_OK
    universal = spec is None or graph.is_universal(G, spec)
    if universal:
        exact = entropy.entropy_perron(G)
        print(f"entropy_perron {exact.value:.12g}")
    est = entropy.entropy_orbit_count(G, spec, t_max=args.t_max, budget=args.budget)
    lo, hi = est.bracket
    print(f"entropy_orbit_count {est.value:.12g}")
    print(f"bracket [{lo:.12g}, {hi:.12g}]")
    print(f"omega {entropy.omega_value(G, spec) if universal else est.value * G.total_length():.12g}")
    if universal and not lo - 1e-9 <= exact.value <= hi + 1e-9:
        print("invariant failed: Perron value outside orbit-count bracket", file=sys.stderr)
        status = EXIT_INVARIANT
    _emit(args, "entropy_scan.csv", ["t", "count", "log_count", "slope_estimate"],
          [list(r) for r in est.table])
    return status


def cmd_dumbbell(args) -> int:
    G1, G2 = _load_graph(args.graph1), _load_graph(args.graph2)
    s1, s2 = _load_cover(args.cover1), _load_cover(args.cover2)
    d_list = _floats(args.d)
    ball_ts = _floats(args.ball_t) if args.ball_t else []
    rows = freeproduct.additivity_report(G1, s1, G2, s2, d_list, ball_ts)
    for r in rows:
        print(f"d={r.d:g} alpha={r.alpha:.12g} h_d={r.h_d:.12g} gap={r.gap:.6g}")
    header = ["d", "alpha", "h_d", "gap"] + [f"ball_{t:g}" for t in ball_ts]
    table = [[r.d, r.alpha, r.h_d, r.gap] + [c for _, c in r.ball_counts] for r in rows]
    _emit(args, "dumbbell.csv", header, table)
    if not freeproduct.report_consistent(rows):
        print("invariant failed: alpha <= h(d) non-increasing", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _parse_cycle(text: str, X: cx.DeltaComplex) -> cx.Chain:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) != 2:
            raise UsageError(f"cycle line {lineno}: expected '<simplex-id> <rational>'")
        try:
            entries.append((tok[0], Fraction(tok[1])))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cycle line {lineno}: bad coefficient {tok[1]!r}") from None
    if not entries:
        raise UsageError("cycle file is empty")
    for k in range(X.dim, -1, -1):
        if all(sid in X.names[k] for sid, _ in entries):
            coeffs = {}
            for sid, v in entries:
                i = X.index(k, sid)
                coeffs[i] = coeffs.get(i, Fraction(0)) + v
            return cx.Chain(k, coeffs)
    raise UsageError("cycle ids do not all name simplices of one dimension")


def cmd_l1norm(args) -> int:
    try:
        X = cx.parse_complex(_read(args.complex))
    except cx.ComplexError as exc:
        raise UsageError(f"{args.complex}: {exc}") from None
    c0 = _parse_cycle(_read(args.cycle), X)
    try:
        p = l1norm.NormProblem(X, c0, args.ring)
    except (cx.ComplexError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    r = l1norm.l1_ilp(p) if args.ring == "int" else l1norm.l1_lp(p)
    print(f"value {csvio.format_cell(r.value)}")
    print(f"method {r.tag}")
    status = EXIT_OK
    if args.dual:
        if args.ring == "int":
            raise UsageError("--dual needs --ring rat")
        if r.certificate is None:
            print("dual none (zero class)")
        else:
            print("dual " + " ".join(csvio.format_cell(a) for a in r.certificate))
            ok = l1norm.dual_certificate_check(r, p)
            print(f"dual_check {'pass' if ok else 'fail'}")
            if not ok:
                status = EXIT_INVARIANT
    rows = [[X.names[r.chain.degree][i], v] for i, v in sorted(r.chain.coeffs.items()) if v]
    _emit(args, "l1_chain.csv", ["simplex", "coefficient"], rows or [["none", 0]])
    return status


def cmd_tomei(args) -> int:
    if not 1 <= args.m <= 3:
        raise UsageError("--m must be 1, 2 or 3")
    T = permutahedron.build_tomei(args.m)
    print(f"m {args.m}")
    print(f"cells {len(T.cells)}")
    print("cell_counts " + " ".join(str(c) for c in T.cell_counts))
    print(f"euler_characteristic {T.euler_characteristic()}")
    print(f"volume {permutahedron.tomei_volume(args.m):.12g}")
    rep = permutahedron.constants_report(args.m, args.t_max)
    for q, v, prov in rep.rows():
        print(f"{q} {v}  [{prov}]")
    est = permutahedron.tomei_entropy_estimate(args.m, args.t_max)
    _emit(args, "tomei_skeleton.csv", ["t", "count", "log_count", "slope_estimate"],
          [list(r) for r in est.table])
    expect = {1: 0, 2: -2, 3: 0}[args.m]
    if T.euler_characteristic() != expect:
        print("invariant failed: Euler characteristic", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _parse_group(text: str) -> systole.MarkedGroup:
    kind, _, rank = text.partition(":")
    if kind != "free" or not rank.isdigit() or int(rank) < 1:
        raise UsageError(f"unsupported group {text!r}; expected free:<rank>")
    return systole.MarkedGroup(int(rank))


def _parse_family(text: str, g: systole.MarkedGroup) -> List[systole.Homomorphism]:
    kind, _, rest = text.partition(":")
    if kind != "sl2modp" or not rest:
        raise UsageError(f"unsupported family {text!r}; expected sl2modp:<p>,<p>,...")
    if g.rank != 2:
        raise UsageError("sl2modp families need --group free:2")
    try:
        ps = [int(v) for v in rest.split(",")]
    except ValueError:
        raise UsageError(f"bad modulus list {rest!r}") from None
    if any(p < 2 for p in ps):
        raise UsageError("moduli must be at least 2")
    return [systole.sl2_mod(p) for p in ps]


def cmd_systole(args) -> int:
    g = _parse_group(args.group)
    fam = _parse_family(args.family, g)
    scan = systole.sigma_scan_multiples(g, fam, args.m)
    for k, s, v, r in scan.rows:
        print(f"k={k} sys={s} vol={v:g} ratio={r:.6g}")
    print(f"fit_c {scan.fit_c:.12g}")
    print(f"fit_C {scan.fit_C:.12g}")
    _emit(args, "systole.csv", ["k", "sys", "vol", "ratio", "fit_c"],
          [[k, s, v, r, scan.fit_c] for k, s, v, r in scan.rows])
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in verify.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}")
    reports = verify.run_verify_suite(args.suite, seed=args.seed, budget=args.budget,
                                      corrupt_dual=args.corrupt_dual)
    n_fail = 0
    for rep in reports:
        for c in rep.checks:
            mark = "PASS" if c.passed else "FAIL"
            print(f"{mark} {rep.name}.{c.name}" + (f"  {c.detail}" if c.detail else ""))
            n_fail += not c.passed
    out = args.out or "verify_out"
    for path in verify.write_reports(reports, out):
        print(f"wrote {path}")
    print(f"{sum(len(r.checks) for r in reports) - n_fail} passed, {n_fail} failed")
    return EXIT_INVARIANT if n_fail else EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="volentropy",
                 description="Volume entropy, l1 norms and systoles at desk scale.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=graph.DEFAULT_BUDGET,
                    help="cap on settled states in cover searches")
    ap.add_argument("--out", help="directory for CSV output (default: print to stdout)")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("entropy", help="entropy of a metric graph or one of its covers")
    p.add_argument("--graph", required=True)
    p.add_argument("--cover", help="cover file; default is the universal cover")
    p.add_argument("--t-max", type=float, default=25.0)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("dumbbell", help="entropy of two graphs joined by a bridge")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--cover1")
    p.add_argument("--cover2")
    p.add_argument("--d", default="1,2,4,8,16", help="bridge half-lengths, comma-separated")
    p.add_argument("--ball-t", help="radii for exact ball counts, comma-separated")
    p.set_defaults(func=cmd_dumbbell)

    p = sub.add_parser("l1norm", help="l1-minimal representative of a homology class")
    p.add_argument("complex")
    p.add_argument("cycle")
    p.add_argument("--ring", choices=("int", "rat"), default="rat")
    p.add_argument("--dual", action="store_true", help="print and check the dual certificate")
    p.set_defaults(func=cmd_l1norm)

    p = sub.add_parser("tomei", help="Tomei manifold tiling and its constants")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--t-max", type=float, default=30.0)
    p.set_defaults(func=cmd_tomei)

    p = sub.add_parser("systole", help="systoles of a family of finite-index kernels")
    p.add_argument("--group", default="free:2")
    p.add_argument("--family", default="sl2modp:3,5,7,11,13")
    p.add_argument("--m", type=int, default=1)
    p.set_defaults(func=cmd_systole)

    p = sub.add_parser("verify", help="run the pinned invariant suites")
    p.add_argument("suite", nargs="?", default="all",
                   help="one of entropy, dumbbell, l1, tomei, systole, all")
    p.add_argument("--corrupt-dual", action="store_true",
                   help="negative control: perturb one dual certificate")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
        if getattr(args, "t_max", 1.0) <= 0:
            raise UsageError("--t-max must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except graph.BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (graph.GraphError, cx.ComplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
