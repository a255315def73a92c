"""Pinned invariant checks per module, runnable from the command line.

Each suite returns a list of :class:`Check` plus named data tables. Nothing
here depends on wall-clock time, so two runs with the same seed write the
same bytes.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import complex as cx
from . import csvio, entropy, freeproduct, graph, l1norm, permutahedron, systole

SUITES = ("entropy", "dumbbell", "l1", "tomei", "systole")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    checks: List[Check] = field(default_factory=list)
    tables: Dict[str, Tuple[List[str], List[list]]] = field(default_factory=dict)

    def add(self, name: str, passed, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


# ------------------------------------------------------------------ entropy

def suite_entropy(seed: int = 0, budget: int = graph.DEFAULT_BUDGET, n_random: int = 12,
                  t_max: float = 25.0) -> SuiteReport:
    rep = SuiteReport("entropy")
    fig8, theta, rose3 = graph.figure_eight(), graph.theta(), graph.rose(3)
    for name, G, exact in (("figure8", fig8, math.log(3)), ("theta", theta, math.log(2)),
                           ("rose3", rose3, math.log(5))):
        h = entropy.entropy_perron(G).value
        rep.add(f"perron_{name}", _close(h, exact, 1e-9), f"{h:.12g}")
    rep.add("perron_circle", entropy.entropy_perron(graph.circle(2.5)).value == 0.0)

    rng = np.random.default_rng(seed)
    graphs = [graph.random_graph(rng, int(rng.integers(2, 5))) for _ in range(n_random)]
    ok_scale = ok_omega = ok_oracle = ok_mono = ok_base = True
    for G in graphs:
        h = entropy.entropy_perron(G).value
        for lam in (0.5, 2.0, 3.7):
            h2 = entropy.entropy_perron(G.scaled(lam)).value
            ok_scale &= _close(h2, h / lam, 1e-9)
            om = entropy.omega_value(G)
            ok_omega &= _close(entropy.omega_value(G.scaled(lam)), om, 1e-9)
        est = entropy.entropy_orbit_count(G, t_max=t_max, budget=budget)
        ok_oracle &= est.bracket[0] <= h <= est.bracket[1]
        i = int(rng.integers(len(G.edges)))
        lengths = list(G.lengths)
        lengths[i] *= 1.5
        ok_mono &= entropy.entropy_perron(G.with_lengths(lengths)).value <= h + 1e-12
        other = G.with_basepoint(G.n - 1)
        est2 = entropy.entropy_orbit_count(other, t_max=t_max, budget=budget)
        ok_base &= est2.bracket[0] <= h <= est2.bracket[1]
    rep.add("scaling_law", ok_scale)
    rep.add("omega_scale_invariance", ok_omega)
    rep.add("orbit_count_brackets_perron", ok_oracle, f"{n_random} graphs, t_max={t_max:g}")
    rep.add("monotone_in_edge_length", ok_mono)
    rep.add("basepoint_independence", ok_base)

    spec3 = graph.CoverSpec.finite(3, {"a": "(0 1 2)"})
    cover = graph.finite_cover(fig8, spec3)
    hc, hb = entropy.entropy_perron(cover).value, entropy.entropy_perron(fig8).value
    rep.add("finite_cover_entropy", _close(hc, hb, 1e-9), f"{hc:.12g}")
    rep.add("finite_cover_length", _close(cover.total_length(), 3 * fig8.total_length(), 1e-9))
    rep.add("finite_cover_omega",
            _close(entropy.omega_value(cover), 3 * entropy.omega_value(fig8), 1e-9))

    specs = [graph.CoverSpec.trivial(), spec3,
             graph.CoverSpec.free(1, {"a": "x1"}),
             graph.CoverSpec.free(2, {"a": "x1", "b": "x2"})]
    ok = all(entropy.entropy_relative(fig8, s).value <= hb + 1e-9 for s in specs)
    rep.add("relative_at_most_absolute", ok)
    rep.add("killed_generator_zero",
            entropy.entropy_orbit_count(fig8, specs[2], t_max).value == 0.0)

    lengths, om = entropy.minimize_omega_lengths(fig8, 1.0, seed=seed)
    rep.add("omega_min_figure8", _close(om, 2 * math.log(3), 1e-6), f"{om:.12g}")

    est = entropy.entropy_orbit_count(fig8, t_max=t_max)
    rep.tables["entropy_scan"] = (["t", "count", "log_count", "slope_estimate"],
                                  [list(r) for r in est.table])
    return rep


# ----------------------------------------------------------------- dumbbell

def z3_model(d: float) -> freeproduct.DumbbellModel:
    c = graph.circle(1.0)
    z3 = graph.CoverSpec.finite(3, {"a": "(0 1 2)"})
    return freeproduct.build_dumbbell(c, z3, c, z3, d, balance=False)


def suite_dumbbell(seed: int = 0, budget: int = graph.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("dumbbell")
    ok = True
    for d in (1, 2, 4, 8):
        h = freeproduct.dumbbell_entropy_exact(z3_model(d))
        ok &= _close(h, math.log(2) / (1 + 2 * d), 1e-9)
    rep.add("z3z3_closed_form", ok)
    m1 = z3_model(1)
    rep.add("z3z3_ball_count_t3", freeproduct.exact_ball_count(m1, 3) == 5)
    lo, slope, hi = freeproduct.ball_growth_bracket(m1, 40.0, 0.25)
    h1 = freeproduct.dumbbell_entropy_exact(m1)
    rep.add("z3z3_growth_bracket", lo - 1e-12 <= h1 <= hi, f"[{lo:.6g}, {hi:.6g}]")
    D = freeproduct.assembled_cover_distances(m1, 18.0)
    ok = all(_close(freeproduct.orbit_distance(freeproduct.NormalForm(list(w)), m1), x, 1e-9)
             for w, x in D.items())
    rep.add("distance_formula_vs_assembled_cover",
            ok and len(D) == freeproduct.exact_ball_count(m1, 18.0))
    sw = m1.swapped()
    rep.add("swap_symmetry", freeproduct.exact_ball_count(sw, 12) ==
            freeproduct.exact_ball_count(m1, 12))

    c = graph.circle(1.0)
    z2 = graph.CoverSpec.finite(2, {"a": "(0 1)"})
    z2m = freeproduct.build_dumbbell(c, z2, c, z2, 1.0, balance=False)
    rep.add("z2z2_zero", freeproduct.dumbbell_entropy_exact(z2m) == 0.0)

    fig8 = graph.figure_eight()
    d_list = [1, 2, 4, 8, 16]
    rows = freeproduct.additivity_report(fig8, None, fig8, None, d_list)
    alpha = rows[0].alpha
    rep.add("balanced_alpha", _close(alpha, 4 * math.log(3), 1e-9), f"{alpha:.12g}")
    rep.add("alpha_le_h_and_nonincreasing", freeproduct.report_consistent(rows))
    rep.add("gap_at_16", rows[-1].h_d - alpha < 0.1 * alpha, f"{rows[-1].gap:.3g}")

    model = freeproduct.build_dumbbell(fig8, None, fig8, None, 1.0)
    alpha1 = alpha + 0.05
    C = freeproduct.factor_constant(model, alpha1, 6.0)
    ok_bound = ok_sandwich = True
    for d in (0.75, 1.0, 2.0, 4.0):
        md = freeproduct.DumbbellModel(model.f1, model.f2, d, model.lam, alpha)
        for t in (1.0, 3.0, 5.0):
            ok_bound &= (freeproduct.exact_ball_count(md, t)
                         <= freeproduct.analytic_ball_bound(md, t, alpha1, C))
        if C * d * math.exp(-alpha1 * (2 * d - 1)) < 1:
            h = freeproduct.dumbbell_entropy_exact(md)
            ok_sandwich &= alpha - 1e-9 <= h <= alpha + (alpha1 - alpha) + 1 / d
    rep.add("ball_count_below_analytic_bound", ok_bound)
    rep.add("sandwich", ok_sandwich)

    circle_rows = freeproduct.additivity_report(c, None, c, None, [1, 4, 16])
    rep.add("circle_factors_alpha_zero", circle_rows[0].alpha == 0.0 and
            all(b.h_d < a.h_d for a, b in zip(circle_rows, circle_rows[1:])))
    rep.tables["dumbbell"] = (["d", "alpha", "h_d", "gap"],
                              [[r.d, r.alpha, r.h_d, r.gap] for r in rows])
    return rep


# ----------------------------------------------------------------------- l1

def random_chain(rng: np.random.Generator, X: cx.DeltaComplex, k: int) -> cx.Chain:
    n = X.count(k)
    vals = {int(i): Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
            for i in rng.choice(n, size=min(n, int(rng.integers(1, 4))), replace=False)}
    return cx.Chain(k, vals)


def l1_test_complexes() -> List[Tuple[str, cx.DeltaComplex]]:
    return [("torus", cx.torus()), ("pillow", cx.pillow()), ("genus2", cx.genus2()),
            ("sd_torus", cx.barycentric_subdivide(cx.torus())),
            ("cone_genus2", cx.cone(cx.genus2())), ("simplex3", cx.standard_simplex(3)),
            ("rp2", cx.projective_plane())]


def suite_l1(seed: int = 0, corrupt_dual: bool = False) -> SuiteReport:
    rep = SuiteReport("l1")
    table = []
    for name, X, expect in (("torus", cx.torus(), 2), ("genus2", cx.genus2(), 6),
                            ("pillow", cx.pillow(), 2), ("circle", cx.circle(), 1)):
        z = cx.check_pseudomanifold(X).fundamental_cycle
        p = l1norm.NormProblem(X, z)
        r = l1norm.l1_lp(p)
        ri = l1norm.l1_ilp(l1norm.NormProblem(X, z, "int"))
        if corrupt_dual and name == "torus":
            r.certificate = list(r.certificate)
            r.certificate[0] += Fraction(1, 7)
        rep.add(f"lp_{name}", r.value == expect, str(r.value))
        rep.add(f"ilp_{name}", ri.value == expect, str(ri.value))
        rep.add(f"dual_{name}", l1norm.dual_certificate_check(r, p))
        table.append([name, r.value, ri.value])

    rng = np.random.default_rng(seed)
    cplx = l1_test_complexes()
    ok_dd = ok_bound = True
    for _ in range(1000):
        name, X = cplx[int(rng.integers(len(cplx)))]
        k = int(rng.integers(1, X.dim + 1))
        z = random_chain(rng, X, k)
        bz = cx.boundary(z, X)
        ok_bound &= bz.l1() <= (k + 1) * z.l1()
        if k >= 2:
            ok_dd &= cx.boundary(bz, X).is_zero()
    rep.add("boundary_squared_zero", ok_dd, "1000 random chains")
    rep.add("boundary_norm_bound", ok_bound, "|dz|_1 <= (m+2)|z|_1 for degree m+1")

    T = cx.torus()
    zt = cx.check_pseudomanifold(T).fundamental_cycle
    base = l1norm.l1_lp(l1norm.NormProblem(T, zt)).value
    ok = all(l1norm.l1_lp(l1norm.NormProblem(T, zt.scale(k))).value == k * base
             for k in (2, 3, Fraction(1, 2)))
    rep.add("lp_homogeneity", ok)
    G2 = cx.genus2()
    basis = cx.homology_rank(G2, 1)[1]
    a, b = basis[0], basis[1]
    va = l1norm.l1_lp(l1norm.NormProblem(G2, a)).value
    vb = l1norm.l1_lp(l1norm.NormProblem(G2, b)).value
    vab = l1norm.l1_lp(l1norm.NormProblem(G2, a + b)).value
    rep.add("lp_triangle_inequality", vab <= va + vb, f"{vab} <= {va} + {vb}")

    RP = cx.projective_plane()
    loop = cx.Chain(1, {RP.index(1, "c"): 1})
    lp_v = l1norm.l1_lp(l1norm.NormProblem(RP, loop)).value
    ilp_v = l1norm.l1_ilp(l1norm.NormProblem(RP, loop, "int")).value
    rep.add("lp_below_ilp_torsion", lp_v == 0 and ilp_v >= 1, f"{lp_v} < {ilp_v}")

    S = cx.barycentric_subdivide(T)
    zs = cx.check_pseudomanifold(S).fundamental_cycle
    vs = l1norm.l1_lp(l1norm.NormProblem(S, zs)).value
    rep.add("subdivided_fundamental_class", vs == S.count(2), f"{vs}")

    seq = l1norm.fekete_estimate([(n, 1) for n in range(1, 9)])
    rep.add("fekete_circle", seq.estimate == Fraction(1, 8) and seq.estimate == min(seq.ratios))
    rep.tables["l1"] = (["complex", "lp_value", "ilp_value"], table)
    return rep


# -------------------------------------------------------------------- tomei

def suite_tomei(seed: int = 0, t_max: float = 30.0) -> SuiteReport:
    rep = SuiteReport("tomei")
    ok = True
    for m in range(1, 5):
        P = permutahedron.build_permutahedron(m)
        ok &= (len(P.vertices) == math.factorial(m + 1) and len(P.facets) == 2 ** (m + 1) - 2
               and P.is_simple())
    rep.add("permutahedron_counts", ok)
    rep.add("truncation_equivalence",
            all(permutahedron.truncation_equivalence(m) for m in (1, 2, 3)))
    vols = {1: math.sqrt(2), 2: 3 * math.sqrt(3), 3: 32.0}
    for m, v in vols.items():
        got = permutahedron.permutahedron_volume(m)
        rep.add(f"volume_m{m}", _close(got, v, 1e-9), f"{got:.12g}")
    for m, chi in ((1, 0), (2, -2), (3, 0)):
        T = permutahedron.build_tomei(m)
        rep.add(f"euler_m{m}", T.euler_characteristic() == chi)
        degs = {deg for _, deg in T.dual.degree()}
        rep.add(f"dual_regular_m{m}", degs == {2 ** (m + 1) - 2} and T.dual.number_of_nodes() == 2 ** m)
    rep.add("tomei_volume_m2", _close(permutahedron.tomei_volume(2), 12 * math.sqrt(3), 1e-9))
    r = permutahedron.constants_report(2, t_max)
    rep.add("constant_ratio", r.factor_ratio == Fraction(1, 27))
    rep.add("constant_positive", 0 < r.c_prime < math.inf)
    est = permutahedron.tomei_entropy_estimate(2, t_max)
    rep.tables["tomei"] = (["t", "count", "log_count", "slope_estimate"],
                           [list(x) for x in est.table])
    rep.tables["constants"] = (["quantity", "value", "provenance"], [list(x) for x in r.rows()])
    return rep


# ------------------------------------------------------------------ systole

def suite_systole(seed: int = 0, budget: int = graph.DEFAULT_BUDGET) -> SuiteReport:
    rep = SuiteReport("systole")
    F2 = systole.MarkedGroup(2)
    scan = systole.sigma_scan_multiples(F2, [systole.sl2_mod(p) for p in (3, 5, 7, 11, 13)], 1)
    rep.add("sys_gamma3", scan.rows[0][1] == 3)
    rep.add("sys_nondecreasing", scan.nondecreasing())
    rep.add("fit_c_positive", scan.fit_c > 0, f"{scan.fit_c:.6g}")
    rep.add("ratio_within_factor_3", scan.ratio_spread() <= 3, f"{scan.ratio_spread():.4g}")
    rep.add("vol_is_index_times_base", all(r[2] == r[0] * 2 for r in scan.rows))
    s3 = systole.cayley_systole(F2, systole.sl2_mod(3))[0]
    s9 = systole.cayley_systole(F2, systole.sl2_mod(9))[0]
    rep.add("nested_kernels", s9 >= s3, f"{s9} >= {s3}")

    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(8):
        G = graph.random_graph(rng, int(rng.integers(1, 4)))
        ok &= systole.graph_systole_essential(G, graph.CoverSpec.trivial(), budget) <= G.total_length()
    rep.add("graph_systole_below_length", ok)
    ks = list(range(2, 40))
    est = systole.stabilized_seminorm([(k, k / math.log(k) ** 2) for k in ks], m=2)
    rep.add("seminorm_unit_profile", _close(est, 1.0, 1e-12))
    est3 = systole.stabilized_seminorm([(k, 3 * k / math.log(k) ** 2) for k in ks], m=2)
    rep.add("seminorm_homogeneous", _close(est3, 3 * est, 1e-12))
    rep.tables["systole"] = (["k", "sys", "vol", "ratio", "fit_c"],
                             [[k, s, v, r, scan.fit_c] for k, s, v, r in scan.rows])
    return rep


RUNNERS: Dict[str, Callable[..., SuiteReport]] = {
    "entropy": suite_entropy, "dumbbell": suite_dumbbell, "l1": suite_l1,
    "tomei": suite_tomei, "systole": suite_systole,
}


def run_verify_suite(name: str, seed: int = 0, budget: int = graph.DEFAULT_BUDGET,
                     **kw) -> List[SuiteReport]:
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        if n not in RUNNERS:
            raise ValueError(f"unknown suite {n!r}")
        kwargs = dict(seed=seed)
        if n in ("entropy", "dumbbell", "systole"):
            kwargs["budget"] = budget
        if n == "l1" and kw.get("corrupt_dual"):
            kwargs["corrupt_dual"] = True
        out.append(RUNNERS[n](**kwargs))
    return out


def write_reports(reports: Sequence[SuiteReport], out_dir: str) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    rows = [[r.name, c.name, c.passed, c.detail] for r in reports for c in r.checks]
    path = os.path.join(out_dir, "checks.csv")
    csvio.export_csv(["suite", "check", "passed", "detail"], rows, path)
    paths.append(path)
    for r in reports:
        for tname, (header, trows) in r.tables.items():
            if trows:
                path = os.path.join(out_dir, f"{tname}.csv")
                csvio.export_csv(header, trows, path)
                paths.append(path)
    return paths
