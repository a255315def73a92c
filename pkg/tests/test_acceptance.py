"""End-to-end acceptance checks, one test per criterion.

Each test also enforces its wall-clock limit. The per-criterion PASS/FAIL
lines are printed at the end of the pytest run by conftest.py.
"""
import itertools
import math
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from volentropy import complex as cx
from volentropy import entropy as E
from volentropy import freeproduct as F
from volentropy import graph as G
from volentropy import l1norm as L
from volentropy import permutahedron as P
from volentropy import systole as S
from volentropy.cli import main
from volentropy.verify import random_chain


@contextmanager
def time_limit(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    assert elapsed < seconds, f"took {elapsed:.2f} s, limit {seconds} s"


@pytest.mark.acceptance(1, "graph entropy exact on figure-8, theta, rose of 3")
def test_perron_exact_values():
    for g, exact in ((G.figure_eight(), math.log(3)), (G.theta(), math.log(2)),
                     (G.rose(3), math.log(5))):
        with time_limit(1.0):
            h = E.entropy_perron(g).value
        assert abs(h - exact) <= 1e-9


@pytest.mark.acceptance(2, "orbit-count bracket contains the Perron value on 50 random graphs")
def test_orbit_count_brackets_perron():
    rng = np.random.default_rng(2024)
    misses = []
    with time_limit(120.0):
        for i in range(50):
            g = G.random_graph(rng, int(rng.integers(2, 5)))
            h = E.entropy_perron(g).value
            lo, hi = E.entropy_orbit_count(g, t_max=25.0).bracket
            if not lo <= h <= hi:
                misses.append((i, h, lo, hi))
    assert not misses


@pytest.mark.acceptance(3, "scaling law, omega invariance, 3-fold cover of the figure-8")
def test_scaling_and_covers():
    rng = np.random.default_rng(3)
    with time_limit(10.0):
        for _ in range(20):
            g = G.random_graph(rng, int(rng.integers(2, 5)))
            h = E.entropy_perron(g).value
            om = E.omega_value(g)
            for lam in (0.25, 0.5, 2.0, 3.7, 10.0):
                assert abs(E.entropy_perron(g.scaled(lam)).value - h / lam) <= 1e-9
                assert abs(E.omega_value(g.scaled(lam)) - om) <= 1e-9
        fig8 = G.figure_eight()
        spec = G.CoverSpec.finite(3, {"a": "(0 1 2)", "b": "(0 1)"})
        cover = G.finite_cover(fig8, spec)
        assert cover.is_connected()
        assert cover.n == 3
        assert abs(cover.total_length() - 3 * fig8.total_length()) <= 1e-12
        assert abs(E.entropy_perron(cover).value - E.entropy_perron(fig8).value) <= 1e-9


def z3_model(d):
    c = G.circle(1.0)
    z3 = G.CoverSpec.finite(3, {"a": "(0 1 2)"})
    return F.build_dumbbell(c, z3, c, z3, d, balance=False)


@pytest.mark.acceptance(4, "free-product dumbbells: Z3*Z3 closed form and balanced figure-8 pair")
def test_dumbbell_entropy():
    with time_limit(300.0):
        for d in (1, 2, 4, 8):
            h = F.dumbbell_entropy_exact(z3_model(d))
            assert abs(h - math.log(2) / (1 + 2 * d)) <= 1e-9
        for d in (1, 2):
            m = z3_model(d)
            lo, _, hi = F.ball_growth_bracket(m, 20.0 + 20.0 * d, 0.25)
            assert lo <= F.dumbbell_entropy_exact(m) <= hi

        fig8 = G.figure_eight()
        rows = F.additivity_report(fig8, None, fig8, None, [1, 2, 4, 8, 16])
        alpha = rows[0].alpha
        hs = [r.h_d for r in rows]
        assert all(h >= alpha - 1e-12 for h in hs)
        assert all(b <= a + 1e-12 for a, b in zip(hs, hs[1:]))
        assert hs[-1] - alpha < 0.1 * alpha

        base = F.build_dumbbell(fig8, None, fig8, None, 1.0)
        alpha1 = alpha + 0.05
        C = F.factor_constant(base, alpha1, 6.0)
        for d, t in itertools.product((0.6, 0.75, 1.0, 2.0, 4.0), (1.0, 2.5, 4.0, 5.5)):
            md = F.DumbbellModel(base.f1, base.f2, d, base.lam, alpha)
            assert F.exact_ball_count(md, t) <= F.analytic_ball_bound(md, t, alpha1, C)


def _fundamental(X):
    return cx.check_pseudomanifold(X).fundamental_cycle


@pytest.mark.acceptance(5, "l1 norms, certificates, boundary bound, homogeneity, triangle inequality")
def test_l1_suite():
    with time_limit(60.0):
        for make, value in ((cx.torus, 2), (cx.genus2, 6), (cx.pillow, 2)):
            X = make()
            p = L.NormProblem(X, _fundamental(X))
            r = L.l1_lp(p)
            assert r.value == value
            assert L.dual_certificate_check(r, p, strict=True)
        T = cx.torus()
        assert L.l1_ilp(L.NormProblem(T, _fundamental(T), "int")).value == 2

        rng = np.random.default_rng(5)
        spaces = [cx.torus(), cx.pillow(), cx.genus2(), cx.standard_simplex(3),
                  cx.cone(cx.genus2()), cx.barycentric_subdivide(cx.torus())]
        tried = 0
        while tried < 1000:
            X = spaces[tried % len(spaces)]
            k = int(rng.integers(1, X.dim + 1))
            z = random_chain(rng, X, k)
            m = k - 1
            assert cx.boundary(z, X).l1() <= (m + 2) * z.l1()
            tried += 1

        z = _fundamental(T)
        base = L.l1_lp(L.NormProblem(T, z)).value
        for k in (3, Fraction(2, 5), Fraction(-9, 4)):
            assert L.l1_lp(L.NormProblem(T, z.scale(k))).value == abs(k) * base
        G2 = cx.genus2()
        basis = cx.homology_rank(G2, 1)[1]
        norm = lambda c: L.l1_lp(L.NormProblem(G2, c)).value  # noqa: E731
        for a, b in itertools.combinations(basis, 2):
            assert norm(a + b) <= norm(a) + norm(b)
            assert norm(a.scale(2) - b) <= 2 * norm(a) + norm(b)


@pytest.mark.acceptance(6, "permutahedron counts and volumes, Tomei complex invariants")
def test_permutahedron_and_tomei():
    with time_limit(30.0):
        for m in (1, 2, 3, 4):
            poly = P.build_permutahedron(m)
            assert len(poly.vertices) == math.factorial(m + 1)
            assert len(poly.facets) == 2 ** (m + 1) - 2
        for m, v in ((1, math.sqrt(2)), (2, 3 * math.sqrt(3)), (3, 32.0)):
            assert abs(P.permutahedron_volume(m) - v) <= 1e-9
        for m, chi in ((1, 0), (2, -2), (3, 0)):
            T = P.build_tomei(m)
            assert T.euler_characteristic() == chi
            assert T.dual.number_of_nodes() == 2 ** m
            assert {deg for _, deg in T.dual.degree()} == {2 ** (m + 1) - 2}
        assert abs(P.tomei_volume(2) - 12 * math.sqrt(3)) <= 1e-9


@pytest.mark.acceptance(7, "constant pipeline is deterministic with exact factor ratio")
def test_constants_pipeline():
    with time_limit(120.0):
        a = P.constants_report(2, t_max=30.0)
        b = P.constants_report(2, t_max=30.0)
        code = ("from volentropy import permutahedron as P; "
                "print(P.constants_report(2, t_max=30.0).rows())")
        fresh = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                               check=True).stdout.strip()
    assert a.rows() == b.rows()
    assert fresh == str(a.rows())
    assert 0 < a.c_prime < math.inf
    assert a.factor_ratio == Fraction(math.factorial(2), math.factorial(3)) ** 3


@pytest.mark.acceptance(8, "systoles of SL2(Z/p) kernels in F2")
def test_systolic_growth():
    with time_limit(180.0):
        scan = S.sigma_scan_multiples(S.MarkedGroup(2),
                                      [S.sl2_mod(p) for p in (3, 5, 7, 11, 13)])
    assert scan.rows[0][0] == 24 and scan.rows[0][1] == 3
    assert scan.nondecreasing()
    assert scan.fit_c > 0
    assert scan.ratio_spread() <= 3


@pytest.mark.acceptance(9, "Fekete and stabilized-seminorm estimators")
def test_stabilization_estimators():
    with time_limit(1.0):
        circle = cx.circle()
        # every multiple of the circle class is carried by the one-edge loop
        samples = [(n, L.kappa_of_cycle(circle)) for n in range(1, 13)]
        seq = L.fekete_estimate(samples)
        assert seq.estimate == Fraction(1, 12)
        assert seq.ratios == [Fraction(1, n) for n in range(1, 13)]
        short = L.fekete_estimate(samples[:6]).estimate
        assert seq.estimate < short
        ks = range(2, 200)
        rho = [(k, k / math.log(k) ** 2) for k in ks]
        assert abs(S.stabilized_seminorm(rho, m=2) - 1.0) <= 1e-12


@pytest.mark.acceptance(10, "verify all is byte-for-byte reproducible and exits 0")
def test_verify_all_deterministic(tmp_path, capsys):
    outs = [tmp_path / "run1", tmp_path / "run2"]
    for out in outs:
        assert main(["--seed", "0", "--out", str(out), "verify", "all"]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in outs[0].glob("*.csv"))
    assert names and names == sorted(p.name for p in outs[1].glob("*.csv"))
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
