import math

import numpy as np
import pytest

from volentropy import freeproduct as F
from volentropy import graph as G


def cyclic_factor(k, length=1.0):
    spec = G.CoverSpec.finite(k, {"a": "(" + " ".join(map(str, range(k))) + ")"})
    return G.circle(length), spec


def cyclic_model(k1, k2, d):
    G1, s1 = cyclic_factor(k1)
    G2, s2 = cyclic_factor(k2)
    return F.build_dumbbell(G1, s1, G2, s2, d, balance=False)


def rot(k, j):
    """The element of Z/k acting on sheets as i -> i + j."""
    return tuple((i + j) % k for i in range(k))


# ------------------------------------------------------------ normal forms

S = np.array([[0, -1], [1, 0]], dtype=object)
T = np.array([[0, -1], [1, 1]], dtype=object)
S_INV = np.array([[0, 1], [-1, 0]], dtype=object)
GEN = {1: T, 2: S.dot(T).dot(S_INV)}  # two order-3 elements of PSL2(Z) generating Z3 * Z3


def to_matrix(letters):
    M = np.identity(2, dtype=object)
    for i, g in letters:
        for _ in range(g[0]):
            M = M.dot(GEN[i])
    return M


def same_in_psl2(A, B):
    return (A == B).all() or (A == -B).all()


def test_z3z3_normal_form_matches_psl2_matrices():
    model = cyclic_model(3, 3, 1.0)
    rng = np.random.default_rng(0)
    forms = {}
    for _ in range(400):
        n = int(rng.integers(0, 9))
        word = [(int(rng.integers(1, 3)), rot(3, int(rng.integers(0, 3)))) for _ in range(n)]
        nf = F.normal_form(word, model.factors)
        assert same_in_psl2(to_matrix(word), to_matrix(nf.letters))
        assert all(a[0] != b[0] for a, b in zip(nf.letters, nf.letters[1:]))
        forms[nf.key()] = to_matrix(nf.letters)
    keys = list(forms)
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            assert not same_in_psl2(forms[keys[i]], forms[keys[j]])


def rewrite_reduce(word):
    """Z4 * Z2 presented by a^4 = b^2 = 1: delete relators until none remain."""
    changed = True
    while changed:
        changed = False
        for rel in ("aaaa", "bb"):
            if rel in word:
                word = word.replace(rel, "", 1)
                changed = True
    return word


def test_z4z2_normal_form_matches_string_rewriting():
    model = cyclic_model(4, 2, 1.0)
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(0, 9))
        word, text = [], ""
        for _ in range(n):
            if rng.random() < 0.5:
                j = int(rng.integers(0, 4))
                word.append((1, rot(4, j)))
                text += "a" * j
            else:
                word.append((2, rot(2, 1)))
                text += "b"
        nf = F.normal_form(word, model.factors)
        out = "".join(("a" * g[0]) if i == 1 else "b" for i, g in nf.letters)
        assert out == rewrite_reduce(text)


def test_normal_form_examples_and_errors():
    model = cyclic_model(3, 3, 1.0)
    a = rot(3, 1)
    a_inv = rot(3, 2)
    assert F.normal_form([(1, a), (1, a_inv)], model.factors).letters == []
    nf = F.normal_form([(1, a), (2, a), (2, a)], model.factors)
    assert nf.letters == [(1, a), (2, rot(3, 2))] and nf.length == 2
    with pytest.raises(F.FactorError):
        F.normal_form([(3, a)], model.factors)
    with pytest.raises(F.FactorError):
        F.normal_form([(1, (0, 1))], model.factors)


# ----------------------------------------------------------------- distances

def test_orbit_distance_examples():
    model = cyclic_model(3, 3, 1.0)
    a = rot(3, 1)
    assert F.orbit_distance(F.NormalForm([]), model) == 0
    assert F.orbit_distance(F.NormalForm([(1, a)]), model) == pytest.approx(3.0)
    assert F.orbit_distance(F.NormalForm([(1, a), (2, a)]), model) == pytest.approx(6.0)


def test_distance_formula_equals_assembled_cover_z3z3():
    model = cyclic_model(3, 3, 1.0)
    R = 6 * (2 * model.d + 1.0)
    D = F.assembled_cover_distances(model, R)
    for word, dist in D.items():
        assert F.orbit_distance(F.NormalForm(list(word)), model) == pytest.approx(dist)
    assert len(D) == F.exact_ball_count(model, R)


def test_distance_formula_equals_assembled_cover_figure8_pair():
    f8 = G.figure_eight()
    model = F.build_dumbbell(f8, None, f8, None, 1.0, balance=False)
    D = F.assembled_cover_distances(model, 6.0)
    for word, dist in D.items():
        assert F.orbit_distance(F.NormalForm(list(word)), model) == pytest.approx(dist)
    assert len(D) == F.exact_ball_count(model, 6.0)


# ------------------------------------------------------------------ counting

def test_ball_count_examples():
    model = cyclic_model(3, 3, 1.0)
    assert F.exact_ball_count(model, 3) == 5
    assert F.exact_ball_count(model, 2.9) == 1
    f8 = G.figure_eight()
    m8 = F.build_dumbbell(f8, None, f8, None, 2.0)
    rmin = min(min(f.spectrum) for f in m8.factors)
    assert F.exact_ball_count(m8, 2 * m8.d + rmin - 1e-6) == 1


def test_z3z3_closed_form_and_slope():
    for d in (1, 2, 4, 8):
        h = F.dumbbell_entropy_exact(cyclic_model(3, 3, d))
        assert abs(h - math.log(2) / (1 + 2 * d)) <= 1e-9
    lo, slope, hi = F.ball_growth_bracket(cyclic_model(3, 3, 1.0), 40.0, 0.25)
    h = math.log(2) / 3
    assert lo - 1e-12 <= h <= hi
    assert slope == pytest.approx(h, rel=0.05)


def test_z2z2_has_zero_entropy():
    assert F.dumbbell_entropy_exact(cyclic_model(2, 2, 1.0)) == 0.0
    # infinite dihedral group: ball counts grow linearly
    m = cyclic_model(2, 2, 1.0)
    assert F.exact_ball_count(m, 30) - F.exact_ball_count(m, 15) <= F.exact_ball_count(m, 15) + 1


def test_swap_symmetry():
    m = cyclic_model(4, 3, 1.5)
    sw = m.swapped()
    for t in (5, 10, 20):
        assert F.exact_ball_count(m, t) == F.exact_ball_count(sw, t)
    assert F.dumbbell_entropy_exact(m) == pytest.approx(F.dumbbell_entropy_exact(sw), abs=1e-12)


def test_analytic_bound_dominates_counts():
    m = cyclic_model(3, 3, 1.0)
    alpha1 = 0.05
    C = F.factor_constant(m, alpha1, 20.0)
    assert F.analytic_ball_bound(m, 0.0, alpha1, C) >= 1
    for t in (5, 10, 20):
        assert F.exact_ball_count(m, t) <= F.analytic_ball_bound(m, t, alpha1, C)
    with pytest.raises(ValueError):
        F.analytic_ball_bound(cyclic_model(3, 3, 0.5), 5.0, alpha1, C)


# ----------------------------------------------------------------- balancing

def test_balance_scalings_examples():
    f8 = F.build_factor(G.figure_eight())
    lam1, lam2, alpha = F.balance_scalings(f8, f8)
    assert lam1 == pytest.approx(0.25) and lam1 == lam2
    assert alpha == pytest.approx(4 * math.log(3), abs=1e-9)
    r3 = F.build_factor(G.rose(3))
    _, _, alpha = F.balance_scalings(f8, r3)
    assert alpha == pytest.approx(2 * math.log(3) + 3 * math.log(5), abs=1e-9)
    with pytest.raises(ValueError):
        F.balance_scalings(F.build_factor(G.circle()), f8)


def test_factor_poincare_series():
    # figure-8 universal cover: F(h) = sum_n 4*3^(n-1) e^{-hn} = 4 e^{-h} / (1 - 3 e^{-h})
    f = F.build_factor(G.figure_eight())
    for h in (1.5, 2.0, 3.0):
        x = math.exp(-h)
        assert f.poincare(h) == pytest.approx(4 * x / (1 - 3 * x), rel=1e-9)
    assert f.poincare(1.0) == math.inf
    z3 = F.build_factor(*cyclic_factor(3))
    assert z3.poincare(0.7) == pytest.approx(2 * math.exp(-0.7))


def test_free_factor_spec_rejected():
    with pytest.raises(F.FactorError):
        F.build_factor(G.figure_eight(), G.CoverSpec.free(1, {"a": "x1", "b": "1"}))


def test_additivity_report_figure8_pair():
    f8 = G.figure_eight()
    rows = F.additivity_report(f8, None, f8, None, [1, 2, 4, 8, 16], ball_ts=(2.0, 4.0))
    alpha = rows[0].alpha
    assert all(r.alpha == alpha for r in rows)
    assert all(r.h_d >= alpha - 1e-12 for r in rows)
    assert all(b.h_d <= a.h_d + 1e-12 for a, b in zip(rows, rows[1:]))
    assert rows[-1].h_d - alpha < 0.1 * alpha
    assert F.report_consistent(rows)
    assert [t for t, _ in rows[0].ball_counts] == [2.0, 4.0]


def test_sandwich_past_threshold():
    f8 = G.figure_eight()
    model = F.build_dumbbell(f8, None, f8, None, 1.0)
    alpha = model.alpha
    alpha1 = alpha + 0.05
    C = F.factor_constant(model, alpha1, 6.0)
    checked = 0
    for d in (1.0, 2.0, 4.0, 8.0):
        md = F.DumbbellModel(model.f1, model.f2, d, model.lam, alpha)
        if C * d * math.exp(-alpha1 * (2 * d - 1)) < 1:
            h = F.dumbbell_entropy_exact(md)
            assert alpha - 1e-9 <= h <= alpha1 + 1 / d
            checked += 1
    assert checked >= 2


def test_circle_factors_entropy_decays():
    c = G.circle()
    rows = F.additivity_report(c, None, c, None, [1, 4, 16, 64])
    assert rows[0].alpha == 0.0
    hs = [r.h_d for r in rows]
    assert all(b < a for a, b in zip(hs, hs[1:]))
    assert hs[-1] < 0.05
