import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from volentropy import permutahedron as P


def stirling2(n, k):
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_counts_and_f_vector(m):
    poly = P.build_permutahedron(m)
    n = m + 1
    assert len(poly.vertices) == math.factorial(n)
    assert len(poly.facets) == 2 ** n - 2
    assert poly.is_simple()
    # k-faces correspond to ordered partitions of {0..m} into m+1-k blocks
    expect = [math.factorial(n - k) * stirling2(n, n - k) for k in range(m + 1)]
    assert poly.f_vector() == expect


@pytest.mark.parametrize("m", [1, 2, 3])
def test_truncation_equivalence(m):
    assert P.truncation_equivalence(m)


def test_face_chains_are_nested():
    poly = P.build_permutahedron(3)
    for vset, fs in poly.faces.items():
        chain = poly.chain(fs)
        assert all(a < b for a, b in zip(chain, chain[1:]))


def shoelace_hexagon_area():
    """Area of the m = 2 permutahedron in its own plane."""
    pts = np.array(list(itertools.permutations((1, 2, 3))), dtype=float)
    c = pts.mean(axis=0)
    u = np.array([1, -1, 0]) / math.sqrt(2)
    v = np.array([1, 1, -2]) / math.sqrt(6)
    xy = np.array([[(p - c) @ u, (p - c) @ v] for p in pts])
    order = np.argsort(np.arctan2(xy[:, 1], xy[:, 0]))
    x, y = xy[order, 0], xy[order, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, 1)) - np.dot(y, np.roll(x, 1)))


def test_volumes():
    assert abs(P.permutahedron_volume(1) - math.sqrt(2)) <= 1e-9
    assert abs(P.permutahedron_volume(2) - 3 * math.sqrt(3)) <= 1e-9
    assert abs(P.permutahedron_volume(3) - 32) <= 1e-9
    assert P.permutahedron_volume(2) == pytest.approx(shoelace_hexagon_area(), abs=1e-12)
    for m in (1, 2, 3):
        assert P.permutahedron_volume(m) == pytest.approx(P.permutahedron_volume_closed_form(m))


def test_exact_scaled_volume():
    # the fan sum gives vol * sqrt(m+1) exactly, which is (m+1)^m
    for m in (1, 2, 3):
        assert P.permutahedron_volume_exact(m) == (m + 1) ** m


def tomei_cell_classes(m):
    """Count k-cells of the Tomei tiling by merging copies across facet gluings."""
    poly = P.build_permutahedron(m)
    cells = list(itertools.product((0, 1), repeat=m))
    counts = [0] * (m + 1)
    for vset, fs in poly.faces.items():
        parent = {s: s for s in cells}

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for j in fs:
            i = len(poly.facets[j])
            for s in cells:
                t = P.flip(s, i)
                parent[find(s)] = find(t)
        counts[poly.face_dim(fs)] += len({find(s) for s in cells})
    return counts


@pytest.mark.parametrize("m,chi", [(1, 0), (2, -2), (3, 0)])
def test_tomei_complex(m, chi):
    T = P.build_tomei(m)
    assert len(T.cells) == 2 ** m
    assert T.cell_counts == tomei_cell_classes(m)
    assert T.euler_characteristic() == chi
    degrees = {d for _, d in T.dual.degree()}
    assert degrees == {2 ** (m + 1) - 2}
    assert T.dual.number_of_nodes() == 2 ** m
    # every facet of every cell is glued to exactly one other cell facet
    for key, val in T.gluing.items():
        assert T.gluing[val] == key and val != key


def test_tomei_volume_and_skeleton():
    assert abs(P.tomei_volume(2) - 12 * math.sqrt(3)) <= 1e-9
    T = P.build_tomei(2)
    assert all(e.length == pytest.approx(math.sqrt(2)) for e in T.skeleton.edges)
    assert len(T.skeleton.edges) == 2 * T.poly.f_vector()[1]


def test_skeleton_entropy_m2():
    # the skeleton is a 6-cycle with doubled edges, i.e. 4-regular: ent = log 3 / sqrt 2
    est = P.tomei_entropy_estimate(2, 30.0)
    lo, hi = est.bracket
    assert lo <= math.log(3) / math.sqrt(2) <= hi


def test_constants_report():
    a = P.constants_report(2, 30.0)
    b = P.constants_report(2, 30.0)
    assert a.rows() == b.rows()
    assert 0 < a.c_prime < math.inf
    assert a.factor_ratio == Fraction(math.factorial(2), math.factorial(3)) ** 3
    assert a.c_literal / a.c_measured == pytest.approx(float(a.factor_ratio))
    assert [r[0] for r in a.rows()][0] == "m"


def test_m_out_of_range():
    with pytest.raises(ValueError):
        P.build_permutahedron(0)
    with pytest.raises(ValueError):
        P.build_tomei(5)
    with pytest.raises(ValueError):
        P.constants_report(4)


# --------------------------------------------------------------------- Theta

def test_theta_special_points():
    th = P.ThetaMap(2)
    assert th([2, 2, 2]) == pytest.approx([1 / 3] * 3)
    for v in th.P.vertices:
        img = th(v)
        i = int(np.argmax(v))
        assert img == pytest.approx(np.eye(3)[i])
    with pytest.raises(ValueError):
        th([3, 3, 0])


def random_interior_point(rng, m):
    verts = np.array(list(itertools.permutations(range(1, m + 2))), dtype=float)
    w = rng.dirichlet(np.ones(len(verts)))
    return w @ verts


def test_theta_lands_in_simplex_and_separates_samples():
    rng = np.random.default_rng(2)
    th = P.ThetaMap(2)
    imgs = []
    for _ in range(60):
        y = th(random_interior_point(rng, 2))
        assert y.min() >= -1e-9 and abs(y.sum() - 1) <= 1e-9
        imgs.append(y)
    for a, b in itertools.combinations(imgs, 2):
        assert np.abs(a - b).max() > 1e-12


def test_theta_is_continuous_across_cells():
    th = P.ThetaMap(2)
    rng = np.random.default_rng(4)
    for _ in range(40):
        x = random_interior_point(rng, 2)
        d = rng.normal(size=3)
        d -= d.mean()
        d *= 1e-7 / np.linalg.norm(d)
        assert np.abs(th(x) - th(x + d)).max() < 1e-5
