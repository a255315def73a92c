from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volentropy import complex as cx

SMALL = {
    "circle": cx.circle, "torus": cx.torus, "pillow": cx.pillow, "rp2": cx.projective_plane,
    "genus2": cx.genus2, "simplex3": lambda: cx.standard_simplex(3),
    "cone_torus": lambda: cx.cone(cx.torus()),
}


def float_betti(X):
    """Betti numbers from numpy ranks of the boundary matrices."""
    ranks = [0]
    for k in range(1, X.dim + 1):
        D = np.array(cx.boundary_matrix(X, k), dtype=float).reshape(X.count(k - 1), X.count(k))
        ranks.append(int(np.linalg.matrix_rank(D)) if D.size else 0)
    ranks.append(0)
    return [X.count(k) - ranks[k] - ranks[k + 1] for k in range(X.dim + 1)]


def test_parse_round_trip():
    X = cx.torus()
    Y = cx.parse_complex(cx.format_complex(X))
    assert Y.faces == X.faces and Y.names == X.names


@pytest.mark.parametrize("text", [
    "simplex 1 a : v v\n",                       # unknown vertex
    "vertex v\nsimplex 1 a : v\n",               # wrong face count
    "vertex v\nvertex v\n",                      # duplicate id
    "vertex v\nbogus\n",
    "dim 1\nvertex v\nsimplex 1 a : v v\nsimplex 2 T : a a a\n",
])
def test_parse_rejects(text):
    with pytest.raises(cx.ComplexError):
        cx.parse_complex(text)


def test_face_identity_violation_rejected():
    # the triangle's edges do not close up: a goes v->w but b ends at v twice
    text = ("vertex v\nvertex w\nsimplex 1 a : w v\nsimplex 1 b : v v\n"
            "simplex 2 T : a b b\n")
    with pytest.raises(cx.ComplexError):
        cx.parse_complex(text)


@pytest.mark.parametrize("name,betti", [
    ("circle", [1, 1]), ("torus", [1, 2, 1]), ("pillow", [1, 0, 1]), ("rp2", [1, 0, 0]),
    ("genus2", [1, 4, 1]), ("simplex3", [1, 0, 0, 0]), ("cone_torus", [1, 0, 0, 0]),
])
def test_betti_numbers(name, betti):
    X = SMALL[name]()
    assert cx.betti_numbers(X) == betti
    assert float_betti(X) == betti
    assert cx.euler_characteristic(X) == sum((-1) ** k * b for k, b in enumerate(betti))


def test_homology_basis_are_cycles():
    X = cx.genus2()
    b, basis = cx.homology_rank(X, 1)
    assert b == len(basis) == 4
    assert all(cx.boundary(z, X).is_zero() for z in basis)


@pytest.mark.parametrize("name,orientable", [
    ("torus", True), ("pillow", True), ("genus2", True), ("circle", True), ("rp2", False),
])
def test_pseudomanifold_orientation(name, orientable):
    X = SMALL[name]()
    rep = cx.check_pseudomanifold(X)
    assert rep.is_pseudomanifold and not rep.failures
    assert rep.orientable == orientable == cx.orientation_double_check(X)
    if orientable:
        z = rep.fundamental_cycle
        assert cx.boundary(z, X).is_zero()
        assert all(abs(v) == 1 for v in z.coeffs.values())
        assert len(z.coeffs) == X.count(X.dim)
    assert (cx.homology_rank(X, X.dim)[0] == 1) == orientable


def test_non_pseudomanifold_reports_failure():
    # a lone triangle: each edge bounds only one top simplex
    X = cx.standard_simplex(2)
    rep = cx.check_pseudomanifold(X)
    assert not rep.is_pseudomanifold and rep.failures


@pytest.mark.parametrize("name,m", [("circle", 1), ("torus", 2), ("simplex3", 3)])
def test_barycentric_subdivision(name, m):
    X = SMALL[name]()
    S = cx.barycentric_subdivide(X)
    factor = 1
    for j in range(2, m + 2):
        factor *= j
    assert S.count(m) == factor * X.count(m)
    assert cx.betti_numbers(S) == cx.betti_numbers(X)


def test_single_edge_and_triangle_subdivision():
    assert cx.barycentric_subdivide(cx.standard_simplex(1)).count(1) == 2
    assert cx.barycentric_subdivide(cx.standard_simplex(2)).count(2) == 6


def test_wedges():
    f8 = cx.wedge(cx.circle(), 0, cx.circle(), 0)
    assert f8.counts() == [1, 2]
    r3 = cx.wedge(f8, 0, cx.circle(), 0)
    assert cx.betti_numbers(r3) == cx.betti_numbers(cx.rose(3)) == [1, 3]
    tt = cx.wedge(cx.torus(), 0, cx.torus(), 0)
    assert cx.betti_numbers(tt)[1] == 4
    with pytest.raises(cx.ComplexError):
        cx.wedge(cx.circle(), 3, cx.circle(), 0)


def test_components_and_restrict():
    U = cx.disjoint_union(cx.torus(), cx.circle())
    comps = cx.components(U)
    assert len(comps) == 2
    parts = [cx.restrict(U, c) for c in comps]
    assert sorted(p.counts() for p in parts) == [[1, 1], [1, 3, 2]]


# --------------------------------------------------------- chain properties

COMPLEXES = [f() for f in SMALL.values()] + [cx.barycentric_subdivide(cx.torus())]


@st.composite
def chains(draw):
    X = draw(st.sampled_from(COMPLEXES))
    k = draw(st.integers(1, X.dim))
    n = X.count(k)
    idx = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=6, unique=True))
    vals = draw(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=7),
                         min_size=len(idx), max_size=len(idx)))
    return X, cx.Chain(k, dict(zip(idx, vals)))


@settings(max_examples=1000, deadline=None)
@given(chains())
def test_boundary_squared_is_zero(xc):
    X, z = xc
    bz = cx.boundary(z, X)
    if z.degree >= 2:
        assert cx.boundary(bz, X).is_zero()
    assert bz.l1() <= (z.degree + 1) * z.l1()


@settings(max_examples=200, deadline=None)
@given(chains(), st.fractions(min_value=-5, max_value=5, max_denominator=5))
def test_boundary_is_linear(xc, k):
    X, z = xc
    assert cx.boundary(z.scale(k), X) == cx.boundary(z, X).scale(k)
    assert cx.boundary(z + z, X) == cx.boundary(z, X).scale(2)


def test_boundary_matches_dense_matrix():
    X = cx.genus2()
    D = cx.boundary_matrix(X, 2)
    z = cx.Chain(2, {0: Fraction(3), 4: Fraction(-1, 2)})
    dense = [sum(D[i][j] * v for j, v in z.coeffs.items()) for i in range(X.count(1))]
    assert cx.boundary(z, X).dense(X.count(1)) == dense
