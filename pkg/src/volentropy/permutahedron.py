"""Permutahedra, the truncated-simplex picture, and the Tomei tiling.

Coordinates live in R^{m+1} on the hyperplane sum(x) = (m+1)(m+2)/2. Facets
are indexed by proper nonempty subsets w of {0..m}: F_w is where the
coordinates in w carry the |w| largest values. A face is an intersection of
facets; for this simple polytope the facets through a face form a chain of
nested subsets, and its dimension is m minus the chain length.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from . import linalg
from .entropy import EntropyEstimate, entropy_orbit_count
from .graph import Edge, MetricGraph

Subset = FrozenSet[int]
MAX_M = 5


@dataclass
class Permutahedron:
    m: int
    vertices: List[Tuple[int, ...]]
    facets: List[Subset]
    incidence: List[FrozenSet[int]]  # facet ids through each vertex
    faces: Dict[FrozenSet[int], FrozenSet[int]] = field(default_factory=dict)  # vertex set -> facet set

    def face_dim(self, facet_set: FrozenSet[int]) -> int:
        return self.m - len(facet_set)

    def faces_of_dim(self, k: int) -> List[FrozenSet[int]]:
        return [v for v, fs in self.faces.items() if self.face_dim(fs) == k]

    def f_vector(self) -> List[int]:
        return [len(self.faces_of_dim(k)) for k in range(self.m + 1)]

    def is_simple(self) -> bool:
        return all(len(fs) == self.m for fs in self.incidence)

    def barycenter(self, vset) -> List[Fraction]:
        pts = [self.vertices[i] for i in vset]
        return [Fraction(sum(c), len(pts)) for c in zip(*pts)]

    def chain(self, facet_set) -> List[Subset]:
        return sorted((self.facets[f] for f in facet_set), key=len)


def _check_m(m: int, hi: int = MAX_M) -> None:
    if not 1 <= m <= hi:
        raise ValueError(f"m must be between 1 and {hi}")


def proper_subsets(n: int) -> List[Subset]:
    out = []
    for k in range(1, n):
        out += [frozenset(c) for c in itertools.combinations(range(n), k)]
    return out


def build_permutahedron(m: int) -> Permutahedron:
    _check_m(m)
    n = m + 1
    verts = list(itertools.permutations(range(1, n + 1)))
    facets = proper_subsets(n)
    incidence = []
    for v in verts:
        inc = set()
        for j, w in enumerate(facets):
            top = sum(range(n - len(w) + 1, n + 1))
            if sum(v[i] for i in w) == top:
                inc.add(j)
        incidence.append(frozenset(inc))
    P = Permutahedron(m, verts, facets, incidence)
    P.faces = face_lattice(incidence, len(facets), m)
    return P


def face_lattice(incidence: Sequence[FrozenSet[int]], nfacets: int, m: int
                 ) -> Dict[FrozenSet[int], FrozenSet[int]]:
    """All faces as vertex sets, by closing facet vertex sets under intersection."""
    by_facet = [frozenset(i for i, inc in enumerate(incidence) if f in inc)
                for f in range(nfacets)]
    everything = frozenset(range(len(incidence)))
    faces = {everything}
    frontier = {everything}
    while frontier:
        nxt = set()
        for face in frontier:
            for fv in by_facet:
                g = face & fv
                if g and g not in faces:
                    faces.add(g)
                    nxt.add(g)
        frontier = nxt
    out = {}
    for face in faces:
        common = frozenset.intersection(*(incidence[i] for i in face))
        out[face] = common
    return out


# ------------------------------------------------------------- truncation

def truncated_simplex_vertices(m: int) -> List[Tuple[Tuple[Fraction, ...], FrozenSet[int]]]:
    """Vertices of the simplex cut by sum_{i in w} x_i <= 1 - 4^-|w|, with their tight cuts."""
    n = m + 1
    cuts = proper_subsets(n)
    levels = [1 - Fraction(1, 4 ** len(w)) for w in cuts]
    out = {}
    for combo in itertools.combinations(range(len(cuts)), m):
        A = [[Fraction(1)] * n] + [[Fraction(int(i in cuts[j])) for i in range(n)] for j in combo]
        b = [Fraction(1)] + [levels[j] for j in combo]
        if linalg.rank(A) < n:
            continue
        x = linalg.solve(A, b)
        if x is None or any(v < 0 for v in x):
            continue
        sums = [sum(x[i] for i in w) for w in cuts]
        if any(s > lv for s, lv in zip(sums, levels)):
            continue
        tight = frozenset(j for j, (s, lv) in enumerate(zip(sums, levels)) if s == lv)
        out[tuple(x)] = tight
    return list(out.items())


def _incidence_graph(incidence: Sequence[FrozenSet[int]]) -> nx.Graph:
    g = nx.Graph()
    for i, inc in enumerate(incidence):
        g.add_node(("v", i), side=0)
        for f in inc:
            g.add_node(("f", f), side=1)
            g.add_edge(("v", i), ("f", f))
    return g


def truncation_equivalence(m: int) -> bool:
    """Truncated simplex and permutahedron have isomorphic face lattices.

    Vertex-facet incidence determines the lattice, so it suffices to match
    incidences: first with facet w of one identified with cut w of the other,
    falling back to a general bipartite isomorphism search.
    """
    _check_m(m, 3)
    P = build_permutahedron(m)
    T = truncated_simplex_vertices(m)
    t_inc = sorted(inc for _, inc in T)
    if t_inc == sorted(P.incidence):
        return True
    return nx.is_isomorphic(_incidence_graph(P.incidence), _incidence_graph(t_inc),
                            node_match=lambda a, b: a["side"] == b["side"])


# ------------------------------------------------------------------ volume

def flags(P: Permutahedron) -> List[List[FrozenSet[int]]]:
    """Maximal chains vertex < edge < ... < (m-1)-face, as vertex sets."""
    by_dim: Dict[int, List[FrozenSet[int]]] = {}
    for vset, fs in P.faces.items():
        by_dim.setdefault(P.face_dim(fs), []).append(vset)
    chains = [[f] for f in by_dim.get(0, [])]
    for k in range(1, P.m):
        chains = [c + [g] for c in chains for g in by_dim[k] if c[-1] < g]
    return chains


def permutahedron_volume_exact(m: int) -> Fraction:
    """Volume times sqrt(m+1), exactly, by the barycentric fan triangulation."""
    P = build_permutahedron(m)
    center = P.barycenter(range(len(P.vertices)))
    total = Fraction(0)
    for chain in flags(P):
        pts = [P.barycenter(f) for f in chain]
        rows = [[a - c for a, c in zip(p, center)] for p in pts]
        rows.append([Fraction(1)] * (m + 1))
        total += abs(linalg.det(rows))
    return total / math.factorial(m)


def permutahedron_volume(m: int) -> float:
    return float(permutahedron_volume_exact(m)) / math.sqrt(m + 1)


def permutahedron_volume_closed_form(m: int) -> float:
    return (m + 1) ** (m - 1) * math.sqrt(m + 1)


# ------------------------------------------------------------------- Tomei

@dataclass
class TomeiComplex:
    m: int
    poly: Permutahedron
    cells: List[Tuple[int, ...]]
    gluing: Dict[Tuple[Tuple[int, ...], int], Tuple[Tuple[int, ...], int]]
    cell_counts: List[int]
    skeleton: MetricGraph
    dual: nx.MultiGraph

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.cell_counts))


def flip(s: Tuple[int, ...], i: int) -> Tuple[int, ...]:
    """r_i: toggle coordinate i (1-based) of a sign vector."""
    return tuple(b ^ (1 if j == i - 1 else 0) for j, b in enumerate(s))


def build_tomei(m: int) -> TomeiComplex:
    """2^m permutahedra, facet (s, F_w) glued to (r_|w| s, F_w) by the identity."""
    _check_m(m, 4)
    P = build_permutahedron(m)
    cells = list(itertools.product((0, 1), repeat=m))
    gluing = {}
    for s in cells:
        for j, w in enumerate(P.facets):
            gluing[(s, j)] = (flip(s, len(w)), j)
    for key, val in gluing.items():
        if val == key or gluing[val] != key:
            raise AssertionError("facet pairing is not a fixed-point-free involution")
    # a k-face lies on m-k facets whose sizes are distinct, so its 2^m copies
    # fall into 2^k classes
    counts = [len(P.faces_of_dim(k)) * 2 ** k for k in range(m + 1)]
    edges = []
    for vset, fs in P.faces.items():
        if P.face_dim(fs) == 1:
            a, b = sorted(vset)
            length = math.dist(P.vertices[a], P.vertices[b])
            for copy in range(2):
                edges.append(Edge(f"e{a}_{b}.{copy}", a, b, length))
    skeleton = MetricGraph(len(P.vertices), edges)
    dual = nx.MultiGraph()
    dual.add_nodes_from(cells)
    for (s, j), (t, _) in gluing.items():
        if s < t:
            dual.add_edge(s, t, facet=j)
    return TomeiComplex(m, P, cells, gluing, counts, skeleton, dual)


def tomei_volume(m: int) -> float:
    return 2 ** m * permutahedron_volume(m)


def tomei_entropy_estimate(m: int, t_max: float = 30.0, scale: float = 1.0) -> EntropyEstimate:
    """Orbit-count entropy of the universal cover of the Tomei 1-skeleton."""
    T = build_tomei(m)
    return entropy_orbit_count(T.skeleton.scaled(scale), t_max=t_max)


@dataclass
class ConstantReport:
    m: int
    v_m: float
    entropy: float
    entropy_bracket: Tuple[float, float]
    c_prime: float
    c_prime_bracket: Tuple[float, float]
    c_literal: float
    c_measured: float
    factor_ratio: Fraction

    def rows(self) -> List[Tuple[str, str, str]]:
        """(quantity, value, provenance) lines."""
        return [
            ("m", str(self.m), "input"),
            ("v_m", repr(self.v_m), "barycentric fan triangulation"),
            ("ent_skeleton", repr(self.entropy), "orbit count on 1-skeleton cover"),
            ("ent_lower", repr(self.entropy_bracket[0]), "free sub-semigroup bound"),
            ("ent_upper", repr(self.entropy_bracket[1]), "submultiplicative bound"),
            ("C_prime", repr(self.c_prime), "ent^m * v_m"),
            ("C_literal", repr(self.c_literal), "(m!)^3 * C_prime"),
            ("C_measured", repr(self.c_measured), "((m+1)!)^3 * C_prime"),
            ("literal_over_measured", str(self.factor_ratio), "(m!/(m+1)!)^3"),
        ]


def constants_report(m: int, t_max: float = 30.0) -> ConstantReport:
    _check_m(m, 3)
    v = permutahedron_volume(m)
    est = tomei_entropy_estimate(m, t_max)
    h, (lo, hi) = est.value, est.bracket
    cp = h ** m * v
    lit = math.factorial(m) ** 3
    meas = math.factorial(m + 1) ** 3
    return ConstantReport(m, v, h, (lo, hi), cp, (lo ** m * v, hi ** m * v),
                          lit * cp, meas * cp, Fraction(lit, meas))


# ------------------------------------------------------------------- Theta

def in_permutahedron(m: int, x: Sequence, tol: float = 1e-9) -> bool:
    n = m + 1
    if abs(sum(x) - n * (n + 1) / 2) > tol:
        return False
    for w in proper_subsets(n):
        if sum(x[i] for i in w) > sum(range(n - len(w) + 1, n + 1)) + tol:
            return False
    return True


class ThetaMap:
    """Piecewise linear map sending the barycenter of each face to the barycenter
    of the simplex face indexed by the smallest subset in its facet chain (the
    whole simplex for the top cell)."""

    def __init__(self, m: int):
        _check_m(m, 4)
        self.m = m
        P = self.P = build_permutahedron(m)
        n = m + 1
        top = frozenset(range(len(P.vertices)))
        self.simplices = []
        for chain in flags(P):
            faces = chain + [top]
            src = np.array([[float(c) for c in P.barycenter(f)] for f in faces])
            dst = np.array([self._target(P.faces[f]) for f in faces])
            M = np.vstack([src.T, np.ones(len(faces))])
            self.simplices.append((M, dst))

    def _target(self, facet_set) -> List[float]:
        n = self.m + 1
        if not facet_set:
            return [1.0 / n] * n
        w = self.P.chain(facet_set)[0]
        return [1.0 / len(w) if i in w else 0.0 for i in range(n)]

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not in_permutahedron(self.m, x):
            raise ValueError("point is outside the permutahedron")
        rhs = np.append(x, 1.0)
        for M, dst in self.simplices:
            lam = np.linalg.lstsq(M, rhs, rcond=None)[0]
            if lam.min() >= -1e-9 and np.allclose(M @ lam, rhs, atol=1e-9):
                return lam @ dst
        raise ValueError("point not located in any cell")


def theta_map(m: int, x: Sequence[float]) -> np.ndarray:
    return ThetaMap(m)(x)
