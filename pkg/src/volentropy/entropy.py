"""Volume entropy of metric graphs and their regular covers.

Two independent routes. ``entropy_perron`` finds the root of the
non-backtracking transfer operator; ``entropy_orbit_count`` literally counts
orbit points in balls of the cover and fits the exponential rate, together
with a rigorous bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import groups
from .graph import (DEFAULT_BUDGET, CoverSpec, GraphError, MetricGraph,
                    finite_cover, generator_images, image_rank, orbit_distances)

PERRON_TOL = 1e-13


@dataclass
class EntropyEstimate:
    value: float
    method: str
    horizon: float
    bracket: Tuple[float, float]
    table: List[tuple] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.value = float(self.value)
        self.bracket = (float(self.bracket[0]), float(self.bracket[1]))
        lo, hi = self.bracket
        if not lo <= self.value <= hi:
            raise ValueError(f"value {self.value} outside bracket {self.bracket}")


def _exact(h: float, method: str, horizon: float = 0.0) -> EntropyEstimate:
    return EntropyEstimate(h, method, horizon, (h, h))


# ------------------------------------------------------------ transfer root

def nb_matrix(G: MetricGraph, h: float) -> np.ndarray:
    """B(h)[d, d'] = exp(-h len(d')) when d' continues d without backtracking."""
    m = 2 * len(G.edges)
    B = np.zeros((m, m))
    w = np.array([math.exp(-h * G.dlength(d)) for d in range(m)])
    for d in range(m):
        x = G.head(d)
        for d2 in range(m):
            if G.tail(d2) == x and d2 != d ^ 1:
                B[d, d2] = w[d2]
    return B


def spectral_radius(B: np.ndarray) -> float:
    if B.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(B))))


def entropy_perron(G: MetricGraph, tol: float = PERRON_TOL) -> EntropyEstimate:
    G.require_connected()
    if G.rank() <= 1:
        return _exact(0.0, "perron", tol)
    A = nb_matrix(G, 0.0)
    lens = np.array([G.dlength(d) for d in range(A.shape[0])])

    def rho(h):
        return spectral_radius(A * np.exp(-h * lens)[None, :])

    lo = 0.0
    maxdeg = max(len(a) for a in G.adjacency())
    hi = math.log(max(maxdeg - 1, 1)) / min(lens) + 1.0
    while rho(hi) >= 1.0:
        hi *= 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid in (lo, hi):  # float spacing reached
            break
        if rho(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return EntropyEstimate((lo + hi) / 2, "perron", tol, (lo, hi))


# ------------------------------------------------------------ orbit counting

def _length_grid(lengths: Sequence[float]):
    """Integer lengths on a common grid: (step, floor lengths, ceil lengths, exact?)."""
    lmin = min(lengths)
    fr = [Fraction(l / lmin).limit_denominator(64) for l in lengths]
    if all(abs(float(f) * lmin - l) <= 1e-12 * l for f, l in zip(fr, lengths)):
        den = math.lcm(*[f.denominator for f in fr])
        step = lmin / den
        ints = [int(f * den) for f in fr]
        return step, ints, ints, True
    step = lmin / 200
    return step, [int(math.floor(l / step)) for l in lengths], \
        [int(math.ceil(l / step)) for l in lengths], False


def closed_walk_counts(G: MetricGraph, step: float, ilen: Sequence[int], horizon: float
                       ) -> np.ndarray:
    """counts[k] = number of reduced closed walks at the basepoint of grid length k."""
    m = 2 * len(G.edges)
    K = int(horizon / step + 1e-9)
    A = nb_matrix(G, 0.0)
    L = np.array([ilen[d >> 1] for d in range(m)])
    c = np.zeros((K + 1, m))
    b = G.basepoint
    for d in range(m):
        if G.tail(d) == b and L[d] <= K:
            c[L[d], d] += 1.0
    cols = np.arange(m)
    for k in range(1, K + 1):
        src = k - L
        ok = src >= 1
        if ok.any():
            prev = c[np.where(ok, src, 0)]  # prev[d, d'] = c[k - L[d], d']
            c[k] += np.where(ok, np.einsum("ij,ji->i", prev, A), 0.0)
    heads = np.array([G.head(d) == b for d in cols])
    out = c[:, heads].sum(axis=1)
    return out


def _semigroup_lower(G: MetricGraph, step: float, ilen: Sequence[int], horizon: float
                     ) -> float:
    """Lower bound from a free sub-semigroup of first-return loops.

    For a directed edge f leaving the basepoint, loops that start with f, never
    use f again, and do not end with its reverse concatenate freely into reduced
    walks; the root of sum exp(-h |c|) = 1 over any finite set of them bounds the
    entropy from below.
    """
    m = 2 * len(G.edges)
    K = int(horizon / step + 1e-9)
    A = nb_matrix(G, 0.0)
    L = np.array([ilen[d >> 1] for d in range(m)])
    b = G.basepoint
    best = 0.0
    for f in range(m):
        if G.tail(f) != b or L[f] > K:
            continue
        Af = A.copy()
        Af[:, f] = 0.0
        c = np.zeros((K + 1, m))
        c[L[f], f] = 1.0
        for k in range(L[f] + 1, K + 1):
            src = k - L
            ok = src >= 1
            prev = c[np.where(ok, src, 0)]
            c[k] += np.where(ok, np.einsum("ij,ji->i", prev, Af), 0.0)
        ends = [d for d in range(m) if G.head(d) == b and d != f ^ 1]
        n = c[:, ends].sum(axis=1)
        ks = np.nonzero(n)[0]
        if len(ks) == 0:
            continue
        n, ks = n[ks], ks * step
        if n.sum() <= 1.0:
            continue
        lo, hi = 0.0, math.log(n.sum()) / ks.min() + 1.0
        for _ in range(100):
            mid = (lo + hi) / 2
            if float(np.sum(n * np.exp(-mid * ks))) > 1.0:
                lo = mid
            else:
                hi = mid
        best = max(best, lo)
    return best


def _upper_from_counts(cum: np.ndarray, xs: np.ndarray, D: float) -> float:
    """min over x of log N(x + 2D) / x; valid since x -> N(x + 2D) is submultiplicative.

    N(x + 2D) is read at the first grid point at or beyond x + 2D, which can only
    overestimate it.
    """
    j = np.searchsorted(xs, xs + 2 * D - 1e-12)
    ok = (xs > 0) & (j < len(xs))
    if not ok.any():
        return math.inf
    vals = np.log(np.maximum(cum[j[ok]], 1.0)) / xs[ok]
    return float(vals.min())


def _fit(xs: np.ndarray, cum: np.ndarray, t_max: float) -> Tuple[float, List[tuple]]:
    sel = (xs >= t_max / 2) & (cum > 0)
    slope = 0.0
    if sel.sum() >= 2:
        slope = float(np.polyfit(xs[sel], np.log(cum[sel]), 1)[0])
    table = []
    for x, n in zip(xs, cum):
        if n > 0:
            table.append((float(x), float(n), math.log(n), slope))
    return max(slope, 0.0), table


def _tree_orbit_count(G: MetricGraph, t_max: float) -> EntropyEstimate:
    step, fl, cl, exact = _length_grid([e.length for e in G.edges])
    D = G.covering_radius()
    counts_up = closed_walk_counts(G, step, fl, t_max)
    cum_up = np.cumsum(counts_up) + 1.0
    xs = np.arange(len(cum_up)) * step
    if exact:
        cum_mid = cum_up
    else:
        cum_mid = (cum_up + np.cumsum(closed_walk_counts(G, step, cl, t_max)) + 1.0) / 2
    slope, table = _fit(xs, cum_mid, t_max)
    upper = _upper_from_counts(cum_up, xs, D)
    lower = _semigroup_lower(G, step, cl, t_max)
    value = min(max(slope, lower), upper)
    return EntropyEstimate(value, "orbit-count", t_max, (lower, upper), table)


def _lazy_orbit_count(G: MetricGraph, spec: CoverSpec, t_max: float, budget: int,
                      lower: float) -> EntropyEstimate:
    dists = np.array(sorted(orbit_distances(G, spec, t_max, budget=budget).values()))
    step = min(e.length for e in G.edges) / 50
    xs = np.arange(0.0, t_max + 1e-12, step)
    cum = np.searchsorted(dists, xs + 1e-12, side="right").astype(float)
    slope, table = _fit(xs, cum, t_max)
    upper = _upper_from_counts(cum, xs, G.covering_radius())
    value = min(max(slope, lower), upper)
    return EntropyEstimate(value, "orbit-count", t_max, (lower, upper), table)


def _free_pair_lower(G: MetricGraph, spec: CoverSpec) -> float:
    """log 3 / L when two generator images span a rank-2 free subgroup (displacements <= L)."""
    _, imgs = generator_images(G, spec)
    walks = G.generator_walks()
    wl = [sum(G.dlength(d) for d in w) for w in walks]
    best = 0.0
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            if groups.subgroup_rank([imgs[i], imgs[j]]) == 2:
                best = max(best, math.log(3) / max(wl[i], wl[j]))
    return best


def entropy_orbit_count(G: MetricGraph, spec: Optional[CoverSpec] = None, t_max: float = 25.0,
                        budget: int = DEFAULT_BUDGET) -> EntropyEstimate:
    G.require_connected()
    spec = spec or CoverSpec.trivial()
    lmax = max(e.length for e in G.edges) if G.edges else 1.0
    if t_max < 5 * lmax:
        raise GraphError("horizon must be at least 5 times the longest edge")
    if spec.kind == "finite":
        finite_cover(G, spec) if G.edges else None
        return _exact(0.0, "orbit-count", t_max)
    if spec.kind == "free":
        j = image_rank(G, spec)
        if j <= 1:
            return _exact(0.0, "orbit-count", t_max)
        if j < G.rank():
            return _lazy_orbit_count(G, spec, t_max, budget, _free_pair_lower(G, spec))
    if G.rank() <= 1:
        return _exact(0.0, "orbit-count", t_max)
    return _tree_orbit_count(G, t_max)


# --------------------------------------------------------- dispatch, omega

def entropy_relative(G: MetricGraph, spec: Optional[CoverSpec] = None, t_max: float = 25.0,
                     budget: int = DEFAULT_BUDGET) -> EntropyEstimate:
    spec = spec or CoverSpec.trivial()
    if spec.kind == "finite":
        G.require_connected()
        return _exact(0.0, "perron")
    if spec.kind == "free":
        j = image_rank(G, spec)
        if j <= 1:
            return _exact(0.0, "perron")
        if j < G.rank():
            return entropy_orbit_count(G, spec, max(t_max, 5 * max(G.lengths)), budget)
    return entropy_perron(G)


def omega_value(G: MetricGraph, spec: Optional[CoverSpec] = None) -> float:
    return entropy_relative(G, spec).value * G.total_length()


def minimize_omega_lengths(G: MetricGraph, total_length: float = 1.0, seed: int = 0,
                           step: float = 0.1, min_step: float = 1e-6
                           ) -> Tuple[List[float], float]:
    """Coordinate descent on edge lengths with the total length held fixed."""
    n = len(G.edges)
    if G.rank() <= 1:
        return [total_length / n] * n, 0.0
    rng = np.random.default_rng(seed)

    def omega(x):
        return entropy_perron(G.with_lengths(x)).value * total_length

    x = np.full(n, total_length / n)
    best = omega(x)
    while step > min_step:
        improved = False
        for i in rng.permutation(n):
            for sgn in (1.0, -1.0):
                y = x.copy()
                y[i] *= 1 + sgn * step
                y *= total_length / y.sum()
                if y.min() <= 0:
                    continue
                val = omega(y)
                if val < best - 1e-13:
                    x, best, improved = y, val, True
        if not improved:
            step /= 2
    return [float(v) for v in x], float(best)
