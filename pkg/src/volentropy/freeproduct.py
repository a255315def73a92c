"""Free products of deck groups and their dumbbell metrics.

Two metric graphs K1, K2 are joined by a bridge of length 2d between their
basepoints; q is the midpoint of the bridge. The deck group of the glued cover
is G1 * G2, and an element in normal form g_1 ... g_l (alternating factors)
moves q by exactly ``2 d l + sum rho_i(g_s)``. Everything below is built on
that distance formula: ball counting by convolution of factor spectra, and the
growth rate as the root of F1(h) F2(h) exp(-4 h d) = 1 where F_i is the factor
Poincare series over nontrivial elements.
"""
from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from .entropy import _length_grid, closed_walk_counts, entropy_perron, nb_matrix
from .graph import (CoverSpec, GraphError, MetricGraph, VoltageGroup, cover_dijkstra,
                    enumerate_group, generator_images, orbit_distances, resolve_voltages)

KEY_DIGITS = 9
SPECTRUM_CAP_FACTOR = 40


def _key(x: float) -> float:
    return round(x, KEY_DIGITS)


class FactorError(ValueError):
    pass


@dataclass
class FactorModel:
    """A factor K_i with its deck group G_i acting on the cover."""

    graph: MetricGraph
    spec: CoverSpec
    grp: VoltageGroup
    entropy: float
    finite_group: Optional[set]
    spectrum: Counter = field(default_factory=Counter)
    cap: float = 0.0
    _rho: Dict[Hashable, float] = field(default_factory=dict, repr=False)

    @property
    def volume(self) -> float:
        return self.graph.total_length()

    def contains(self, g) -> bool:
        if self.finite_group is not None:
            return g in self.finite_group
        rank = self.graph.rank()
        return isinstance(g, tuple) and all(isinstance(x, int) and 0 < abs(x) <= rank for x in g)

    def rho(self, g) -> float:
        """Displacement of the basepoint lift by g."""
        if g == self.grp.identity:
            return 0.0
        if g in self._rho:
            return self._rho[g]
        target = (self.graph.basepoint, g)
        radius = max(self.cap, 1.0)
        while True:
            done = cover_dijkstra(self.graph, self.spec, radius,
                                  stop=lambda s, _: s == target)
            b = self.graph.basepoint
            for (x, h), r in done.items():
                if x == b:
                    self._rho.setdefault(h, r)
            if target in done:
                return done[target]
            radius *= 2

    def extend(self, cap: float) -> None:
        """Make the distance histogram of nontrivial elements complete up to ``cap``."""
        if cap <= self.cap:
            return
        self.spectrum = _spectrum(self, cap)
        self.cap = cap

    def ball(self, t: float) -> int:
        self.extend(t)
        return 1 + sum(n for r, n in self.spectrum.items() if r <= t + 1e-9)

    def poincare(self, h: float) -> float:
        """F(h) = sum over nontrivial elements of exp(-h rho)."""
        if self.finite_group is not None:
            return float(sum(n * math.exp(-h * r) for r, n in self.spectrum.items()))
        G = self.graph
        if G.rank() == 0:
            return 0.0
        B = nb_matrix(G, h)
        m = B.shape[0]
        if h <= self.entropy:
            return math.inf
        b = G.basepoint
        start = np.array([math.exp(-h * G.dlength(d)) if G.tail(d) == b else 0.0
                          for d in range(m)])
        end = np.array([1.0 if G.head(d) == b else 0.0 for d in range(m)])
        try:
            x = np.linalg.solve(np.eye(m) - B.T, start)
        except np.linalg.LinAlgError:
            return math.inf
        val = float(x @ end)
        return val if val >= 0 else math.inf


def _spectrum(f: FactorModel, cap: float) -> Counter:
    G = f.graph
    if f.finite_group is not None:
        dist = orbit_distances(G, f.spec, math.inf)
        for g, r in dist.items():
            f._rho[g] = r
        return Counter(_key(r) for g, r in dist.items() if g != f.grp.identity)
    step, ints, _, exact = _length_grid([e.length for e in G.edges])
    if exact:
        counts = closed_walk_counts(G, step, ints, cap)
        return Counter({_key(k * step): int(round(n)) for k, n in enumerate(counts) if n > 0})
    dist = orbit_distances(G, f.spec, cap)
    return Counter(_key(r) for g, r in dist.items() if g != f.grp.identity)


def build_factor(G: MetricGraph, spec: Optional[CoverSpec] = None,
                 cap: Optional[float] = None) -> FactorModel:
    """Factor from a graph and a trivial or finite cover description."""
    G.require_connected()
    spec = spec or CoverSpec.trivial()
    grp, _ = resolve_voltages(G, spec)
    if spec.kind == "finite":
        _, imgs = generator_images(G, spec)
        elems = enumerate_group(grp, imgs)
        f = FactorModel(G, spec, grp, 0.0, elems)
    elif spec.kind == "trivial":
        f = FactorModel(G, spec, grp, entropy_perron(G).value, None)
    else:
        raise FactorError("factors must use a trivial or finite cover description")
    lmin = min(e.length for e in G.edges) if G.edges else 1.0
    f.extend(cap if cap is not None else SPECTRUM_CAP_FACTOR * lmin)
    return f


# ------------------------------------------------------------- normal forms

@dataclass
class NormalForm:
    letters: List[Tuple[int, Hashable]]

    @property
    def length(self) -> int:
        return len(self.letters)

    def key(self) -> tuple:
        return tuple(self.letters)


def normal_form(letters: Sequence[Tuple[int, Hashable]],
                factors: Sequence[FactorModel]) -> NormalForm:
    """Merge adjacent letters of one factor and drop identities (single stack pass)."""
    out: List[Tuple[int, Hashable]] = []
    for i, g in letters:
        if i not in (1, 2):
            raise FactorError("factor tag must be 1 or 2")
        f = factors[i - 1]
        if not f.contains(g):
            raise FactorError(f"element {g!r} not in factor {i}")
        if g == f.grp.identity:
            continue
        if out and out[-1][0] == i:
            prod = f.grp.mul(out[-1][1], g)
            out.pop()
            if prod != f.grp.identity:
                out.append((i, prod))
        else:
            out.append((i, g))
    return NormalForm(out)


@dataclass
class DumbbellModel:
    f1: FactorModel
    f2: FactorModel
    d: float
    lam: Tuple[float, float] = (1.0, 1.0)
    alpha: float = 0.0

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("bridge half-length must be positive")

    @property
    def factors(self) -> Tuple[FactorModel, FactorModel]:
        return self.f1, self.f2

    def covering_radius(self) -> float:
        """Every point of the dumbbell is this close to the bridge midpoint."""
        return self.d + max(f.graph.covering_radius() for f in self.factors)

    def swapped(self) -> "DumbbellModel":
        return DumbbellModel(self.f2, self.f1, self.d, self.lam[::-1], self.alpha)


def orbit_distance(nf: NormalForm, model: DumbbellModel) -> float:
    fs = model.factors
    return 2 * model.d * nf.length + sum(fs[i - 1].rho(g) for i, g in nf.letters)


# ----------------------------------------------------------- ball counting

def exact_ball_count(model: DumbbellModel, t: float) -> int:
    """Number of orbit points of q within t of q, identity included."""
    if t < 0:
        return 0
    hists = []
    for f in model.factors:
        f.extend(t - 2 * model.d)
        hists.append(Counter({_key(2 * model.d + r): n for r, n in f.spectrum.items()
                              if 2 * model.d + r <= t + 1e-9}))
    total = 1
    ends = [Counter(hists[0]), Counter(hists[1])]
    while ends[0] or ends[1]:
        total += sum(ends[0].values()) + sum(ends[1].values())
        nxt = [Counter(), Counter()]
        for i in (0, 1):
            j = 1 - i
            for x, a in ends[i].items():
                for y, b in hists[j].items():
                    s = _key(x + y)
                    if s <= t + 1e-9:
                        nxt[j][s] += a * b
        ends = nxt
    return total


def ball_count_table(model: DumbbellModel, ts: Sequence[float]) -> List[Tuple[float, int]]:
    return [(float(t), exact_ball_count(model, t)) for t in ts]


def factor_constant(model: DumbbellModel, alpha1: float, t_check: float,
                    samples: int = 400) -> float:
    """Smallest C with v_i(t) <= C exp(alpha1 t) on [0, t_check] for both factors."""
    C = 1.0
    for f in model.factors:
        f.extend(t_check)
        radii = sorted(f.spectrum)
        cum = 1
        for r in radii:
            if r > t_check:
                break
            cum += f.spectrum[r]
            C = max(C, cum * math.exp(-alpha1 * r))
    return C


def analytic_ball_bound(model: DumbbellModel, t: float, alpha1: float, C: float) -> float:
    """sum_l C^l exp(alpha1 s_l) s_l^l / l! with s_l = t - (2d - 1) l > 0."""
    d = model.d
    if d <= 0.5:
        raise ValueError("the counting bound needs d > 1/2")
    total = 0.0
    l = 0
    while True:
        s = t - (2 * d - 1) * l
        if s <= 0 and l > 0:
            break
        if l == 0:
            term = math.exp(alpha1 * max(t, 0.0))
        else:
            logt = l * math.log(C) + alpha1 * s + l * math.log(s) - math.lgamma(l + 1)
            term = math.exp(logt) if logt < 700 else math.inf
        total += term
        l += 1
    return total


# ----------------------------------------------------------- growth rates

def balance_scalings(f1: FactorModel, f2: FactorModel, check: bool = True
                     ) -> Tuple[float, float, float]:
    """Scalings giving both factors entropy alpha and total length 1."""
    e1, e2 = f1.entropy, f2.entropy
    if e1 <= 0 or e2 <= 0:
        raise ValueError("balancing needs positive factor entropies")
    alpha = e1 * f1.volume + e2 * f2.volume
    lam1, lam2 = e1 / alpha, e2 / alpha
    if check:
        for f, lam in ((f1, lam1), (f2, lam2)):
            h = entropy_perron(f.graph.scaled(lam)).value
            if abs(h - alpha) > 1e-9 * max(1.0, alpha):
                raise ArithmeticError("balanced entropy check failed")
        if abs(lam1 * f1.volume + lam2 * f2.volume - 1) > 1e-9:
            raise ArithmeticError("balanced volume check failed")
    return float(lam1), float(lam2), float(alpha)


def build_dumbbell(G1: MetricGraph, spec1: Optional[CoverSpec], G2: MetricGraph,
                   spec2: Optional[CoverSpec], d: float, balance: bool = True,
                   cap: Optional[float] = None) -> DumbbellModel:
    """Dumbbell model, factors rescaled to balanced entropy when requested."""
    f1, f2 = build_factor(G1, spec1, cap), build_factor(G2, spec2, cap)
    if not balance:
        return DumbbellModel(f1, f2, d)
    if f1.entropy > 0 and f2.entropy > 0:
        lam1, lam2, alpha = balance_scalings(f1, f2)
    else:
        # zero-entropy factor: only normalize total length
        lam1 = lam2 = 1.0 / (f1.volume + f2.volume)
        alpha = 0.0
    g1 = build_factor(G1.scaled(lam1), spec1, cap)
    g2 = build_factor(G2.scaled(lam2), spec2, cap)
    return DumbbellModel(g1, g2, d, (lam1, lam2), alpha)


def dumbbell_entropy_exact(model: DumbbellModel, tol: float = 1e-15) -> float:
    """Root of F1(h) F2(h) exp(-4 h d) = 1 (0 when the product never exceeds 1)."""
    f1, f2 = model.factors
    d = model.d

    def g(h):
        a, b = f1.poincare(h), f2.poincare(h)
        if a == 0 or b == 0:
            return -math.inf
        return math.log(a) + math.log(b) - 4 * h * d

    lo = max(f1.entropy, f2.entropy)
    if lo == 0.0:
        g0 = g(0.0)
        if g0 <= 0:
            return 0.0
    hi = max(lo, 1e-3) * 2 + 1.0
    while g(hi) > 0:
        hi *= 2
    while hi - lo > tol * max(1.0, hi):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def truncated_root(model: DumbbellModel, cap: float) -> float:
    """Same root with both factor series truncated at radius ``cap``: a lower bound."""
    f1, f2 = model.factors
    for f in (f1, f2):
        f.extend(cap)
    if all(f.finite_group is not None and len(f.finite_group) - 1 == sum(
            n for r, n in f.spectrum.items() if r <= cap) for f in (f1, f2)):
        return dumbbell_entropy_exact(model)  # nothing was cut off
    s1 = [(r, n) for r, n in f1.spectrum.items() if r <= cap]
    s2 = [(r, n) for r, n in f2.spectrum.items() if r <= cap]

    def g(h):
        a = sum(n * math.exp(-h * r) for r, n in s1)
        b = sum(n * math.exp(-h * r) for r, n in s2)
        if a == 0 or b == 0:
            return -math.inf
        return math.log(a) + math.log(b) - 4 * h * model.d

    if g(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    while g(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def ball_growth_bracket(model: DumbbellModel, t_max: float, step: float = 0.05
                        ) -> Tuple[float, float, float]:
    """(lower, slope, upper) for the growth of exact_ball_count on [0, t_max].

    Upper: min over x of log v(x + 2D) / x (submultiplicativity, D the covering
    radius); lower: the truncated-series root; slope: least squares over the top
    half of the horizon.
    """
    D = model.covering_radius()
    xs = np.arange(step, t_max + 1e-12, step)
    counts = np.array([exact_ball_count(model, x) for x in xs], dtype=float)
    upper = math.inf
    for i, x in enumerate(xs):
        j = np.searchsorted(xs, x + 2 * D - 1e-12)
        if j < len(xs):
            upper = min(upper, math.log(counts[j]) / x)
    sel = xs >= t_max / 2
    slope = float(np.polyfit(xs[sel], np.log(counts[sel]), 1)[0]) if sel.sum() > 1 else 0.0
    lower = truncated_root(model, t_max)
    return lower, slope, upper


@dataclass
class AdditivityRow:
    d: float
    alpha: float
    h_d: float
    gap: float
    ball_counts: List[Tuple[float, int]] = field(default_factory=list)


def additivity_report(G1: MetricGraph, spec1: Optional[CoverSpec], G2: MetricGraph,
                      spec2: Optional[CoverSpec], d_list: Sequence[float],
                      ball_ts: Sequence[float] = ()) -> List[AdditivityRow]:
    """Balanced dumbbell entropies over a list of bridge half-lengths."""
    rows = []
    base = build_dumbbell(G1, spec1, G2, spec2, d_list[0] if d_list else 1.0)
    for d in d_list:
        model = DumbbellModel(base.f1, base.f2, d, base.lam, base.alpha)
        h = dumbbell_entropy_exact(model)
        rows.append(AdditivityRow(d, base.alpha, h, h - base.alpha,
                                  ball_count_table(model, ball_ts)))
    return rows


def report_consistent(rows: Sequence[AdditivityRow], tol: float = 1e-9) -> bool:
    """alpha <= h(d) everywhere and h(d) non-increasing in d."""
    ordered = sorted(rows, key=lambda r: r.d)
    if any(r.h_d < r.alpha - tol for r in ordered):
        return False
    return all(b.h_d <= a.h_d + tol for a, b in zip(ordered, ordered[1:]))


# ------------------------------------------------------- explicit assembly

def assembled_cover_distances(model: DumbbellModel, radius: float
                              ) -> Dict[Tuple[Tuple[int, Hashable], ...], float]:
    """Distances from q to its translates, by Dijkstra on an explicit truncated cover.

    The cover is assembled as a tree of factor-cover copies: copy (w, i) is a
    lift of K_i attached at the element w, its orbit point p_i.g joined by a
    half-bridge of length d to the midpoint lift q.(w g). Nothing here uses
    the distance formula.
    """
    d = model.d
    local = []
    for f in model.factors:
        grp, vol = resolve_voltages(f.graph, f.spec)
        states = cover_dijkstra(f.graph, f.spec, radius)
        adj: Dict[tuple, List[Tuple[tuple, float]]] = {s: [] for s in states}
        for (x, g) in states:
            for e in f.graph.adjacency()[x]:
                h = grp.mul(g, vol[e >> 1] if e % 2 == 0 else grp.inv(vol[e >> 1]))
                nb = (f.graph.head(e), h)
                if nb in adj:
                    adj[(x, g)].append((nb, f.graph.dlength(e)))
        local.append((grp, adj, f.graph.basepoint))

    nbrs: Dict[tuple, List[Tuple[tuple, float]]] = {}

    def link(a, b, w):
        nbrs.setdefault(a, []).append((b, w))
        nbrs.setdefault(b, []).append((a, w))

    # copies are spawned only when their entry midpoint can lie within the
    # radius; local distances inside a copy bound the entry distance from below
    local_dist = [cover_dijkstra(f.graph, f.spec, radius) for f in model.factors]
    order = [sorted(adj, key=lambda s, ld=ld: ld[s]) for (_, adj, _), ld in zip(local, local_dist)]
    pending = [((), 1, 0.0), ((), 2, 0.0)]
    while pending:
        w, i, reach = pending.pop()
        grp, adj, base = local[i - 1]
        ld = local_dist[i - 1]
        room = radius - reach - d
        for s in order[i - 1]:
            if ld[s] > room:
                break
            for nb, ln in adj[s]:
                if ld[nb] <= room:
                    nbrs.setdefault(("x", w, i, s), []).append((("x", w, i, nb), ln))
            x, g = s
            if x != base:
                continue
            elem = w if g == grp.identity else w + ((i, g),)
            link(("x", w, i, s), ("q", elem), d)
            if g != grp.identity:
                nxt = reach + 2 * d + local_dist[i - 1][s]
                if nxt <= radius:
                    pending.append((elem, 3 - i, nxt))

    dist = {("q", ()): 0.0}
    heap = [(0.0, 0, ("q", ()))]
    tick = 1
    done = set()
    while heap:
        dx, _, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        for nb, ln in nbrs.get(node, []):
            nd = dx + ln
            if nd <= radius + 1e-9 and nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, tick, nb))
                tick += 1
    return {node[1]: dx for node, dx in dist.items() if node[0] == "q" and node in done}
