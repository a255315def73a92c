"""Systoles of finite-index subgroups of free groups and of graph covers.

A subgroup is given as the kernel of a homomorphism from the free group
F_r = <x_1..x_r> onto a finite group (permutations or 2x2 matrices mod N).
Its cosets are the elements of the image, so the Schreier graph is the
Cayley graph of the image, and the systole is the shortest nonempty reduced
word returning to the base coset.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from . import groups
from .graph import (DEFAULT_BUDGET, BudgetExceeded, CoverSpec, MetricGraph, VoltageGroup,
                    cover_dijkstra, perm_group, resolve_voltages)


@dataclass
class MarkedGroup:
    """Free group of the given rank with the letters x_1..x_r and their inverses."""

    rank: int

    @property
    def letters(self) -> List[int]:
        return [s * i for i in range(1, self.rank + 1) for s in (1, -1)]


@dataclass
class Homomorphism:
    """Generator images in a finite group; the subgroup is its kernel."""

    name: str
    grp: VoltageGroup
    images: List[Hashable]

    def image(self, letter: int):
        g = self.images[abs(letter) - 1]
        return g if letter > 0 else self.grp.inv(g)

    def evaluate(self, word: Sequence[int]):
        g = self.grp.identity
        for x in word:
            g = self.grp.mul(g, self.image(x))
        return g


def matrix_group(N: int) -> VoltageGroup:
    return VoltageGroup(groups.mat_identity(),
                        lambda a, b: groups.mat_mul_mod(a, b, N),
                        lambda a: groups.mat_inv_mod(a, N))


def to_permutations(images: Sequence[Sequence[int]], name: str = "perm") -> Homomorphism:
    n = len(images[0])
    return Homomorphism(name, perm_group(n), [tuple(p) for p in images])


def to_matrices(images: Sequence[Sequence[int]], N: int, name: Optional[str] = None) -> Homomorphism:
    imgs = [tuple(int(v) % N for v in a) for a in images]
    for a in imgs:
        if math.gcd((a[0] * a[3] - a[1] * a[2]) % N, N) != 1:
            raise ValueError("matrix image is not invertible mod N")
    return Homomorphism(name or f"mat{N}", matrix_group(N), imgs)


def sl2_mod(p: int) -> Homomorphism:
    """F_2 -> SL_2(Z/p) with x1 -> [[1,2],[0,1]], x2 -> [[1,0],[2,1]]."""
    return to_matrices([(1, 2, 0, 1), (1, 0, 2, 1)], p, f"sl2mod{p}")


def whole_group(rank: int) -> Homomorphism:
    """Map onto the trivial group: the kernel is everything."""
    return to_permutations([(0,)] * rank, "whole")


@dataclass
class SchreierGraph:
    vertices: List[Hashable]
    action: Dict[Tuple[int, int], int]  # (coset, letter) -> coset
    base: int = 0

    @property
    def index(self) -> int:
        return len(self.vertices)


def schreier_graph(g: MarkedGroup, hom: Homomorphism, cap: int = DEFAULT_BUDGET) -> SchreierGraph:
    if len(hom.images) != g.rank:
        raise ValueError("one image per generator is required")
    idx = {hom.grp.identity: 0}
    verts = [hom.grp.identity]
    action: Dict[Tuple[int, int], int] = {}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for x in g.letters:
            h = hom.grp.mul(verts[i], hom.image(x))
            j = idx.get(h)
            if j is None:
                if len(verts) >= cap:
                    raise BudgetExceeded("image group larger than cap")
                j = idx[h] = len(verts)
                verts.append(h)
                queue.append(j)
            action[(i, x)] = j
    return SchreierGraph(verts, action)


def cayley_systole(g: MarkedGroup, hom: Homomorphism, sg: Optional[SchreierGraph] = None
                   ) -> Tuple[int, Tuple[int, ...]]:
    """(length, word) of a shortest nonempty reduced word in the kernel."""
    sg = sg or schreier_graph(g, hom)
    start = []
    parent: Dict[Tuple[int, int], Optional[Tuple[int, int]]] = {}
    for x in g.letters:
        st = (sg.action[(sg.base, x)], x)
        if st not in parent:
            parent[st] = None
            start.append(st)
    frontier = start
    depth = 1
    while frontier:
        for st in frontier:
            if st[0] == sg.base:
                word = []
                cur = st
                while cur is not None:
                    word.append(cur[1])
                    cur = parent[cur]
                return depth, tuple(reversed(word))
        nxt = []
        for v, last in frontier:
            for x in g.letters:
                if x == -last:
                    continue
                st = (sg.action[(v, x)], x)
                if st not in parent:
                    parent[st] = (v, last)
                    nxt.append(st)
        frontier = nxt
        depth += 1
    raise ValueError("kernel is trivial")


def graph_systole_essential(G: MetricGraph, spec: CoverSpec, budget: int = DEFAULT_BUDGET
                            ) -> float:
    """Shortest closed loop (based anywhere) whose image under the cover's quotient is nontrivial."""
    G.require_connected()
    grp, _ = resolve_voltages(G, spec)
    radius = 2 * G.total_length() + 1e-9
    best = math.inf
    for x in range(G.n):
        found = {}

        def stop(state, dist, x=x):
            if state[0] == x and state[1] != grp.identity:
                found["d"] = dist
                return True
            return dist >= best

        cover_dijkstra(G, spec, min(radius, best), source=x, budget=budget, stop=stop)
        if "d" in found:
            best = min(best, found["d"])
    return best


# -------------------------------------------------------------------- scans

@dataclass
class SystoleScan:
    m: int
    rows: List[Tuple[int, int, float, float]]  # (index, sys, vol, vol/sys^m)
    fit_c: float
    fit_C: float

    def nondecreasing(self) -> bool:
        ordered = sorted(self.rows)
        return all(b[1] >= a[1] for a, b in zip(ordered, ordered[1:]))

    def ratio_spread(self) -> float:
        """Largest factor between the ratio column and the fitted C k / log k."""
        worst = 1.0
        for k, _, _, r in self.rows:
            pred = self.fit_C * k / math.log(k)
            worst = max(worst, r / pred, pred / r)
        return worst


def sigma_scan_multiples(g: MarkedGroup, family: Sequence[Homomorphism], m: int = 1,
                         base_volume: Optional[float] = None) -> SystoleScan:
    """Index, systole and covering volume across a family of kernels.

    Fits sys = c log k and vol/sys^m = C k / log k by least squares through
    the origin.
    """
    vol0 = g.rank if base_volume is None else base_volume
    rows = []
    for hom in family:
        sg = schreier_graph(g, hom)
        sys, _ = cayley_systole(g, hom, sg)
        k = sg.index
        vol = k * vol0
        rows.append((k, sys, vol, vol / sys ** m))
    rows.sort()
    usable = [r for r in rows if r[0] > 1]
    c = C = 0.0
    if usable:
        lk = np.array([math.log(r[0]) for r in usable])
        sysv = np.array([r[1] for r in usable], dtype=float)
        c = float(lk @ sysv / (lk @ lk))
        feat = np.array([r[0] / math.log(r[0]) for r in usable])
        ratio = np.array([r[3] for r in usable])
        C = float(feat @ ratio / (feat @ feat))
    return SystoleScan(m, rows, c, C)


def growth_profile(kind: str, m: int = 1) -> Callable[[float], float]:
    if kind == "k":
        return lambda k: float(k)
    if kind == "k/log^m":
        return lambda k: k / math.log(k) ** m
    raise ValueError(f"unknown growth profile {kind!r}")


def _tail_ratio(samples: Sequence[Tuple[float, float]], h: Callable[[float], float]) -> float:
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    pts = sorted(samples)
    if pts[0][0] < 2:
        raise ValueError("samples must have k >= 2")
    tail = pts[len(pts) // 2:]
    return max(rho / h(k) for k, rho in tail)


def stabilized_seminorm(samples, kind: str = "k/log^m", m: int = 1) -> float:
    """Tail estimate of limsup rho_k / h(k).

    ``samples`` is a list of (k, rho_k) for one class, or a dict n -> list
    for the multiples n*a, in which case the result is min over n of the
    per-multiple estimate divided by n.
    """
    h = growth_profile(kind, m)
    if isinstance(samples, dict):
        return min(_tail_ratio(s, h) / n for n, s in samples.items())
    return _tail_ratio(samples, h)
