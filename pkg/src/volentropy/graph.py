"""Metric graphs, cover specifications and lazily expanded covers.

Directed edge ``2*i`` runs along edge ``i`` from ``u`` to ``v``; ``2*i + 1``
is its reverse. A cover is described by voltages on edges: walking along a
directed edge multiplies the current group element on the right by the edge
voltage (inverse voltage for the reverse direction). The cover attached to a
``CoverSpec`` is the component of ``(basepoint, identity)`` in the derived
graph, whose deck group is the image of the fundamental group.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from . import groups


class GraphError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Lazy cover expansion hit its state cap."""


DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class Edge:
    name: str
    u: int
    v: int
    length: float


@dataclass
class MetricGraph:
    n: int
    edges: List[Edge]
    basepoint: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs a vertex")
        if not 0 <= self.basepoint < self.n:
            raise GraphError("basepoint out of range")
        names = set()
        for e in self.edges:
            if not (0 <= e.u < self.n and 0 <= e.v < self.n):
                raise GraphError(f"edge {e.name}: endpoint out of range")
            if not e.length > 0 or not math.isfinite(e.length):
                raise GraphError(f"edge {e.name}: length must be positive")
            if e.name in names:
                raise GraphError(f"duplicate edge name {e.name}")
            names.add(e.name)

    # -- basic structure
    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)

    def total_length(self) -> float:
        return float(sum(e.length for e in self.edges))

    def rank(self) -> int:
        """Rank of the fundamental group (graph assumed connected)."""
        return len(self.edges) - self.n + 1

    def is_connected(self) -> bool:
        seen = {self.basepoint}
        stack = [self.basepoint]
        adj = self.adjacency()
        while stack:
            x = stack.pop()
            for d in adj[x]:
                y = self.head(d)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def require_connected(self) -> None:
        if not self.is_connected():
            raise GraphError("graph is disconnected")

    def tail(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.u if d % 2 == 0 else e.v

    def head(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e.v if d % 2 == 0 else e.u

    def dlength(self, d: int) -> float:
        return self.edges[d >> 1].length

    def adjacency(self) -> List[List[int]]:
        """Outgoing directed edges per vertex."""
        out: List[List[int]] = [[] for _ in range(self.n)]
        for d in range(2 * len(self.edges)):
            out[self.tail(d)].append(d)
        return out

    def edge_index(self, name: str) -> int:
        for i, e in enumerate(self.edges):
            if e.name == name:
                return i
        raise GraphError(f"no edge named {name!r}")

    # -- derived graphs
    def scaled(self, lam: float) -> "MetricGraph":
        return self.with_lengths([e.length * lam for e in self.edges])

    def with_lengths(self, lengths: Sequence[float]) -> "MetricGraph":
        if len(lengths) != len(self.edges):
            raise GraphError("length vector size mismatch")
        edges = [replace(e, length=float(l)) for e, l in zip(self.edges, lengths)]
        return MetricGraph(self.n, edges, self.basepoint)

    def with_basepoint(self, v: int) -> "MetricGraph":
        return MetricGraph(self.n, list(self.edges), v)

    def vertex_distances(self, source: Optional[int] = None) -> List[float]:
        source = self.basepoint if source is None else source
        dist = [math.inf] * self.n
        dist[source] = 0.0
        heap = [(0.0, source)]
        adj = self.adjacency()
        while heap:
            dx, x = heapq.heappop(heap)
            if dx > dist[x]:
                continue
            for d in adj[x]:
                y = self.head(d)
                nd = dx + self.dlength(d)
                if nd < dist[y]:
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        return dist

    def covering_radius(self) -> float:
        """Max over all points (edge interiors included) of the distance to the basepoint."""
        dist = self.vertex_distances()
        best = max(dist)
        for e in self.edges:
            best = max(best, (dist[e.u] + dist[e.v] + e.length) / 2)
        return best

    # -- fundamental group
    def spanning_tree(self) -> Tuple[List[int], List[Optional[int]]]:
        """BFS tree from the basepoint. Returns (tree edge ids, parent directed edge per vertex)."""
        parent: List[Optional[int]] = [None] * self.n
        seen = {self.basepoint}
        order = deque([self.basepoint])
        adj = self.adjacency()
        tree = []
        while order:
            x = order.popleft()
            for d in adj[x]:
                y = self.head(d)
                if y not in seen:
                    seen.add(y)
                    parent[y] = d
                    tree.append(d >> 1)
                    order.append(y)
        if len(seen) != self.n:
            raise GraphError("graph is disconnected")
        return tree, parent

    def tree_path(self, v: int, parent=None) -> List[int]:
        """Directed edges of the tree path basepoint -> v."""
        if parent is None:
            parent = self.spanning_tree()[1]
        path = []
        while v != self.basepoint:
            d = parent[v]
            path.append(d)
            v = self.tail(d)
        return path[::-1]

    def generator_walks(self) -> List[List[int]]:
        """Closed walks at the basepoint, one per non-tree edge, freely generating pi_1."""
        tree, parent = self.spanning_tree()
        tset = set(tree)
        walks = []
        for i, e in enumerate(self.edges):
            if i in tset:
                continue
            d = 2 * i
            back = [x ^ 1 for x in reversed(self.tree_path(e.v, parent))]
            walks.append(self.tree_path(e.u, parent) + [d] + back)
        return walks

    def __repr__(self) -> str:
        return f"MetricGraph(n={self.n}, edges={len(self.edges)}, rank={self.rank()})"


# ---------------------------------------------------------------- builders

def circle(length: float = 1.0) -> MetricGraph:
    return MetricGraph(1, [Edge("a", 0, 0, length)])


def rose(k: int, length: float = 1.0) -> MetricGraph:
    return MetricGraph(1, [Edge(f"a{i}", 0, 0, length) for i in range(k)])


def figure_eight(la: float = 1.0, lb: float = 1.0) -> MetricGraph:
    return MetricGraph(1, [Edge("a", 0, 0, la), Edge("b", 0, 0, lb)])


def theta(l1: float = 1.0, l2: float = 1.0, l3: float = 1.0) -> MetricGraph:
    return MetricGraph(2, [Edge("e1", 0, 1, l1), Edge("e2", 0, 1, l2), Edge("e3", 0, 1, l3)])


def random_graph(rng: np.random.Generator, rank: int, max_vertices: int = 3,
                 lo: float = 0.5, hi: float = 2.0) -> MetricGraph:
    """Connected multigraph of the given rank, loops allowed, uniform lengths."""
    n = int(rng.integers(1, max_vertices + 1))
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v))
    for _ in range(rank):
        edges.append((int(rng.integers(0, n)), int(rng.integers(0, n))))
    lengths = rng.uniform(lo, hi, size=len(edges))
    return MetricGraph(n, [Edge(f"e{i}", u, v, float(l))
                           for i, ((u, v), l) in enumerate(zip(edges, lengths))])


# ------------------------------------------------------------- cover specs

@dataclass
class CoverSpec:
    """Which normal subgroup H of pi_1 to cover.

    kind ``trivial``: universal cover. ``finite``: kernel of edge voltages in
    the symmetric group on ``size`` points. ``free``: kernel of edge voltages
    in the free group of rank ``size``. Unlisted edges carry the identity.
    """

    kind: str = "trivial"
    size: int = 0
    voltages: Dict[str, tuple] = field(default_factory=dict)

    @classmethod
    def trivial(cls) -> "CoverSpec":
        return cls("trivial")

    @classmethod
    def finite(cls, degree: int, perms: Dict[str, str | Sequence[int]]) -> "CoverSpec":
        vol = {k: groups.parse_cycles(v, degree) if isinstance(v, str) else tuple(v)
               for k, v in perms.items()}
        return cls("finite", degree, vol)

    @classmethod
    def free(cls, rank: int, words: Dict[str, str | Sequence[int]]) -> "CoverSpec":
        vol = {k: groups.parse_word(v) if isinstance(v, str) else groups.free_reduce(v)
               for k, v in words.items()}
        return cls("free", rank, vol)


@dataclass
class VoltageGroup:
    identity: Hashable
    mul: Callable
    inv: Callable


FREE = VoltageGroup((), groups.free_mul, groups.free_inv)


def perm_group(n: int) -> VoltageGroup:
    return VoltageGroup(groups.perm_identity(n), groups.perm_mul, groups.perm_inv)


def resolve_voltages(G: MetricGraph, spec: CoverSpec) -> Tuple[VoltageGroup, List[Hashable]]:
    """Per-edge voltages in a concrete group; the trivial cover uses free generators on non-tree edges."""
    if spec.kind == "trivial":
        tree = set(G.spanning_tree()[0])
        vol, k = [], 0
        for i in range(len(G.edges)):
            if i in tree:
                vol.append(())
            else:
                k += 1
                vol.append((k,))
        return FREE, vol
    names = {e.name for e in G.edges}
    unknown = set(spec.voltages) - names
    if unknown:
        raise GraphError(f"cover description names unknown edges {sorted(unknown)}")
    if spec.kind == "finite":
        grp = perm_group(spec.size)
        for v in spec.voltages.values():
            if len(v) != spec.size:
                raise GraphError("permutation of wrong degree")
    elif spec.kind == "free":
        grp = FREE
        for w in spec.voltages.values():
            if any(abs(x) > spec.size for x in w):
                raise GraphError("word uses a generator beyond the stated rank")
    else:
        raise GraphError(f"unknown cover kind {spec.kind!r}")
    return grp, [spec.voltages.get(e.name, grp.identity) for e in G.edges]


def dvoltage(grp: VoltageGroup, vol: List[Hashable], d: int):
    g = vol[d >> 1]
    return g if d % 2 == 0 else grp.inv(g)


def walk_voltage(grp: VoltageGroup, vol, walk: Sequence[int]):
    g = grp.identity
    for d in walk:
        g = grp.mul(g, dvoltage(grp, vol, d))
    return g


def generator_images(G: MetricGraph, spec: CoverSpec) -> Tuple[VoltageGroup, list]:
    grp, vol = resolve_voltages(G, spec)
    return grp, [walk_voltage(grp, vol, w) for w in G.generator_walks()]


def image_rank(G: MetricGraph, spec: CoverSpec) -> int:
    """Rank of the (free) deck group for trivial/free specs."""
    if spec.kind == "trivial":
        return G.rank()
    if spec.kind != "free":
        raise GraphError("image rank is defined for free quotients")
    _, imgs = generator_images(G, spec)
    return groups.subgroup_rank(imgs)


def is_universal(G: MetricGraph, spec: CoverSpec) -> bool:
    """True when H is trivial, i.e. the cover is the universal cover."""
    if spec.kind == "trivial":
        return True
    if spec.kind == "free":
        return image_rank(G, spec) == G.rank()
    _, imgs = generator_images(G, spec)
    return G.rank() == 0


def image_group_order(G: MetricGraph, spec: CoverSpec, cap: int = DEFAULT_BUDGET) -> int:
    grp, imgs = generator_images(G, spec)
    return len(enumerate_group(grp, imgs, cap))


def enumerate_group(grp: VoltageGroup, gens: Sequence, cap: int = DEFAULT_BUDGET) -> set:
    gens = list(gens) + [grp.inv(g) for g in gens]
    seen = {grp.identity}
    frontier = [grp.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = grp.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    if len(seen) > cap:
                        raise BudgetExceeded("group enumeration exceeded cap")
                    nxt.append(h)
        frontier = nxt
    return seen


# ------------------------------------------------------------ lazy covers

def cover_dijkstra(G: MetricGraph, spec: CoverSpec, radius: float,
                   source: Optional[int] = None, budget: int = DEFAULT_BUDGET,
                   stop: Optional[Callable[[Tuple[int, Hashable], float], bool]] = None
                   ) -> Dict[Tuple[int, Hashable], float]:
    """Distances from (source, e) to every cover vertex within ``radius``.

    ``stop(state, dist)`` may end the search early when it returns True for a
    settled state.
    """
    grp, vol = resolve_voltages(G, spec)
    source = G.basepoint if source is None else source
    adj = G.adjacency()
    start = (source, grp.identity)
    dist: Dict[Tuple[int, Hashable], float] = {start: 0.0}
    done: Dict[Tuple[int, Hashable], float] = {}
    heap = [(0.0, 0, start)]
    tick = 1
    while heap:
        dx, _, state = heapq.heappop(heap)
        if state in done:
            continue
        done[state] = dx
        if stop is not None and stop(state, dx):
            break
        x, g = state
        for d in adj[x]:
            nd = dx + G.dlength(d)
            if nd > radius + 1e-12:
                continue
            nxt = (G.head(d), grp.mul(g, dvoltage(grp, vol, d)))
            if nxt in done:
                continue
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, tick, nxt))
                tick += 1
                if len(dist) > budget:
                    raise BudgetExceeded(f"cover expansion exceeded {budget} states")
    return done


def orbit_distances(G: MetricGraph, spec: CoverSpec, radius: float,
                    budget: int = DEFAULT_BUDGET) -> Dict[Hashable, float]:
    """Deck-group element -> distance from basepoint lift to its translate."""
    done = cover_dijkstra(G, spec, radius, budget=budget)
    b = G.basepoint
    return {g: dx for (x, g), dx in done.items() if x == b}


def finite_cover(G: MetricGraph, spec: CoverSpec) -> MetricGraph:
    """Explicit permutation-voltage cover (sheets 0..degree-1); must be connected."""
    if spec.kind != "finite":
        raise GraphError("finite_cover needs a finite quotient")
    grp, vol = resolve_voltages(G, spec)
    k = spec.size
    edges = []
    for i, e in enumerate(G.edges):
        p = vol[i]
        for s in range(k):
            edges.append(Edge(f"{e.name}.{s}", e.u * k + s, e.v * k + p[s], e.length))
    H = MetricGraph(G.n * k, edges, G.basepoint * k)
    if not H.is_connected():
        raise GraphError("permutation cover is disconnected")
    return H


# ---------------------------------------------------------------- text I/O

def _parse_length(text: str) -> float:
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise GraphError(f"bad length {text!r}") from None


def parse_graph(text: str) -> MetricGraph:
    """Parse ``graph / vertices n / edge name u v length=x / basepoint v`` lines."""
    n = None
    base = 0
    edges = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "graph":
                seen_header = True
            elif tok[0] == "vertices":
                n = int(tok[1])
            elif tok[0] == "edge":
                name, u, v = tok[1], int(tok[2]), int(tok[3])
                if len(tok) < 5 or not tok[4].startswith("length="):
                    raise ValueError("expected length=<x>")
                edges.append(Edge(name, u, v, _parse_length(tok[4][7:])))
            elif tok[0] == "basepoint":
                base = int(tok[1])
            elif tok[0] == "quotient":
                break
            else:
                raise ValueError(f"unknown keyword {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    if not seen_header:
        raise GraphError("missing 'graph' header")
    if n is None:
        raise GraphError("missing 'vertices' line")
    return MetricGraph(n, edges, base)


def format_graph(G: MetricGraph) -> str:
    lines = ["graph", f"vertices {G.n}"]
    lines += [f"edge {e.name} {e.u} {e.v} length={e.length!r}" for e in G.edges]
    lines.append(f"basepoint {G.basepoint}")
    return "\n".join(lines) + "\n"


def parse_cover(text: str) -> CoverSpec:
    """Parse a ``quotient trivial|finite <degree>|free <rank>`` block (first one found)."""
    spec = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "quotient":
            try:
                if tok[1] == "trivial":
                    spec = CoverSpec.trivial()
                elif tok[1] == "finite":
                    spec = CoverSpec("finite", int(tok[2]), {})
                elif tok[1] == "free":
                    spec = CoverSpec("free", int(tok[2]), {})
                else:
                    raise ValueError(f"unknown quotient kind {tok[1]!r}")
            except (IndexError, ValueError) as exc:
                raise GraphError(f"line {lineno}: {exc}") from None
            continue
        if spec is None or "->" not in line:
            continue
        name, rhs = (s.strip() for s in line.split("->", 1))
        try:
            if spec.kind == "finite":
                spec.voltages[name] = groups.parse_cycles(rhs, spec.size)
            elif spec.kind == "free":
                spec.voltages[name] = groups.parse_word(rhs)
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    return spec if spec is not None else CoverSpec.trivial()


def format_cover(spec: CoverSpec) -> str:
    if spec.kind == "trivial":
        return "quotient trivial\n"
    lines = [f"quotient {spec.kind} {spec.size}"]
    for name, g in spec.voltages.items():
        rhs = groups.format_cycles(g) if spec.kind == "finite" else groups.format_word(g)
        lines.append(f"{name} -> {rhs}")
    return "\n".join(lines) + "\n"
