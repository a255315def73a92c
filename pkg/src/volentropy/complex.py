"""Finite Delta-complexes with exact rational chains.

A Delta-complex stores, for each dimension ``k``, a list of ``k``-simplices.
A ``k``-simplex with ``k >= 1`` is an ordered tuple of ``k + 1`` indices into
the ``(k-1)``-simplices: entry ``j`` is the face opposite vertex ``j``.
Unlike a simplicial complex, a simplex is not determined by its vertices and
the same face may occur several times (a loop edge has one vertex twice).

Text format::

    # comments start with '#'
    dim 2
    vertex v
    simplex 1 a : v v
    simplex 2 U : a b c
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg


class ComplexError(ValueError):
    """Malformed complex description or violated incidence invariant."""


@dataclass
class Chain:
    """Sparse chain: simplex index -> nonzero rational coefficient."""

    degree: int
    coeffs: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {i: Fraction(c) for i, c in self.coeffs.items() if c != 0}

    @classmethod
    def from_dense(cls, degree: int, values: Sequence) -> "Chain":
        return cls(degree, {i: Fraction(v) for i, v in enumerate(values) if v != 0})

    def dense(self, n: int) -> List[Fraction]:
        out = [Fraction(0)] * n
        for i, c in self.coeffs.items():
            out[i] = c
        return out

    def l1(self) -> Fraction:
        return sum((abs(c) for c in self.coeffs.values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Chain") -> "Chain":
        if other.degree != self.degree:
            raise ComplexError("adding chains of different degrees")
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return Chain(self.degree, out)

    def __neg__(self) -> "Chain":
        return Chain(self.degree, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, k) -> "Chain":
        k = Fraction(k)
        return Chain(self.degree, {i: k * c for i, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Chain) and self.degree == other.degree
                and self.coeffs == other.coeffs)


@dataclass
class DeltaComplex:
    """Graded simplices with ordered face maps.

    ``faces[k][i]`` is the face tuple of the ``i``-th ``k``-simplex;
    ``names[k][i]`` its identifier in the text format.
    """

    faces: List[List[Tuple[int, ...]]]
    names: List[List[str]]

    def __post_init__(self):
        self.validate()

    @property
    def dim(self) -> int:
        return len(self.faces) - 1

    def count(self, k: int) -> int:
        if k < 0 or k > self.dim:
            return 0
        return len(self.faces[k])

    def counts(self) -> List[int]:
        return [len(f) for f in self.faces]

    def index(self, k: int, name: str) -> int:
        try:
            return self.names[k].index(name)
        except ValueError:
            raise ComplexError(f"no {k}-simplex named {name!r}") from None

    def validate(self) -> None:
        if not self.faces:
            raise ComplexError("empty complex")
        for k, layer in enumerate(self.faces):
            for i, fs in enumerate(layer):
                sid = self.names[k][i]
                if k == 0:
                    if fs:
                        raise ComplexError(f"vertex {sid} has faces")
                    continue
                if len(fs) != k + 1:
                    raise ComplexError(f"simplex {sid}: expected {k + 1} faces, got {len(fs)}")
                for f in fs:
                    if not 0 <= f < len(self.faces[k - 1]):
                        raise ComplexError(f"simplex {sid}: face out of range")
                if k >= 2:
                    below = self.faces[k - 1]
                    for a in range(k + 1):
                        for b in range(a + 1, k + 1):
                            # d_a d_b = d_{b-1} d_a
                            if below[fs[b]][a] != below[fs[a]][b - 1]:
                                raise ComplexError(
                                    f"simplex {sid}: simplicial identity fails for faces {a},{b}")

    def vertices_of(self, k: int, i: int) -> Tuple[int, ...]:
        """Ordered vertex indices of a simplex (vertex j = opposite of face j)."""
        if k == 0:
            return (i,)
        verts = []
        for j in range(k + 1):
            # vertex j survives in any face other than face j
            f = self.faces[k][i][0 if j != 0 else 1]
            pos = j if j == 0 else j - 1
            verts.append(self.vertices_of(k - 1, f)[pos])
        return tuple(verts)

    def subface(self, k: int, i: int, keep: Sequence[int]) -> int:
        """Index of the face of simplex (k, i) spanned by vertex positions ``keep``."""
        keep = sorted(keep)
        drop = [j for j in range(k + 1) if j not in keep]
        cur_k, cur = k, i
        for j in sorted(drop, reverse=True):
            cur = self.faces[cur_k][cur][j]
            cur_k -= 1
        return cur

    def __repr__(self) -> str:
        return f"DeltaComplex(dim={self.dim}, counts={self.counts()})"


# ---------------------------------------------------------------- text format

def parse_complex(text: str) -> DeltaComplex:
    """Parse the line-oriented complex format; see module docstring."""
    declared_dim: Optional[int] = None
    entries: List[Tuple[int, str, List[str], int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            if tok[0] == "dim":
                declared_dim = int(tok[1])
            elif tok[0] == "vertex":
                if len(tok) != 2:
                    raise ValueError("expected 'vertex <id>'")
                entries.append((0, tok[1], [], lineno))
            elif tok[0] == "simplex":
                k = int(tok[1])
                sid = tok[2]
                rest = tok[3:]
                if rest and rest[0] == ":":
                    rest = rest[1:]
                elif k > 0:
                    raise ValueError("expected ':' before face list")
                entries.append((k, sid, rest, lineno))
            else:
                raise ValueError(f"unknown keyword {tok[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ComplexError(f"line {lineno}: parse error: {exc}") from None

    top = max([e[0] for e in entries], default=0)
    dim = declared_dim if declared_dim is not None else top
    if top > dim:
        raise ComplexError(f"simplex of dimension {top} exceeds dim {dim}")
    names: List[List[str]] = [[] for _ in range(dim + 1)]
    for k, sid, _, lineno in entries:
        if sid in names[k]:
            raise ComplexError(f"line {lineno}: duplicate {k}-simplex id {sid!r}")
        names[k].append(sid)
    lookup = [{n: i for i, n in enumerate(layer)} for layer in names]
    faces: List[List[Tuple[int, ...]]] = [[] for _ in range(dim + 1)]
    for k, sid, flist, lineno in entries:
        if k == 0:
            faces[0].append(())
            continue
        if len(flist) != k + 1:
            raise ComplexError(f"line {lineno}: simplex {sid}: expected {k + 1} faces")
        try:
            faces[k].append(tuple(lookup[k - 1][f] for f in flist))
        except KeyError as exc:
            raise ComplexError(f"line {lineno}: simplex {sid}: face out of range {exc}") from None
    try:
        return DeltaComplex(faces, names)
    except ComplexError as exc:
        raise ComplexError(f"invariant violation: {exc}") from None


def format_complex(X: DeltaComplex) -> str:
    lines = [f"dim {X.dim}"]
    for k, layer in enumerate(X.faces):
        for i, fs in enumerate(layer):
            if k == 0:
                lines.append(f"vertex {X.names[0][i]}")
            else:
                fl = " ".join(X.names[k - 1][f] for f in fs)
                lines.append(f"simplex {k} {X.names[k][i]} : {fl}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ boundary

def boundary(c: Chain, X: DeltaComplex) -> Chain:
    """Alternating face sum, exact."""
    k = c.degree
    if k < 1:
        raise ComplexError("boundary of a 0-chain")
    if k > X.dim:
        raise ComplexError(f"degree {k} exceeds complex dimension {X.dim}")
    out: Dict[int, Fraction] = {}
    for i, coef in c.coeffs.items():
        for j, f in enumerate(X.faces[k][i]):
            out[f] = out.get(f, 0) + (coef if j % 2 == 0 else -coef)
    return Chain(k - 1, out)


def boundary_matrix(X: DeltaComplex, k: int) -> linalg.Matrix:
    """Matrix of d_k: rows (k-1)-simplices, columns k-simplices."""
    rows, cols = X.count(k - 1), X.count(k)
    mat = [[Fraction(0)] * cols for _ in range(rows)]
    if k < 1 or k > X.dim:
        return mat
    for i, fs in enumerate(X.faces[k]):
        for j, f in enumerate(fs):
            mat[f][i] += 1 if j % 2 == 0 else -1
    return mat


# ------------------------------------------------------------- pseudomanifold

@dataclass
class PseudomanifoldReport:
    is_pseudomanifold: bool
    failures: List[Tuple[str, List[int]]]
    orientable: bool
    fundamental_cycle: Optional[Chain] = None


def _facet_incidences(X: DeltaComplex) -> Dict[int, List[Tuple[int, int]]]:
    m = X.dim
    inc: Dict[int, List[Tuple[int, int]]] = {f: [] for f in range(X.count(m - 1))}
    if m == 0:
        return inc
    for s, fs in enumerate(X.faces[m]):
        for j, f in enumerate(fs):
            inc[f].append((s, j))
    return inc


def check_pseudomanifold(X: DeltaComplex) -> PseudomanifoldReport:
    """Check P1-P3 counting incidences with multiplicity, then orient."""
    m = X.dim
    failures: List[Tuple[str, List[int]]] = []

    # P1: every simplex lies under some top simplex
    covered = [set() for _ in range(m + 1)]
    covered[m] = set(range(X.count(m)))
    for k in range(m, 0, -1):
        for i in covered[k]:
            covered[k - 1].update(X.faces[k][i])
    for k in range(m):
        missing = sorted(set(range(X.count(k))) - covered[k])
        if missing:
            failures.append(("P1", missing))

    inc = _facet_incidences(X)
    if m >= 1:
        bad = sorted(f for f, lst in inc.items() if len(lst) != 2)
        if bad:
            failures.append(("P2", bad))

    # P3: connectivity of top simplices through shared facets
    ntop = X.count(m)
    parent = list(range(ntop))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for lst in inc.values():
        for (s, _), (t, _) in zip(lst, lst[1:]):
            parent[find(s)] = find(t)
    roots = {find(s) for s in range(ntop)}
    if len(roots) != 1:
        comps: Dict[int, int] = {}
        for s in range(ntop):
            comps.setdefault(find(s), s)
        failures.append(("P3", sorted(comps.values())))

    ok = not failures
    orientable = False
    cycle = None
    if ok:
        signs = _orient(X, inc)
        if signs is not None:
            orientable = True
            cycle = Chain(m, {s: Fraction(e) for s, e in enumerate(signs)})
    return PseudomanifoldReport(ok, failures, orientable, cycle)


def _orient(X: DeltaComplex, inc) -> Optional[List[int]]:
    """Propagate signs across shared facets; None on contradiction."""
    m = X.dim
    ntop = X.count(m)
    if m == 0:
        return [1] * ntop
    adj: Dict[int, List[Tuple[int, int]]] = {s: [] for s in range(ntop)}
    for lst in inc.values():
        (s, a), (t, b) = lst
        # need e_s (-1)^a + e_t (-1)^b = 0, i.e. e_t = -e_s (-1)^(a+b)
        rel = -1 if (a + b) % 2 == 0 else 1
        adj[s].append((t, rel))
        adj[t].append((s, rel))
    signs = [0] * ntop
    signs[0] = 1
    stack = [0]
    while stack:
        s = stack.pop()
        for t, rel in adj[s]:
            want = signs[s] * rel
            if signs[t] == 0:
                signs[t] = want
                stack.append(t)
            elif signs[t] != want:
                return None
    return signs


def orientation_double_check(X: DeltaComplex) -> bool:
    """Orientability by sign propagation, cross-checked against H_m rank."""
    rep = check_pseudomanifold(X)
    if not rep.is_pseudomanifold:
        raise ComplexError("complex fails P1-P3")
    betti, _ = homology_rank(X, X.dim)
    if rep.orientable != (betti == 1):
        raise ComplexError("orientation disagrees with top homology rank")
    return rep.orientable


# ------------------------------------------------------------------ homology

def homology_rank(X: DeltaComplex, k: int) -> Tuple[int, List[Chain]]:
    """Rational Betti number and cycles spanning H_k."""
    if not 0 <= k <= X.dim:
        raise ComplexError(f"degree {k} outside 0..{X.dim}")
    n = X.count(k)
    dk = boundary_matrix(X, k) if k >= 1 else []
    if k >= 1 and X.count(k - 1) == 0:
        dk = []
    cycles = linalg.nullspace(dk, n) if dk else linalg.nullspace([], n)
    dk1 = boundary_matrix(X, k + 1)
    bcols = linalg.transpose(dk1) if X.count(k + 1) else []
    span = [list(b) for b in bcols]
    r = linalg.rank(span) if span else 0
    basis: List[Chain] = []
    for z in cycles:
        trial = span + [z]
        r2 = linalg.rank(trial)
        if r2 > r:
            span, r = trial, r2
            basis.append(Chain.from_dense(k, z))
    return len(basis), basis


def betti_numbers(X: DeltaComplex) -> List[int]:
    return [homology_rank(X, k)[0] for k in range(X.dim + 1)]


def euler_characteristic(X: DeltaComplex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(X.counts()))


# ------------------------------------------------------- subdivision / gluing

def barycentric_subdivide(X: DeltaComplex) -> DeltaComplex:
    """Barycentric subdivision; each k-simplex splits into (k+1)! pieces.

    A new j-simplex is (k, i, flag) with flag a strictly increasing chain of
    vertex-position subsets of simplex (k, i) ending at the full set. Dropping
    the last flag member re-expresses the rest inside the corresponding face.
    """
    table: List[Dict[tuple, int]] = [dict() for _ in range(X.dim + 1)]
    faces: List[List[Tuple[int, ...]]] = [[] for _ in range(X.dim + 1)]
    names: List[List[str]] = [[] for _ in range(X.dim + 1)]

    def canon(k: int, i: int, flag: Tuple[Tuple[int, ...], ...]):
        """Normalize so the flag's top is the full simplex."""
        top = flag[-1]
        if len(top) == k + 1:
            return (k, i, flag)
        sub = X.subface(k, i, top)
        pos = {v: p for p, v in enumerate(top)}
        new_flag = tuple(tuple(pos[v] for v in s) for s in flag)
        return (len(top) - 1, sub, new_flag)

    def get(key) -> int:
        j = len(key[2]) - 1
        if key in table[j]:
            return table[j][key]
        k, i, flag = key
        if j == 0:
            fs: Tuple[int, ...] = ()
        else:
            fl = []
            for drop in range(j + 1):
                rest = flag[:drop] + flag[drop + 1:]
                fl.append(get(canon(k, i, rest)))
            fs = tuple(fl)
        idx = len(faces[j])
        faces[j].append(fs)
        names[j].append(f"b{j}_{idx}")
        table[j][key] = idx
        return idx

    for k in range(X.dim + 1):
        full = tuple(range(k + 1))
        for i in range(X.count(k)):
            for perm in itertools.permutations(full):
                flag = tuple(tuple(sorted(perm[:r])) for r in range(1, k + 2))
                get((k, i, flag))
    return DeltaComplex(faces, names)


def disjoint_union(X1: DeltaComplex, X2: DeltaComplex, prefixes=("L.", "R.")) -> DeltaComplex:
    dim = max(X1.dim, X2.dim)
    faces, names = [], []
    for k in range(dim + 1):
        off = X1.count(k - 1) if k >= 1 else 0
        f1 = list(X1.faces[k]) if k <= X1.dim else []
        f2 = [tuple(f + off for f in fs) for fs in X2.faces[k]] if k <= X2.dim else []
        n1 = [prefixes[0] + n for n in X1.names[k]] if k <= X1.dim else []
        n2 = [prefixes[1] + n for n in X2.names[k]] if k <= X2.dim else []
        faces.append(f1 + f2)
        names.append(n1 + n2)
    return DeltaComplex(faces, names)


def wedge(X1: DeltaComplex, v1: int, X2: DeltaComplex, v2: int) -> DeltaComplex:
    """Disjoint union with vertex v2 of X2 identified to vertex v1 of X1."""
    if not 0 <= v1 < X1.count(0) or not 0 <= v2 < X2.count(0):
        raise ComplexError("invalid vertex id for wedge")
    U = disjoint_union(X1, X2)
    n1 = X1.count(0)
    src, dst = n1 + v2, v1
    remap = {}
    j = 0
    for i in range(U.count(0)):
        if i == src:
            continue
        remap[i] = j
        j += 1
    remap[src] = remap[dst]
    faces = [list(U.faces[0][:-1])] + [list(l) for l in U.faces[1:]]
    names = [[n for i, n in enumerate(U.names[0]) if i != src]] + [list(l) for l in U.names[1:]]
    if len(faces) > 1:
        faces[1] = [tuple(remap[f] for f in fs) for fs in faces[1]]
    return DeltaComplex(faces, names)


def components(X: DeltaComplex) -> List[List[int]]:
    """Vertex sets of connected components."""
    n = X.count(0)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if X.dim >= 1:
        for a, b in X.faces[1]:
            parent[find(a)] = find(b)
    groups: Dict[int, List[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return list(groups.values())


def restrict(X: DeltaComplex, vertex_set: Iterable[int]) -> DeltaComplex:
    """Subcomplex of all simplices whose vertices lie in ``vertex_set``."""
    vs = set(vertex_set)
    keep = [[i for i in range(X.count(0)) if i in vs]]
    for k in range(1, X.dim + 1):
        keep.append([i for i in range(X.count(k)) if set(X.vertices_of(k, i)) <= vs])
    while len(keep) > 1 and not keep[-1]:
        keep.pop()
    faces, names = [], []
    for k, idxs in enumerate(keep):
        re = {old: new for new, old in enumerate(keep[k - 1])} if k else {}
        faces.append([tuple(re[f] for f in X.faces[k][i]) for i in idxs])
        names.append([X.names[k][i] for i in idxs])
    return DeltaComplex(faces, names)


# --------------------------------------------------------------- examples

def circle() -> DeltaComplex:
    return parse_complex("dim 1\nvertex v\nsimplex 1 a : v v\n")


def rose(n: int) -> DeltaComplex:
    lines = ["dim 1", "vertex v"] + [f"simplex 1 a{i} : v v" for i in range(n)]
    return parse_complex("\n".join(lines))


def standard_simplex(n: int) -> DeltaComplex:
    """The n-simplex with all of its faces, vertices named 0..n."""
    faces: List[List[Tuple[int, ...]]] = []
    names: List[List[str]] = []
    index: List[Dict[Tuple[int, ...], int]] = []
    for k in range(n + 1):
        subsets = list(itertools.combinations(range(n + 1), k + 1))
        index.append({s: i for i, s in enumerate(subsets)})
        names.append(["".join(map(str, s)) for s in subsets])
        if k == 0:
            faces.append([()] * len(subsets))
        else:
            faces.append([tuple(index[k - 1][s[:j] + s[j + 1:]] for j in range(k + 1))
                          for s in subsets])
    return DeltaComplex(faces, names)


def torus() -> DeltaComplex:
    """One vertex, edges a, b, c (diagonal), triangles U, L."""
    return parse_complex("""dim 2
vertex v
simplex 1 a : v v
simplex 1 b : v v
simplex 1 c : v v
simplex 2 U : b c a
simplex 2 L : a c b
""")


def pillow() -> DeltaComplex:
    """Two triangles glued along all three edges (a 2-sphere)."""
    return parse_complex("""dim 2
vertex v0
vertex v1
vertex v2
simplex 1 e01 : v1 v0
simplex 1 e02 : v2 v0
simplex 1 e12 : v2 v1
simplex 2 T1 : e12 e02 e01
simplex 2 T2 : e12 e02 e01
""")


def projective_plane() -> DeltaComplex:
    """Two-triangle Delta-complex structure on RP^2."""
    return parse_complex("""dim 2
vertex v
vertex w
simplex 1 a : w v
simplex 1 b : w v
simplex 1 c : v v
simplex 2 U : a b c
simplex 2 L : b a c
""")


def genus2() -> DeltaComplex:
    """One-vertex genus-2 surface: octagon abAB cdCD fanned into 6 triangles."""
    # octagon corners P0..P7, side s_i from P_i to P_(i+1)
    word = [("a", 1), ("b", 1), ("a", -1), ("b", -1), ("c", 1), ("d", 1), ("c", -1), ("d", -1)]
    lines = ["dim 2", "vertex v"]
    lines += [f"simplex 1 {x} : v v" for x in "abcd"]
    lines += [f"simplex 1 e{k} : v v" for k in range(2, 7)]

    def edge(i, j):
        """Name and orientation-from-i-to-j of the edge between corners i<->j."""
        if j == (i + 1) % 8:
            name, sgn = word[i]
            return name, sgn
        if i == (j + 1) % 8:
            name, sgn = word[j]
            return name, -sgn
        if i == 0:
            return f"e{j}", 1
        if j == 0:
            return f"e{i}", -1
        raise AssertionError

    for k in range(1, 7):
        x, y = k, k + 1
        _, s = edge(x, y)
        order = (0, x, y) if s == 1 else (0, y, x)
        p0, p1, p2 = order
        f0 = edge(p1, p2)[0]
        f1 = edge(p0, p2)[0]
        f2 = edge(p0, p1)[0]
        lines.append(f"simplex 2 T{k} : {f0} {f1} {f2}")
    return parse_complex("\n".join(lines))


def cone(X: DeltaComplex, apex: str = "apex") -> DeltaComplex:
    """Cone on X; apex is the last vertex of every cone simplex."""
    m = X.dim
    faces = [list(l) for l in X.faces] + [[]]
    names = [list(l) for l in X.names] + [[]]
    faces[0].append(())
    names[0].append(apex)
    a = X.count(0)
    cone_idx: List[Dict[int, int]] = [dict() for _ in range(m + 1)]
    for k in range(m + 1):
        for i in range(X.count(k)):
            if k == 0:
                fs = (a, i)
            else:
                fs = tuple(cone_idx[k - 1][f] for f in X.faces[k][i]) + (i,)
            cone_idx[k][i] = len(faces[k + 1])
            faces[k + 1].append(fs)
            names[k + 1].append(f"C({X.names[k][i]})")
    return DeltaComplex(faces, names)
