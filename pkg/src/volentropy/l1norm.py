"""l1 norms of homology classes on a fixed complex.

All minima here range over simplicial chains of one given complex, so they are
upper bounds for the corresponding singular quantities. The LP is

    minimize  sum(u) + sum(w)
    subject to u - w - d(y+) + d(y-) = c0,   u, w, y+, y- >= 0,

whose optimal ``u - w`` is the l1-shortest cycle homologous to ``c0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import lp
from .complex import (Chain, ComplexError, DeltaComplex, boundary, boundary_matrix,
                      check_pseudomanifold, components, homology_rank, restrict)
from .linalg import smith_normal_form

ILP_CAP = 64


class CertificateError(AssertionError):
    """A dual certificate failed to validate."""


@dataclass
class NormProblem:
    X: DeltaComplex
    c0: Chain
    ring: str = "rat"

    def __post_init__(self):
        if self.ring not in ("int", "rat"):
            raise ValueError("ring must be 'int' or 'rat'")
        if self.c0.degree > self.X.dim:
            raise ComplexError("cycle degree exceeds complex dimension")
        if self.c0.degree >= 1 and not boundary(self.c0, self.X).is_zero():
            raise ComplexError("representative is not a cycle")
        if self.ring == "int" and any(c.denominator != 1 for c in self.c0.coeffs.values()):
            raise ValueError("integral problem needs integer coefficients")

    @property
    def degree(self) -> int:
        return self.c0.degree


@dataclass
class NormResult:
    value: Fraction
    chain: Chain
    certificate: Optional[List[Fraction]] = None
    tag: str = "lp-dual"
    nodes: int = 1


def _lp_data(p: NormProblem):
    m = p.degree
    n = p.X.count(m)
    q = p.X.count(m + 1) if m + 1 <= p.X.dim else 0
    D = boundary_matrix(p.X, m + 1) if q else [[] for _ in range(n)]
    A = []
    for i in range(n):
        row = [Fraction(0)] * (2 * n + 2 * q)
        row[i] = Fraction(1)
        row[n + i] = Fraction(-1)
        for j in range(q):
            row[2 * n + j] = -D[i][j]
            row[2 * n + q + j] = D[i][j]
        A.append(row)
    cost = [Fraction(1)] * (2 * n) + [Fraction(0)] * (2 * q)
    return A, p.c0.dense(n), cost, n


def _result_chain(x: Sequence[Fraction], n: int, m: int) -> Chain:
    return Chain.from_dense(m, [x[i] - x[n + i] for i in range(n)])


def l1_lp(p: NormProblem) -> NormResult:
    A, b, cost, n = _lp_data(p)
    res = lp.solve_lp(cost, A, b)
    if res.status != lp.OPTIMAL:
        raise RuntimeError(f"l1 LP ended {res.status}")
    chain = _result_chain(res.x, n, p.degree)
    if res.value == 0:
        return NormResult(Fraction(0), chain, None, "zero-class")
    alpha = [y / res.value for y in res.duals]
    return NormResult(res.value, chain, alpha, "lp-dual")


def l1_ilp(p: NormProblem, cap: int = ILP_CAP) -> NormResult:
    if p.X.count(p.degree) > cap:
        raise ValueError(f"complex has more than {cap} top simplices")
    if any(c.denominator != 1 for c in p.c0.coeffs.values()):
        raise ValueError("integral problem needs integer coefficients")
    A, b, cost, n = _lp_data(p)
    nv = len(cost)
    A, b, cost = _box(A, b, cost, n, _integral_bounds(p, n))
    res = lp.solve_ilp(cost, A, b)
    if res.status != lp.OPTIMAL:
        raise RuntimeError(f"l1 ILP ended {res.status}")
    return NormResult(res.value, _result_chain(res.x[:nv], n, p.degree), None,
                      "branch-and-bound", res.nodes)


def _integral_bounds(p: NormProblem, n: int) -> Tuple[int, int]:
    """Box sizes (chain, filling) that keep some integral optimum feasible.

    An optimal cycle z has |z|_1 <= |c0|_1. For it, z - c0 = d(y) has an
    integral solution y read off the Smith form U D V = S, whose entries are
    bounded by max row sum of |V| times max |U| times |z - c0|_1.
    """
    c1 = int(p.c0.l1())
    m = p.degree
    if m + 1 > p.X.dim or p.X.count(m + 1) == 0:
        return c1, 0
    D = boundary_matrix(p.X, m + 1)
    U, _, V = smith_normal_form([[int(v) for v in row] for row in D], p.X.count(m + 1))
    umax = max((abs(v) for row in U for v in row), default=1)
    vrow = max((sum(abs(v) for v in row) for row in V), default=1)
    return c1, vrow * umax * 2 * c1


def _box(A, b, cost, n: int, bounds: Tuple[int, int]):
    """Append x_j + s_j = bound rows for every variable."""
    zc, zy = bounds
    nv = len(cost)
    ub = [zc] * (2 * n) + [zy] * (nv - 2 * n)
    zero = Fraction(0)
    rows = [list(r) + [zero] * nv for r in A]
    for j in range(nv):
        row = [zero] * (2 * nv)
        row[j] = Fraction(1)
        row[nv + j] = Fraction(1)
        rows.append(row)
    return rows, list(b) + [Fraction(u) for u in ub], list(cost) + [zero] * nv


def dual_certificate_check(r: NormResult, p: NormProblem, strict: bool = False) -> bool:
    """Exact check: <alpha, c0> = 1, alpha kills boundaries, value * |alpha|_inf = 1.

    A zero-value result passes vacuously. With ``strict`` a failure raises.
    """
    if r.value == 0:
        return True
    m = p.degree
    n = p.X.count(m)
    alpha = r.certificate
    ok = alpha is not None and len(alpha) == n
    if ok:
        c0 = p.c0.dense(n)
        pairing = sum((a * c for a, c in zip(alpha, c0)), Fraction(0))
        ok = pairing == 1
    if ok and m + 1 <= p.X.dim:
        for fs in p.X.faces[m + 1]:
            s = Fraction(0)
            for j, f in enumerate(fs):
                s += alpha[f] if j % 2 == 0 else -alpha[f]
            if s != 0:
                ok = False
                break
    if ok:
        ok = r.value * max(abs(a) for a in alpha) == 1
    if not ok and strict:
        raise CertificateError("dual certificate failed")
    return ok


# --------------------------------------------------------------- complexity

def kappa_of_cycle(P: DeltaComplex) -> int:
    """Top-simplex count of a geometric cycle (orientable pseudomanifold components)."""
    m = P.dim
    for verts in components(P):
        part = restrict(P, verts)
        if part.dim != m:
            raise ComplexError("component of lower dimension")
        rep = check_pseudomanifold(part)
        if not rep.is_pseudomanifold:
            raise ComplexError(f"not a pseudomanifold: {rep.failures}")
        if not rep.orientable:
            raise ComplexError("component is not orientable")
    return P.count(m)


@dataclass
class StableSequence:
    samples: List[Tuple[int, Fraction]]
    estimate: Fraction
    ratios: List[Fraction] = field(default_factory=list)


def fekete_estimate(samples: Sequence[Tuple[int, object]]) -> StableSequence:
    """inf f(n)/n over samples, after checking f(a+b) <= f(a) + f(b) on sampled triples."""
    if not samples:
        raise ValueError("no samples")
    table: Dict[int, Fraction] = {}
    for n, v in samples:
        if n < 1:
            raise ValueError("sample index must be positive")
        table[int(n)] = Fraction(v)
    for a in table:
        for b in table:
            if a <= b and a + b in table and table[a + b] > table[a] + table[b]:
                raise ValueError(f"subadditivity fails at {a} + {b}")
    pts = sorted(table.items())
    ratios = [v / n for n, v in pts]
    return StableSequence(pts, min(ratios), ratios)


# ------------------------------------------------------------- rationalizing

def rationalize_cycle(c: Sequence[float], X: DeltaComplex, eps: float, degree: int,
                      tol: float = 1e-4) -> Chain:
    """Rational cycle homologous to (the class of) a real near-cycle, within (m+2) eps in l1.

    Writes c = sum a_i z_i + d(y) by least squares, rounds the class
    coordinates to nearby rationals and each entry of y by less than
    eps / (2 len(y)), and returns the rational cycle sum a_i' z_i + d(y').
    """
    m = degree
    n = X.count(m)
    if len(c) != n:
        raise ValueError("chain length does not match the complex")
    if all(isinstance(v, (int, Fraction)) for v in c):
        exact = Chain.from_dense(m, c)
        if m == 0 or boundary(exact, X).is_zero():
            return exact
    cf = np.array([float(v) for v in c])
    if m >= 1:
        dm = np.array(boundary_matrix(X, m), dtype=float).reshape(X.count(m - 1), n)
        if np.abs(dm @ cf).sum() > tol * (1 + np.abs(cf).sum()):
            raise ValueError("input is not approximately a cycle")
    _, basis = homology_rank(X, m)
    q = X.count(m + 1) if m + 1 <= X.dim else 0
    Z = np.array([[float(v) for v in z.dense(n)] for z in basis]).reshape(len(basis), n).T
    Bf = boundary_matrix(X, m + 1) if q else []
    B = np.array(Bf, dtype=float).reshape(n, q)
    M = np.hstack([Z, B])
    sol = np.linalg.lstsq(M, cf, rcond=None)[0] if M.size else np.zeros(0)
    a, y = sol[:len(basis)], sol[len(basis):]
    out = [Fraction(0)] * n
    for ai, z in zip(a, basis):
        ar = Fraction(float(ai)).limit_denominator(10 ** 6)
        for i, v in z.coeffs.items():
            out[i] += ar * v
    if q:
        N = math.ceil(2 * q / eps)
        yr = [Fraction(round(float(v) * N), N) for v in y]
        for j in range(q):
            if yr[j]:
                for i in range(n):
                    if Bf[i][j]:
                        out[i] += Bf[i][j] * yr[j]
    return Chain.from_dense(m, out)
