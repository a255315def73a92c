"""Exact rational linear and integer programming.

Standard form only: minimize ``c . x`` subject to ``A x = b`` and ``x >= 0``.
Two-phase tableau simplex over :class:`fractions.Fraction` with Bland's rule,
so it terminates and every reported number is exact. Integer programs are
solved by depth-first branch and bound on the most fractional variable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class LPResult:
    status: str
    x: List[Fraction] = field(default_factory=list)
    value: Optional[Fraction] = None
    duals: List[Fraction] = field(default_factory=list)
    nodes: int = 1


def _pivot(T: List[List[Fraction]], r: int, c: int) -> None:
    inv = 1 / T[r][c]
    T[r] = [v * inv for v in T[r]]
    row = T[r]
    for i, other in enumerate(T):
        if i != r and other[c] != 0:
            f = other[c]
            T[i] = [a - f * b for a, b in zip(other, row)]


def _run(T, basis, cost, allowed) -> bool:
    """Simplex iterations on rows of T (last column = rhs). False if unbounded."""
    ncols = len(T[0]) - 1
    while True:
        # reduced costs c_j - c_B B^-1 A_j
        enter = None
        for j in range(ncols):
            if not allowed[j] or j in basis:
                continue
            rc = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)) if T[i][j] != 0)
            if rc < 0:
                enter = j
                break
        if enter is None:
            return True
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, best[1], enter)
        basis[best[1]] = enter


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Minimize c.x subject to A x = b, x >= 0, exactly.

    ``duals`` y satisfy y.A <= c componentwise and y.b = optimal value.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    m = len(A)
    flip = [Fraction(-1) if Fraction(b[i]) < 0 else Fraction(1) for i in range(m)]
    T = []
    for i in range(m):
        row = [Fraction(v) * flip[i] for v in A[i]]
        if len(row) != n:
            raise ValueError("constraint row has wrong width")
        row += [Fraction(int(k == i)) for k in range(m)]
        row.append(Fraction(b[i]) * flip[i])
        T.append(row)
    basis = [n + i for i in range(m)]
    total = n + m
    phase1 = [Fraction(0)] * n + [Fraction(1)] * m
    _run(T, basis, phase1, [True] * total)
    if any(T[i][-1] != 0 for i in range(m) if basis[i] >= n):
        return LPResult(INFEASIBLE)
    # drive zero-level artificials out where possible
    for i in range(m):
        if basis[i] >= n:
            j = next((j for j in range(n) if T[i][j] != 0 and j not in basis), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    cost = c + [Fraction(0)] * m
    allowed = [True] * n + [False] * m
    if not _run(T, basis, cost, allowed):
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    # B^-1 sits in the artificial columns
    duals = []
    for k in range(m):
        y = sum((cost[basis[i]] * T[i][n + k] for i in range(m)), Fraction(0))
        duals.append(y * flip[k])
    return LPResult(OPTIMAL, x, value, duals)


def _fractionality(v: Fraction) -> Fraction:
    f = v - math.floor(v)
    return min(f, 1 - f)


def solve_ilp(c: Sequence, A: Sequence[Sequence], b: Sequence,
              integer: Optional[Iterable[int]] = None, node_limit: int = 100_000) -> LPResult:
    """Minimize c.x over A x = b, x >= 0, x_j integral for j in ``integer`` (default all).

    Branches on the most fractional variable (lowest index on ties), each
    branch adding a bound row with its own slack column.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    integer = list(range(n)) if integer is None else sorted(set(integer))
    best: Optional[LPResult] = None
    nodes = 0
    stack = [[]]  # list of (var, sense, bound); sense +1 means x <= bound
    while stack:
        bounds = stack.pop()
        nodes += 1
        if nodes > node_limit:
            raise RuntimeError("branch and bound node limit reached")
        k = len(bounds)
        cc = c + [Fraction(0)] * k
        AA = [list(map(Fraction, row)) + [Fraction(0)] * k for row in A]
        bb = [Fraction(v) for v in b]
        for t, (j, sense, bound) in enumerate(bounds):
            row = [Fraction(0)] * (n + k)
            row[j] = Fraction(1)
            row[n + t] = Fraction(sense)
            AA.append(row)
            bb.append(Fraction(bound))
        res = solve_lp(cc, AA, bb)
        if res.status == UNBOUNDED:
            return LPResult(UNBOUNDED, nodes=nodes)
        if res.status != OPTIMAL:
            continue
        if best is not None and res.value >= best.value:
            continue
        frac = [(_fractionality(res.x[j]), -j) for j in integer if res.x[j].denominator != 1]
        if not frac:
            best = LPResult(OPTIMAL, res.x[:n], res.value, res.duals[:len(A)])
            continue
        j = -max(frac)[1]
        v = res.x[j]
        stack.append(bounds + [(j, -1, math.ceil(v))])
        stack.append(bounds + [(j, 1, math.floor(v))])
    if best is None:
        return LPResult(INFEASIBLE, nodes=nodes)
    best.nodes = nodes
    return best
