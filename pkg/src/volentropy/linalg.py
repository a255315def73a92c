"""Exact linear algebra over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`. Everything here is
small and dense; the complexes we handle have at most a few hundred cells.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(mat: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form. Returns (reduced copy, pivot columns)."""
    a = [row[:] for row in mat]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: Matrix) -> int:
    if not mat or not mat[0]:
        return 0
    return len(rref(mat)[1])


def nullspace(mat: Matrix, ncols: int | None = None) -> List[List[Fraction]]:
    """Basis of {x : mat @ x = 0}, one list per basis vector."""
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    if not mat:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(mat)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(mat: Matrix, rhs: Sequence[Fraction]) -> List[Fraction] | None:
    """One solution of mat @ x = rhs, or None when inconsistent."""
    if not mat:
        return [] if all(b == 0 for b in rhs) else None
    ncols = len(mat[0])
    aug = [row[:] + [Fraction(b)] for row, b in zip(mat, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    return x


def transpose(mat: Matrix, nrows: int | None = None) -> Matrix:
    if not mat:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*mat)]


def det(mat: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        piv = a[c][c]
        result *= piv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def smith_normal_form(mat: Sequence[Sequence[int]], ncols: int | None = None):
    """Integer Smith form with transforms: returns (U, S, V), U*A*V = S.

    U and V are unimodular; S is diagonal with each entry dividing the next.
    """
    A = [[int(v) for v in row] for row in mat]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(M, i, j):
        M[i], M[j] = M[j], M[i]

    def swap_cols(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    def add_row(M, src, dst, k):  # row dst += k * row src
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]

    def add_col(M, src, dst, k):
        for row in M:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(A, t, i); swap_rows(U, t, i)
        swap_cols(A, t, j); swap_cols(V, t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(A, t, i, -q); add_row(U, t, i, -q)
                    if A[i][t]:
                        swap_rows(A, t, i); swap_rows(U, t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(A, t, j, -q); add_col(V, t, j, -q)
                    if A[t][j]:
                        swap_cols(A, t, j); swap_cols(V, t, j)
                        done = False
            if not done:
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                   if A[i][j] % A[t][t]]
            if not bad:
                break
            add_row(A, bad[0][0], t, 1); add_row(U, bad[0][0], t, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return U, A, V
