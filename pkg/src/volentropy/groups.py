"""Group elements used as covering voltages.

Free-group words are tuples of nonzero ints: ``k`` is generator ``x_k`` and
``-k`` its inverse. Permutations are tuples ``p`` with ``p[i]`` the image of
``i``. 2x2 matrices mod N are flat tuples ``(a, b, c, d)``.
"""
from __future__ import annotations

import re
from typing import Dict, Iterable, List, Sequence, Tuple

Word = Tuple[int, ...]
Perm = Tuple[int, ...]


# ---------------------------------------------------------------- free groups

def free_reduce(word: Iterable[int]) -> Word:
    out: List[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def free_mul(a: Word, b: Word) -> Word:
    i = 0
    n = min(len(a), len(b))
    while i < n and a[len(a) - 1 - i] == -b[i]:
        i += 1
    return a[:len(a) - i] + b[i:]


def free_inv(a: Word) -> Word:
    return tuple(-x for x in reversed(a))


_TOKEN = re.compile(r"^x?(\d+)(\^-1)?$")


def parse_word(text: str) -> Word:
    """Parse ``x1 x2^-1 x1`` (``1`` or empty for the identity)."""
    out = []
    for tok in text.replace("*", " ").split():
        if tok in ("1", "e"):
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad free-group letter {tok!r}")
        k = int(m.group(1))
        if k < 1:
            raise ValueError("generators are numbered from 1")
        out.append(-k if m.group(2) else k)
    return free_reduce(out)


def format_word(w: Word) -> str:
    if not w:
        return "1"
    return " ".join(f"x{abs(x)}" + ("^-1" if x < 0 else "") for x in w)


def subgroup_rank(words: Sequence[Word]) -> int:
    """Rank of the subgroup of a free group generated by ``words``.

    Stallings folding: wedge the words as labelled loops at a base vertex and
    fold edges with equal labels out of a common vertex until deterministic;
    the rank is the cycle rank of the folded graph.
    """
    edges: set = set()  # (u, label, v) with label > 0
    n = 1
    for w in words:
        w = free_reduce(w)
        if not w:
            continue
        cur = 0
        for i, x in enumerate(w):
            nxt = 0 if i == len(w) - 1 else n
            if nxt:
                n += 1
            if x > 0:
                edges.add((cur, x, nxt))
            else:
                edges.add((nxt, -x, cur))
            cur = nxt
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    changed = True
    while changed:
        changed = False
        edges = {(find(u), l, find(v)) for u, l, v in edges}
        out: Dict[Tuple[int, int], int] = {}
        for u, l, v in sorted(edges):
            for key, tgt in (((u, l), v), ((v, -l), u)):
                if key in out and out[key] != tgt:
                    a, b = find(out[key]), find(tgt)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
                        changed = True
                else:
                    out[key] = tgt
            if changed:
                break
    edges = {(find(u), l, find(v)) for u, l, v in edges}
    verts = {find(0)} | {u for u, _, _ in edges} | {v for _, _, v in edges}
    return len(edges) - len(verts) + 1


# --------------------------------------------------------------- permutations

def perm_mul(p: Perm, q: Perm) -> Perm:
    """Apply p then q (right action, matching path concatenation)."""
    return tuple(q[i] for i in p)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_identity(n: int) -> Perm:
    return tuple(range(n))


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse cycle notation such as ``(0 1 2)(3 4)``; ``()`` is the identity."""
    img = list(range(degree))
    text = text.strip()
    if text in ("", "()", "1", "e"):
        return tuple(img)
    for body in re.findall(r"\(([^()]*)\)", text):
        pts = [int(x) for x in body.replace(",", " ").split()]
        if any(not 0 <= x < degree for x in pts):
            raise ValueError(f"point out of range in cycle {body!r}")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    if sorted(img) != list(range(degree)):
        raise ValueError(f"not a permutation: {text!r}")
    return tuple(img)


def format_cycles(p: Perm) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


# ------------------------------------------------------------ matrices mod N

def mat_mul_mod(a, b, n: int):
    return ((a[0] * b[0] + a[1] * b[2]) % n, (a[0] * b[1] + a[1] * b[3]) % n,
            (a[2] * b[0] + a[3] * b[2]) % n, (a[2] * b[1] + a[3] * b[3]) % n)


def mat_inv_mod(a, n: int):
    det = (a[0] * a[3] - a[1] * a[2]) % n
    dinv = pow(det, -1, n)
    return ((a[3] * dinv) % n, (-a[1] * dinv) % n, (-a[2] * dinv) % n, (a[0] * dinv) % n)


def mat_identity():
    return (1, 0, 0, 1)
