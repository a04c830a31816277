"""Exact integer-matrix algebra: echelon, kernels, Smith normal form.

Arbitrary-precision Python ints throughout, so Smith reduction cannot
overflow.  Matrices are lists of row lists; desk scale is at most 8x8.
The Smith form is the independent ground-truth oracle for the structure
recovery of cokernels over Z localized at p; the tau-profile route never
calls into it.
"""

from __future__ import annotations

from itertools import combinations
from math import gcd
from typing import Iterable


def _copy(a: Iterable[Iterable[int]]) -> list[list[int]]:
    return [[int(x) for x in row] for row in a]


def int_echelon(a) -> list[list[int]]:
    """Row echelon form over Z via Euclidean row reduction (deterministic)."""
    rows = [r for r in _copy(a) if any(r)]
    if not rows:
        return []
    cols = len(rows[0])
    placed: list[list[int]] = []
    for col in range(cols):
        live = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not live:
            rows = rest
            continue
        # Euclid on the leading entries until one row survives
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            base = live[0]
            out = [base]
            for r in live[1:]:
                q = r[col] // base[col]
                rr = [x - q * y for x, y in zip(r, base)]
                if any(rr):
                    if rr[col] != 0:
                        out.append(rr)
                    else:
                        rest.append(rr)
            live = out
            if len(live) == 1:
                break
        pivot = live[0]
        if pivot[col] < 0:
            pivot = [-x for x in pivot]
        placed.append(pivot)
        rows = [r for r in rest if any(r)]
    return placed


def int_kernel(a) -> list[list[int]]:
    """Basis of {v : v @ a == 0} over Z (rows of the result)."""
    a = _copy(a)
    r = len(a)
    if r == 0:
        return []
    aug = [row + [1 if i == j else 0 for j in range(r)] for i, row in enumerate(a)]
    c = len(a[0])
    ech = int_echelon(aug)
    return [row[c:] for row in ech if not any(row[:c])]


def int_span_intersect(b1, b2) -> list[list[int]]:
    """Basis of rowspan(b1) intersected with rowspan(b2)."""
    b1, b2 = _copy(b1), _copy(b2)
    if not b1 or not b2:
        return []
    k = int_kernel(b1 + b2)
    out = []
    for comb in k:
        v = [0] * len(b1[0])
        for ci, row in zip(comb[: len(b1)], b1):
            for j, x in enumerate(row):
                v[j] += ci * x
        if any(v):
            out.append(v)
    return int_echelon(out)


def fp_rank(a, p: int) -> int:
    """Rank of the matrix over F_p."""
    rows = [[x % p for x in row] for row in _copy(a)]
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    for col in range(cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def smith_form_int(a) -> tuple[list[int], int]:
    """Elementary divisors d1 | d2 | ... and the cokernel free rank.

    Computed through the minor-gcd characterization: the product of the
    first k divisors is the gcd of all k x k minors, each taken by
    fraction-free (Bareiss) elimination.  Naive pivot-and-reduce Smith
    blows its coefficients up catastrophically already on dense 5 x 5
    inputs, while every Bareiss intermediate is a subdeterminant and
    stays Hadamard-bounded; at desk scale (<= 8 x 8) the minor count is
    harmless.  The cokernel is Z^cols / rowspan(a); its free rank is
    cols minus the number of nonzero divisors.
    """
    a = _copy(a)
    nr = len(a)
    nc = len(a[0]) if nr else 0
    divisors: list[int] = []
    g_prev = 1
    for k in range(1, min(nr, nc) + 1):
        g = minor_gcd(a, k)
        if g == 0:
            break
        divisors.append(g // g_prev)
        g_prev = g
    for d1, d2 in zip(divisors, divisors[1:]):
        if d2 % d1:
            raise AssertionError("minor gcds violated the divisibility chain")
    return divisors, nc - len(divisors)


def minor_gcd(a, k: int) -> int:
    """gcd of all k x k minors (0 when none are nonzero)."""
    a = _copy(a)
    nr, nc = len(a), len(a[0]) if a else 0
    g = 0
    for rows in combinations(range(nr), k):
        for cols in combinations(range(nc), k):
            sub = [[a[i][j] for j in cols] for i in rows]
            g = gcd(g, _det(sub))
            if g == 1:
                return 1
    return g


def _det(a: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = _copy(a)
    k = len(a)
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for t in range(k - 1):
        if a[t][t] == 0:
            swap = next((i for i in range(t + 1, k) if a[i][t] != 0), None)
            if swap is None:
                return 0
            a[t], a[swap] = a[swap], a[t]
            sign = -sign
        for i in range(t + 1, k):
            for j in range(t + 1, k):
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
            a[i][t] = 0
        prev = a[t][t]
    return sign * a[k - 1][k - 1]


def valuation_bound(a, p: int) -> int:
    """v with p^v exceeding every minor, so every elementary divisor.

    Uses the crude bound |det| <= prod_i sum_j |a_ij| over any square
    submatrix; certifies where a tau profile must have stabilized.
    """
    bound = 1
    for row in _copy(a):
        s = sum(abs(x) for x in row)
        if s > 1:
            bound *= s
    v = 0
    pw = 1
    while pw <= bound:
        pw *= p
        v += 1
    return v
