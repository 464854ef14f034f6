"""Exact integer / rational matrix helpers (lists of lists, no floats)."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence[int | Fraction]]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination with row pivoting."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return 0
    nrows, ncols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, nrows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            f = a[i][col]
            row_i, row_r = a[i], a[rank]
            for j in range(col + 1, ncols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def leading_principal_minors(rows: Sequence[Sequence[int]]) -> list[int]:
    """All leading principal minors of a square integer matrix.

    Bareiss elimination without pivoting: the k-th pivot is the k-th minor.
    Stops (returning the minors so far plus 0) at the first vanishing one.
    """
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    minors = []
    prev = 1
    for k in range(n):
        p = a[k][k]
        minors.append(p)
        if p == 0:
            break
        for i in range(k + 1, n):
            row_i, row_k = a[i], a[k]
            f = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (p * row_i[j] - f * row_k[j]) // prev
        prev = p
    return minors


def inverse(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse over Q; raises ZeroDivisionError if singular."""
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def schur_complement(m: Matrix, k: int) -> Matrix:
    """``M / M[:k, :k] = D - C A^{-1} B`` by eliminating the first ``k`` pivots in place.

    No pivoting; a zero leading pivot raises ZeroDivisionError.
    """
    a = [list(row) for row in m]
    n = len(a)
    for p in range(k):
        piv = a[p][p]
        if piv == 0:
            raise ZeroDivisionError(f"zero pivot at position {p}")
        row_p = a[p]
        for i in range(p + 1, n):
            f = a[i][p]
            if f == 0:
                continue
            f = f / piv
            row_i = a[i]
            for j in range(p + 1, n):
                if row_p[j]:
                    row_i[j] -= f * row_p[j]
            row_i[p] = Fraction(0)
    return [row[k:] for row in a[k:]]


def schur_sequence(m: Matrix, cuts: Sequence[int]) -> list[Matrix]:
    """Trailing blocks ``M / M[:k, :k]`` for each ``k`` in increasing ``cuts``.

    One elimination pass; the snapshot at ``k`` is taken after the first
    ``k`` pivots have been eliminated.
    """
    a = [list(row) for row in m]
    n = len(a)
    out = []
    done = 0
    for k in cuts:
        if k < done or k > n:
            raise ValueError("cuts must be increasing and within the matrix")
        for p in range(done, k):
            piv = a[p][p]
            if piv == 0:
                raise ZeroDivisionError(f"zero pivot at position {p}")
            row_p = a[p]
            for i in range(p + 1, n):
                f = a[i][p]
                if f == 0:
                    continue
                f = f / piv
                row_i = a[i]
                for j in range(p + 1, n):
                    if row_p[j]:
                        row_i[j] -= f * row_p[j]
                row_i[p] = Fraction(0)
        done = k
        out.append([row[k:] for row in a[k:]])
    return out
