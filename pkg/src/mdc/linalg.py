"""Exact rank of sparse integer matrices.

Matrices are dicts ``{(row, col): value}`` with integer (or integral
``Fraction``) entries.  Rank over Q is computed by fraction-free Gaussian
elimination on sparse rows; after every row operation the row is divided by
the gcd of its entries, which keeps coefficients small for boundary matrices
whose entries are mostly +-1.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Mapping

SparseMatrix = Mapping[tuple[int, int], int]


def _as_int(x) -> int:
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError("rank expects integral entries; clear denominators first")
        return x.numerator
    return int(x)


def _normalise(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def rank(entries: SparseMatrix) -> int:
    """Rank over Q of a sparse integer matrix."""
    rows: dict[int, dict[int, int]] = {}
    for (r, c), v in entries.items():
        v = _as_int(v)
        if v:
            row = rows.setdefault(r, {})
            row[c] = row.get(c, 0) + v
    work = [_normalise({c: v for c, v in row.items() if v}) for row in rows.values()]
    work = [row for row in work if row]
    pivots: dict[int, dict[int, int]] = {}
    age: dict[int, int] = {}
    # short rows with unit entries first keeps fill-in low
    work.sort(key=lambda row: (len(row), min(abs(v) for v in row.values())))
    for row in work:
        while row:
            hits = [c for c in row if c in pivots]
            if not hits:
                break
            # eliminating the oldest pivot first guarantees termination
            c = min(hits, key=age.__getitem__)
            prow = pivots[c]
            a, b = prow[c], row[c]
            new = {k: a * v for k, v in row.items()}
            for k, v in prow.items():
                new[k] = new.get(k, 0) - b * v
            row = _normalise({k: v for k, v in new.items() if v})
        if row:
            col = min(row, key=lambda k: (abs(row[k]) != 1, k))
            pivots[col] = row
            age[col] = len(age)
    return len(pivots)


def to_dense(entries: SparseMatrix, shape: tuple[int, int]) -> list[list[int]]:
    out = [[0] * shape[1] for _ in range(shape[0])]
    for (r, c), v in entries.items():
        out[r][c] += _as_int(v)
    return out


def matmul(a: SparseMatrix, b: SparseMatrix) -> dict[tuple[int, int], int]:
    """Sparse product ``a @ b``."""
    by_row: dict[int, list[tuple[int, int]]] = {}
    for (k, j), v in b.items():
        by_row.setdefault(k, []).append((j, v))
    out: dict[tuple[int, int], int] = {}
    for (i, k), v in a.items():
        for j, w in by_row.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + v * w
    return {key: v for key, v in out.items() if v}
