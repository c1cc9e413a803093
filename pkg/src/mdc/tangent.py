"""Tangent directions at the marked point, over Q.

For a tuple of monic degree-``d`` polynomials with root multisets
``R_0..R_r`` the derivative at the point ``[1 : ... : 1]`` is the class of
``(-sum R_0, ..., -sum R_r)`` modulo the diagonal.  Classes are represented
by the vector whose first coordinate is zero.

Both predicates below are rank conditions, hence unchanged by extending
scalars from Q to C; working over the rationals is exact and faithful.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from mdc.errors import DomainError, StructureError

__all__ = [
    "RootTuple",
    "derivative_at_marked_point",
    "has_basepoint",
    "fiber_witness",
    "has_nonvanishing_dependency",
    "normalise_class",
    "integer_rank",
]


@dataclass(frozen=True)
class RootTuple:
    roots: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        roots = tuple(tuple(Fraction(x) for x in R) for R in self.roots)
        object.__setattr__(self, "roots", roots)
        if len(roots) < 2:
            raise StructureError("a root tuple needs r + 1 >= 2 multisets")
        if len({len(R) for R in roots}) != 1 or not roots[0]:
            raise StructureError("every multiset must have the same positive size d")

    @property
    def d(self) -> int:
        return len(self.roots[0])

    @property
    def r(self) -> int:
        return len(self.roots) - 1

    def to_json(self) -> dict:
        return {"roots": [[f"{x.numerator}/{x.denominator}" for x in R] for R in self.roots]}


def normalise_class(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Representative of ``v`` modulo the diagonal with first coordinate zero."""
    v = [Fraction(x) for x in v]
    if not v:
        raise DomainError("empty vector")
    return tuple(x - v[0] for x in v)


def derivative_at_marked_point(R: RootTuple) -> tuple[Fraction, ...]:
    return normalise_class([-sum(Ri) for Ri in R.roots])


def has_basepoint(R: RootTuple) -> bool:
    common = set(R.roots[0])
    for Ri in R.roots[1:]:
        common &= set(Ri)
    return bool(common)


def fiber_witness(v: Sequence[Fraction], d: int, r: int) -> RootTuple | None:
    """A basepoint-free root tuple with derivative ``v``, or ``None`` if none exists.

    ``R_i = {-u_i, 0, ..., 0}`` for ``i >= 1``; ``R_0`` is a zero-sum set of
    distinct nonzero multiples of one scale, chosen to miss every common root
    of ``R_1..R_r``.  With ``d = 1`` everything is forced and the only
    obstruction is ``v = 0``.
    """
    if d < 1 or r < 1:
        raise DomainError("need d >= 1 and r >= 1")
    u = normalise_class(v)
    if len(u) != r + 1:
        raise DomainError(f"vector has {len(u)} coordinates, expected r + 1 = {r + 1}")
    if d == 1:
        if not any(u):
            return None
        return RootTuple(tuple((-x,) for x in u))
    rest = [(-u[i],) + (Fraction(0),) * (d - 1) for i in range(1, r + 1)]
    common = set(rest[0])
    for Ri in rest[1:]:
        common &= set(Ri)
    base = list(range(1, d)) + [-(d * (d - 1)) // 2]
    scale = 1
    while any(Fraction(scale * b) in common for b in base):
        scale += 1
    R0 = tuple(Fraction(scale * b) for b in base)
    return RootTuple((R0, *rest))


def integer_rank(rows: list[list[int]]) -> int:
    """Rank of a small dense integer matrix by fraction-free elimination."""
    M = [list(row) for row in rows if any(row)]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        p = M[rank]
        for i in range(rank + 1, len(M)):
            a = M[i][c]
            if a:
                M[i] = [p[c] * x - a * y for x, y in zip(M[i], p)]
        rank += 1
        if rank == len(M):
            break
    return rank


def _integral_columns(vectors: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each vector to a primitive integer vector; scaling does not change the predicate."""
    out = []
    for v in vectors:
        if all(type(x) is int for x in v):
            out.append(list(v))
            continue
        fr = [Fraction(x) for x in v]
        den = lcm(*(x.denominator for x in fr)) if fr else 1
        ints = [int(x * den) for x in fr]
        g = gcd(*ints) if ints else 0
        out.append([x // g for x in ints] if g > 1 else ints)
    return out


def has_nonvanishing_dependency(vectors: Sequence[Sequence[Fraction]]) -> bool:
    """Whether ``sum a_i v_i = 0`` for some scalars ``a_i`` that are all nonzero.

    True iff no coordinate hyperplane contains the kernel of the matrix with
    columns ``v_i``, i.e. iff dropping any single column keeps the rank.
    """
    if not vectors:
        raise DomainError("need at least one vector")
    dim = len(vectors[0])
    if dim < 1 or any(len(v) != dim for v in vectors):
        raise DomainError("vectors must share a positive ambient dimension")
    cols = _integral_columns(vectors)
    # rank is computed on the transpose: rows are the vectors themselves
    full = integer_rank(cols)
    if full == len(cols):
        return False
    for i in range(len(cols)):
        if integer_rank(cols[:i] + cols[i + 1 :]) != full:
            return False
    return True
