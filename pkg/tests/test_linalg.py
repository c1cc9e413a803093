import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mdc.linalg import matmul, rank, to_dense

from oracles import sympy_rank


def test_small_examples():
    assert rank({}) == 0
    assert rank({(0, 0): 1}) == 1
    assert rank({(0, 0): 1, (0, 1): 1, (1, 0): 2, (1, 1): 2}) == 1
    assert rank({(0, 0): 2, (1, 1): 3, (2, 0): 4, (2, 1): 6}) == 2


def test_integral_fractions_accepted():
    assert rank({(0, 0): Fraction(2), (1, 0): Fraction(4)}) == 1
    with pytest.raises(ValueError):
        rank({(0, 0): Fraction(1, 2)})


def test_dense_and_product():
    a = {(0, 0): 1, (1, 1): 2}
    b = {(0, 1): 3, (1, 0): -1}
    assert to_dense(matmul(a, b), (2, 2)) == [[0, 3], [-2, 0]]


sparse = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 9).flatmap(
        lambda c: st.tuples(
            st.just((r, c)),
            st.dictionaries(st.tuples(st.integers(0, r - 1), st.integers(0, c - 1)), st.integers(-3, 3), max_size=r * c),
        )
    )
)


@settings(max_examples=300, deadline=None)
@given(sparse)
def test_rank_matches_sympy(case):
    shape, entries = case
    entries = {k: v for k, v in entries.items() if v}
    assert rank(entries) == sympy_rank(entries, shape)


def test_boundary_like_matrices():
    rng = random.Random(3)
    for _ in range(100):
        r, c = rng.randint(5, 25), rng.randint(5, 25)
        entries = {}
        for col in range(c):
            for row in rng.sample(range(r), rng.randint(0, 4)):
                entries[(row, col)] = rng.choice([-1, 1, 2])
        assert rank(entries) == sympy_rank(entries, (r, c))


def test_rank_of_transpose():
    rng = random.Random(4)
    for _ in range(50):
        entries = {(rng.randrange(8), rng.randrange(6)): rng.randint(-5, 5) for _ in range(20)}
        entries = {k: v for k, v in entries.items() if v}
        assert rank(entries) == rank({(c, r): v for (r, c), v in entries.items()})
