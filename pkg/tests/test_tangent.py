import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdc.errors import DomainError, StructureError
from mdc.tangent import (
    RootTuple,
    derivative_at_marked_point,
    fiber_witness,
    has_basepoint,
    has_nonvanishing_dependency,
    integer_rank,
    normalise_class,
)

from oracles import random_kernel_dependency, sign_pattern_dependency


def test_derivative_examples():
    assert derivative_at_marked_point(RootTuple(((2,), (3,)))) == (0, -1)
    assert not any(derivative_at_marked_point(RootTuple(((1, -1), (2, -2), (0, 0)))))
    assert not any(derivative_at_marked_point(RootTuple(((5,), (5,)))))


def test_root_tuple_validation():
    with pytest.raises(StructureError):
        RootTuple(((1,),))
    with pytest.raises(StructureError):
        RootTuple(((1,), (1, 2)))
    assert RootTuple(((F(1, 2),), (3,))).to_json() == {"roots": [["1/2"], ["3/1"]]}


def test_basepoint_examples():
    assert has_basepoint(RootTuple(((1, 2), (1, 3))))
    assert not has_basepoint(RootTuple(((1, 2), (3, 4))))
    assert has_basepoint(RootTuple(((7,), (7,))))


def test_normalise_class():
    assert normalise_class([3, 4, 5]) == (0, 1, 2)
    with pytest.raises(DomainError):
        normalise_class([])


def test_fiber_witness_examples():
    R = fiber_witness([0, 1], 1, 1)
    assert R is not None and not has_basepoint(R)
    assert set(R.roots[0]) != set(R.roots[1])
    assert fiber_witness([0, 0], 1, 1) is None
    R = fiber_witness([0, 0], 2, 1)
    assert R is not None and not has_basepoint(R)
    assert not any(derivative_at_marked_point(R))


def test_fiber_witness_errors():
    with pytest.raises(DomainError):
        fiber_witness([0, 1, 2], 2, 1)
    with pytest.raises(DomainError):
        fiber_witness([0, 1], 0, 1)


vectors = st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=2, max_size=4)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4), vectors, st.fractions(min_value=-5, max_value=5, max_denominator=4))
def test_fiber_witness_is_valid(d, v, shift):
    r = len(v) - 1
    R = fiber_witness(v, d, r)
    target = normalise_class(v)
    if d == 1 and not any(target):
        assert R is None
        return
    assert R is not None
    assert (R.d, R.r) == (d, r)
    assert not has_basepoint(R)
    assert derivative_at_marked_point(R) == target
    # the class only depends on v modulo the diagonal
    assert fiber_witness([x + shift for x in v], d, r) == R


def test_dependency_examples():
    assert not has_nonvanishing_dependency([(1, 0), (0, 1)])
    assert has_nonvanishing_dependency([(1, 0), (0, 1), (1, 1)])
    assert has_nonvanishing_dependency([(2, -1, 3), (-2, 1, -3)])
    assert has_nonvanishing_dependency([(F(1, 2), 1), (-1, -2)])


def test_dependency_errors():
    with pytest.raises(DomainError):
        has_nonvanishing_dependency([])
    with pytest.raises(DomainError):
        has_nonvanishing_dependency([(1, 0), (1,)])


def test_single_nonzero_vector_has_no_dependency():
    # with one vector the only dependency is a*v = 0, forcing a = 0
    for v in [(1,), (0, 2), (F(1, 3), -1, 4)]:
        assert not has_nonvanishing_dependency([v])
    assert has_nonvanishing_dependency([(0, 0)])


int_matrix = st.integers(1, 3).flatmap(
    lambda dim: st.lists(st.lists(st.integers(-3, 3), min_size=dim, max_size=dim), min_size=1, max_size=4)
)


@settings(max_examples=300, deadline=None)
@given(int_matrix, st.randoms(use_true_random=False), st.lists(st.sampled_from([-3, -1, 2, 5]), min_size=4, max_size=4))
def test_dependency_invariances(vs, rnd, scales):
    base = has_nonvanishing_dependency(vs)
    shuffled = list(vs)
    rnd.shuffle(shuffled)
    assert has_nonvanishing_dependency(shuffled) == base
    scaled = [[s * x for x in v] for v, s in zip(vs, scales)]
    assert has_nonvanishing_dependency(scaled) == base
    fractional = [[F(x, 7) for x in v] for v in vs]
    assert has_nonvanishing_dependency(fractional) == base


def test_dependency_against_random_kernel_oracle():
    rng = random.Random(0)
    for _ in range(10000):
        dim = rng.randint(1, 3)
        m = rng.randint(1, 4)
        vs = [[rng.randint(-2, 2) for _ in range(dim)] for _ in range(m)]
        assert has_nonvanishing_dependency(vs) == random_kernel_dependency(vs, rng), vs


def test_dependency_against_sign_pattern_oracle():
    rng = np.random.default_rng(1)
    batch = rng.integers(-3, 4, size=(2000, 3, 4))
    expected = sign_pattern_dependency(batch)
    for k in range(len(batch)):
        vs = batch[k].T.tolist()
        assert has_nonvanishing_dependency(vs) == bool(expected[k])


def test_integer_rank():
    assert integer_rank([]) == 0
    assert integer_rank([[0, 0]]) == 0
    assert integer_rank([[1, 2], [2, 4]]) == 1
    assert integer_rank([[1, 2, 3], [0, 1, 1], [1, 3, 4]]) == 2
