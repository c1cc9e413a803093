"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also echoed to the terminal when output is captured.
"""

import pytest

from mdc import verify

from oracles import sign_pattern_dependency

SAMPLES = 1000
SEED = 0


@pytest.fixture
def report(capsys):
    def emit(number, result):
        with capsys.disabled():
            print(f"\ncriterion {number}: {result.line()}")
        return result

    return emit


@pytest.fixture(scope="module")
def complexes():
    return [(name, X) for name, X, _ in verify.grid_complexes()]


def test_criterion_1_genus0_contractible(report):
    r = report(1, verify.check_contractibility(verify.GENUS0_GRID, 0, limit_seconds=120.0))
    assert r.passed, r.details
    assert r.seconds < 15 * 60


def test_criterion_2_genus1_contractible(report):
    r = report(2, verify.check_contractibility(verify.GENUS1_GRID, 1, limit_seconds=600.0))
    assert r.passed, r.details


def test_criterion_3_euler_characteristic(report, complexes):
    r = report(3, verify.check_euler(complexes))
    assert r.passed, r.details


def test_criterion_4_chain_complex_soundness(report, complexes):
    r = report(4, verify.check_soundness(complexes))
    assert r.passed, r.details


def test_criterion_5_retract_invariants(report):
    r = report(5, verify.check_retract(samples=SAMPLES, seed=SEED))
    assert r.passed, r.details[:10]


def test_criterion_6_embedding_round_trip(report):
    r = report(6, verify.check_embedding(samples=SAMPLES, seed=SEED))
    assert r.passed, r.details


def test_criterion_7_dmin_monotone(report):
    r = report(7, verify.check_dmin_monotone())
    assert r.passed, r.details


def test_criterion_8_tangent_predicates(report):
    dep = report(8, verify.check_dependency_exhaustive(oracle=sign_pattern_dependency))
    fib = report(8, verify.check_fiber_witness(draws=10_000, seed=SEED))
    assert dep.passed, dep.details
    assert fib.passed, fib.details


def test_criterion_9_edge_bound_sharp(report):
    r = report(9, verify.check_edge_bound())
    assert r.passed, r.details
