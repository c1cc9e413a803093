"""The desk-scale acceptance suite.

Each ``check_*`` function runs one criterion and returns a
:class:`CriterionResult`; :func:`run_suite` runs them all.  Exact
arithmetic throughout, so every comparison is an equality.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from mdc.complex import (
    SymmetricDeltaComplex,
    betti,
    build_genus1_complex,
    build_virtual_complex,
    chain_complex,
    check_boundary_squared,
    check_face_identities,
    euler_characteristic,
    euler_from_homology,
)
from mdc.enumeration import EnumerationRequest, aligned_graphs, all_aligned_graphs, stable_graphs
from mdc.genus_one import contract_core_edge, contraction_radius, radial_merge
from mdc.graph import contract_edges, one_end_vertices
from mdc.retract import (
    canonical_alignment,
    core_distances,
    embed_dual,
    flow,
    flow_raw,
    in_Z,
    project_to_dual,
    random_dual_point,
    random_metric_point,
    retract_target,
    sprout_point,
)
from mdc.tangent import derivative_at_marked_point, fiber_witness, has_basepoint, has_nonvanishing_dependency

log = logging.getLogger(__name__)

GENUS0_GRID = ((2, 1), (3, 1), (4, 1), (1, 2), (2, 2), (3, 2), (0, 3), (1, 3))
GENUS1_GRID = ((1, 2), (2, 2), (1, 3))
FLOW_TIMES = tuple(Fraction(*x) for x in ((1, 7), (1, 3), (1, 2), (5, 7), (9, 10)))


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.details[0]})" if self.details else ""
        return f"[{status}] {self.name}{extra} [{self.seconds:.1f}s]"


def _timed(name: str, body: Callable[[list[str]], bool]) -> CriterionResult:
    start = time.perf_counter()
    details: list[str] = []
    passed = body(details)
    return CriterionResult(name, passed, details, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# homology


def grid_complexes(genus0=GENUS0_GRID, genus1=GENUS1_GRID) -> Iterable[tuple[str, SymmetricDeltaComplex, float]]:
    for n, d in genus0:
        t = time.perf_counter()
        X = build_virtual_complex(0, n, d)
        yield f"vir(0,{n},{d})", X, time.perf_counter() - t
    for n, d in genus1:
        t = time.perf_counter()
        X = build_genus1_complex(n, d)
        yield f"g1({n},{d})", X, time.perf_counter() - t


def check_contractibility(grid: Sequence[tuple[int, int]], genus_: int, limit_seconds: float) -> CriterionResult:
    def body(details: list[str]) -> bool:
        ok = True
        for n, d in grid:
            t = time.perf_counter()
            X = build_virtual_complex(0, n, d) if genus_ == 0 else build_genus1_complex(n, d)
            b = betti(chain_complex(X, reduced=True))
            elapsed = time.perf_counter() - t
            good = not any(b.values()) and elapsed < limit_seconds
            if not good:
                ok = False
                details.append(f"({n},{d}): reduced Betti {b} in {elapsed:.1f}s")
        if ok:
            details.append(f"{len(grid)} instances acyclic")
        return ok

    label = "genus 0 reduced Betti numbers vanish" if genus_ == 0 else "genus 1 reduced Betti numbers vanish"
    return _timed(label, body)


def check_euler(complexes: Sequence[tuple[str, SymmetricDeltaComplex]]) -> CriterionResult:
    def body(details: list[str]) -> bool:
        ok = True
        for name, X in complexes:
            if not X.dims:
                continue
            a, b = euler_characteristic(X), euler_from_homology(X)
            if not a == b == 1:
                ok = False
                details.append(f"{name}: chi by cells {a}, by Betti {b}")
        return ok

    return _timed("Euler characteristic is 1 (two ways)", body)


def check_soundness(complexes: Sequence[tuple[str, SymmetricDeltaComplex]]) -> CriterionResult:
    def body(details: list[str]) -> bool:
        ok = True
        for name, X in complexes:
            for reduced in (True, False):
                if not check_boundary_squared(chain_complex(X, reduced)):
                    ok = False
                    details.append(f"{name}: boundary squared is nonzero")
            fails = check_face_identities(X)
            if fails:
                ok = False
                details.append(f"{name}: {fails[0]} (+{len(fails) - 1} more)")
        return ok

    return _timed("boundary squared vanishes and face identities hold", body)


# ---------------------------------------------------------------------------
# retraction


def retract_failures(
    g: int, n: int, d: int, samples: int, rng: random.Random, times: Sequence[Fraction] = FLOW_TIMES
) -> list[str]:
    """Failure messages (tagged ``(a)``..``(e)``) for one instance; empty when all invariants hold."""
    catalog = stable_graphs(EnumerationRequest(g, n, d))
    graphs = [G for G in catalog if G.num_edges > 0]
    target = retract_target(g, n, d)
    fails: list[str] = []
    tag = f"({g},{n},{d})"
    for _ in range(samples):
        P = random_metric_point(graphs, rng)
        if not flow(P, Fraction(0)).same_point(P):
            fails.append(f"{tag} (a) flow(P,0) != P")
        if not flow(P, Fraction(1)).same_point(target):
            fails.append(f"{tag} (b) flow(P,1) is not the sprouted interior")
        # (c): extend a point of a face by zero and flow in the bigger cell
        G = rng.choice(graphs)
        if G.num_edges >= 2:
            e = rng.randrange(G.num_edges)
            face = contract_edges(G, [e])
            Q = random_metric_point([face.graph], rng)
            ext = [Fraction(0)] * G.num_edges
            for i, j in enumerate(face.edge_map):
                if j is not None:
                    ext[i] = Q.lengths[j]
            for t in (Fraction(0), *times, Fraction(1)):
                if not flow_raw(G, ext, t).same_point(flow(Q, t)):
                    fails.append(f"{tag} (c) gluing fails at t={t}")
        if g == 1:
            S, ell0 = sprout_point(P.graph, P.lengths)
            p0 = core_distances(S, ell0)
            leaves = one_end_vertices(S)
            for t in times:
                Pt = flow(P, t)
                if Pt.graph != S:
                    fails.append(f"{tag} (e) flowed graph is not the sprouting at t={t}")
                    continue
                pt = core_distances(Pt.graph, Pt.lengths)
                for v in leaves:
                    if pt[v] != t / d + (1 - t) * p0[v]:
                        fails.append(f"{tag} (e) p_v({t}) mismatch at vertex {v}")
    if g == 1:
        found = 0
        while found < samples:
            P = random_metric_point(graphs, rng)
            if not in_Z(P):
                continue
            found += 1
            base = contraction_radius(canonical_alignment(P))[1]
            for t in times:
                Pt = flow(P, t)
                if not in_Z(Pt):
                    fails.append(f"{tag} (d) flow leaves Z at t={t}")
                elif contraction_radius(canonical_alignment(Pt))[1] < base:
                    fails.append(f"{tag} (d) d_min decreased along the flow at t={t}")
    return fails


def check_retract(samples: int = 1000, seed: int = 0, instances=None, times=FLOW_TIMES) -> CriterionResult:
    if instances is None:
        instances = [(0, n, d) for n, d in GENUS0_GRID] + [(1, n, d) for n, d in GENUS1_GRID]

    def body(details: list[str]) -> bool:
        fails = []
        for k, (g, n, d) in enumerate(instances):
            fails += retract_failures(g, n, d, samples, random.Random(seed * 1000 + k), times)
        details.append(f"{len(fails)} failures over {len(instances)} instances x {samples} points, seed {seed}")
        details += fails[:20]
        return not fails

    return _timed("retract invariants (a)-(e)", body)


def check_embedding(samples: int = 1000, seed: int = 0, grid=GENUS1_GRID) -> CriterionResult:
    def body(details: list[str]) -> bool:
        fails = 0
        for k, (n, d) in enumerate(grid):
            rng = random.Random(seed * 1000 + 500 + k)
            aligned = aligned_graphs(n, d)
            for _ in range(samples):
                Q = random_dual_point(aligned, rng)
                if project_to_dual(embed_dual(Q)) != Q:
                    fails += 1
            graphs = [G for G in stable_graphs(EnumerationRequest(1, n, d)) if G.num_edges > 0]
            found = 0
            while found < samples:
                P = random_metric_point(graphs, rng)
                if in_Z(P):
                    found += 1
                    if embed_dual(project_to_dual(P)) != P:
                        fails += 1
        details.append(f"{fails} round-trip failures, seed {seed}")
        return fails == 0

    return _timed("embed/project round trip", body)


# ---------------------------------------------------------------------------
# combinatorics


def check_dmin_monotone(grid=((1, 1, 2), (1, 2, 2), (1, 1, 3))) -> CriterionResult:
    def body(details: list[str]) -> bool:
        checked = bad = 0
        for g, n, d in grid:
            for AG in all_aligned_graphs(stable_graphs(EnumerationRequest(g, n, d))).values():
                base = AG.d_min
                for i in range(1, AG.k + 1):
                    checked += 1
                    bad += radial_merge(AG, i).d_min < base
                for e in AG.core_edges:
                    checked += 1
                    bad += contract_core_edge(AG, e).d_min < base
        details.append(f"{checked} morphisms checked, {bad} decreases")
        return bad == 0

    return _timed("d_min monotone under merges and core contractions", body)


def check_edge_bound() -> CriterionResult:
    def body(details: list[str]) -> bool:
        ok = True
        for g, grid in ((0, GENUS0_GRID), (1, GENUS1_GRID)):
            for n, d in grid:
                req = EnumerationRequest(g, n, d)
                base = stable_graphs(req).encodings
                wide = stable_graphs(EnumerationRequest(g, n, d, req.bound + 2)).encodings
                if base != wide:
                    ok = False
                    details.append(f"({g},{n},{d}): {len(wide - base)} extra classes")
        return ok

    return _timed("edge bound is sharp (+2 adds nothing)", body)


# ---------------------------------------------------------------------------
# tangent checks


def dependency_by_minors(batch: np.ndarray) -> np.ndarray:
    """Kernel-support case analysis for integer matrices with ``m <= 3`` columns.

    ``batch`` has shape ``(N, dim, m)``.  A nonvanishing dependency exists iff
    the kernel avoids every coordinate hyperplane; the kernel is read off from
    minors: dimension 0 never works, the full space always does, a line works
    iff its spanning vector (signed maximal minors) has full support, and a
    plane in three variables works iff at least two columns are nonzero.
    """
    N, dim, m = batch.shape
    A = batch.astype(np.int64)
    kernel = m - _rank_by_minors(A)
    out = kernel == m
    colnz = np.any(A != 0, axis=1)
    if m == 2:
        line = kernel == 1
        out |= line & colnz.all(axis=1)
    if m == 3:
        out |= (kernel == 2) & (colnz.sum(axis=1) >= 2)
        line = np.zeros(N, dtype=bool)
        for r1, r2 in itertools.combinations(range(dim), 2):
            a, b = A[:, r1, :], A[:, r2, :]
            cross = np.stack(
                [
                    a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
                    a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
                    a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
                ],
                axis=1,
            )
            found = (kernel == 1) & ~line & np.any(cross != 0, axis=1)
            out |= found & np.all(cross != 0, axis=1)
            line |= found
    return out


def _det(A: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    if len(rows) == 1:
        return A[:, rows[0], cols[0]]
    total = np.zeros(A.shape[0], dtype=np.int64)
    for j, c in enumerate(cols):
        rest = [x for x in cols if x != c]
        total += (-1) ** j * A[:, rows[0], c] * _det(A, rows[1:], rest)
    return total


def _rank_by_minors(A: np.ndarray) -> np.ndarray:
    N, dim, m = A.shape
    rank = np.zeros(N, dtype=np.int64)
    for size in range(1, min(dim, m) + 1):
        nonzero = np.zeros(N, dtype=bool)
        for rows in itertools.combinations(range(dim), size):
            for cols in itertools.combinations(range(m), size):
                nonzero |= _det(A, rows, cols) != 0
        rank[nonzero] = size
    return rank


def _all_matrices(dim: int, m: int, values=range(-2, 3)) -> np.ndarray:
    vals = np.array(list(values), dtype=np.int64)
    grids = np.meshgrid(*([vals] * (dim * m)), indexing="ij")
    flat = np.stack([x.ravel() for x in grids], axis=1)
    return flat.reshape(-1, m, dim).transpose(0, 2, 1)


def check_dependency_exhaustive(oracle: Callable[[np.ndarray], np.ndarray] = dependency_by_minors) -> CriterionResult:
    def body(details: list[str]) -> bool:
        total = bad = 0
        for dim in (1, 2, 3):
            for m in (1, 2, 3):
                batch = _all_matrices(dim, m)
                expected = oracle(batch)
                for A, want in zip(batch.tolist(), expected.tolist()):
                    vectors = [[A[r][c] for r in range(dim)] for c in range(m)]
                    if has_nonvanishing_dependency(vectors) != want:
                        bad += 1
                        if bad <= 5:
                            details.append(f"disagreement on columns {vectors}")
                total += len(batch)
        details.insert(0, f"{total} instances, {bad} disagreements")
        return bad == 0

    return _timed("non-vanishing dependency vs sign-pattern oracle", body)


def check_fiber_witness(draws: int = 10_000, seed: int = 0) -> CriterionResult:
    def body(details: list[str]) -> bool:
        rng = random.Random(seed)
        bad = nones = 0
        for _ in range(draws):
            d, r = rng.randint(1, 4), rng.randint(1, 3)
            v = [Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(r + 1)]
            zero = len(set(v)) == 1
            R = fiber_witness(v, d, r)
            if R is None:
                nones += 1
                bad += not (d == 1 and zero)
                continue
            if d == 1 and zero:
                bad += 1
            elif derivative_at_marked_point(R) != tuple(x - v[0] for x in v) or has_basepoint(R):
                bad += 1
        details.append(f"{draws} draws, {nones} without witness, {bad} failures, seed {seed}")
        return bad == 0

    return _timed("fiber witness exists unless d=1 and v=0", body)


# ---------------------------------------------------------------------------


def run_suite(samples: int = 1000, seed: int = 0, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []

    def record(r: CriterionResult) -> None:
        results.append(r)
        if echo is not None:
            echo(r.line())

    record(check_contractibility(GENUS0_GRID, 0, 120.0))
    record(check_contractibility(GENUS1_GRID, 1, 600.0))
    complexes = [(name, X) for name, X, _ in grid_complexes()]
    record(check_euler(complexes))
    record(check_soundness(complexes))
    record(check_retract(samples, seed))
    record(check_embedding(samples, seed))
    record(check_dmin_monotone())
    record(check_dependency_exhaustive())
    record(check_fiber_witness(seed=seed))
    record(check_edge_bound())
    return results


__all__ = [
    "CriterionResult",
    "GENUS0_GRID",
    "GENUS1_GRID",
    "FLOW_TIMES",
    "run_suite",
    "grid_complexes",
    "check_contractibility",
    "check_euler",
    "check_soundness",
    "check_retract",
    "retract_failures",
    "check_embedding",
    "check_dmin_monotone",
    "check_dependency_exhaustive",
    "check_fiber_witness",
    "check_edge_bound",
    "dependency_by_minors",
]
