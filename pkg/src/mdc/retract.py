"""Metric points, the straight-line retraction onto the sprouted interior, and the genus-one embedding.

All lengths are :class:`fractions.Fraction`.  A :class:`MetricPoint` has
strictly positive lengths summing to one; :func:`flow_raw` accepts
non-negative lengths so that a point of a face can be fed through the
larger cell, which is how gluing coherence is tested.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from mdc.errors import DomainError, StructureError
from mdc.genus_one import AlignedGraph, canonical_subdivision, contraction_radius, tree_order
from mdc.graph import DecoratedGraph, canonical_form, contract_edges, genus, one_ends, sprout

__all__ = [
    "MetricPoint",
    "DualPoint",
    "metric_point",
    "canonical_alignment",
    "core_distances",
    "in_Z",
    "flow",
    "flow_raw",
    "sprout_point",
    "retract_target",
    "embed_dual",
    "project_to_dual",
    "random_metric_point",
    "random_dual_point",
    "parse_rational",
    "format_rational",
]


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise StructureError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise StructureError(f"rationals must be 'p/q' strings, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise StructureError(f"not a rational: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MetricPoint:
    graph: DecoratedGraph
    lengths: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths", tuple(Fraction(x) for x in self.lengths))
        if len(self.lengths) != self.graph.num_edges:
            raise StructureError("one length per edge is required")
        if self.graph.num_edges == 0:
            raise StructureError("a metric point needs at least one edge")
        if any(x <= 0 for x in self.lengths):
            raise StructureError("edge lengths must be strictly positive")
        if sum(self.lengths) != 1:
            raise StructureError(f"edge lengths sum to {sum(self.lengths)}, not 1")

    def key(self) -> bytes:
        """Isomorphism-invariant identity of the metric graph."""
        return canonical_form(self.graph, edge_colors=self.lengths).encoding

    def same_point(self, other: "MetricPoint") -> bool:
        return self.key() == other.key()

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "lengths": {str(i): format_rational(x) for i, x in enumerate(self.lengths)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "MetricPoint":
        try:
            graph = DecoratedGraph.from_json(data["graph"])
            raw = data["lengths"]
            lengths = [parse_rational(raw[str(i)]) for i in range(graph.num_edges)]
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed point JSON: {exc!r}") from exc
        return cls(graph, tuple(lengths))


def metric_point(G: DecoratedGraph, lengths: Sequence[Fraction], normalise: bool = True) -> MetricPoint:
    """Contract zero-length edges and (optionally) rescale to total length one."""
    lengths = [Fraction(x) for x in lengths]
    if any(x < 0 for x in lengths):
        raise DomainError("edge lengths must be non-negative")
    res = contract_edges(G, [i for i, x in enumerate(lengths) if x == 0])
    kept = [x for x in lengths if x != 0]
    total = sum(kept)
    if total == 0:
        raise DomainError("all edge lengths vanish")
    if normalise:
        kept = [x / total for x in kept]
    return MetricPoint(res.graph, tuple(kept))


@dataclass(frozen=True)
class DualPoint:
    """A point of a genus-one cell: lengths on the core edges and on the levels ``1..k``."""

    aligned: AlignedGraph
    core_lengths: tuple[Fraction, ...]
    level_lengths: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "core_lengths", tuple(Fraction(x) for x in self.core_lengths))
        object.__setattr__(self, "level_lengths", tuple(Fraction(x) for x in self.level_lengths))
        AG = self.aligned
        if len(self.core_lengths) != len(AG.core_edges) or len(self.level_lengths) != AG.k:
            raise StructureError("need one length per core edge and per level")
        values = self.core_lengths + self.level_lengths
        if not values:
            raise StructureError("a dual point needs at least one label")
        if any(x <= 0 for x in values):
            raise StructureError("lengths must be strictly positive")
        if sum(values) != 1:
            raise StructureError(f"lengths sum to {sum(values)}, not 1")
        if AG.graph.d == 0 or contraction_radius(AG)[1] <= 1:
            raise DomainError("the aligned graph does not have d_min > 1")

    def to_json(self) -> dict:
        lengths = {str(e): format_rational(x) for e, x in zip(self.aligned.core_edges, self.core_lengths)}
        for j, x in enumerate(self.level_lengths, start=1):
            lengths[f"L{j}"] = format_rational(x)
        return {"graph": self.aligned.to_json(), "lengths": lengths}

    @classmethod
    def from_json(cls, data: dict) -> "DualPoint":
        try:
            AG = AlignedGraph.from_json(data["graph"])
            raw = data["lengths"]
            core_l = [parse_rational(raw[str(e)]) for e in AG.core_edges]
            level_l = [parse_rational(raw[f"L{j}"]) for j in range(1, AG.k + 1)]
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed dual point JSON: {exc!r}") from exc
        return cls(AG, tuple(core_l), tuple(level_l))


# ---------------------------------------------------------------------------
# distances and Z


def core_distances(G: DecoratedGraph, lengths: Sequence[Fraction]) -> list[Fraction]:
    """Distance of every vertex from the core along its tree path."""
    order = tree_order(G)
    dist: list[Fraction | None] = [None] * G.num_vertices
    for v in order.core.vertices:
        dist[v] = Fraction(0)

    def walk(v: int) -> Fraction:
        if dist[v] is None:
            dist[v] = walk(order.parent[v]) + lengths[order.parent_edge[v]]
        return dist[v]

    return [walk(v) for v in range(G.num_vertices)]


def canonical_alignment(P: MetricPoint) -> AlignedGraph:
    """Levels are the ranks of the distinct core distances."""
    if genus(P.graph) != 1:
        raise DomainError("canonical alignments exist only in genus one")
    dist = core_distances(P.graph, P.lengths)
    ranks = {x: i for i, x in enumerate(sorted(set(dist) | {Fraction(0)}))}
    return AlignedGraph(P.graph, tuple(ranks[x] for x in dist))


def in_Z(P: MetricPoint) -> bool:
    AG = canonical_alignment(P)
    if P.graph.d == 0:
        raise DomainError("Z is defined for positive degree")
    return contraction_radius(AG)[1] > 1


# ---------------------------------------------------------------------------
# the retraction


def _check_flow_domain(G: DecoratedGraph) -> None:
    g, n, d = genus(G), G.n, G.d
    if d <= 0:
        raise DomainError("the retraction needs positive degree")
    if g == 0 and n + d < 3:
        raise DomainError(
            f"(g, n, d) = ({g}, {n}, {d}): the sprouted interior graph is unstable, no retraction target"
        )


def sprout_point(G: DecoratedGraph, lengths: Sequence[Fraction]) -> tuple[DecoratedGraph, list[Fraction]]:
    """The sprouting of ``G`` with ``lengths`` extended by zero on the new edges."""
    S = sprout(G)
    return S, list(lengths) + [Fraction(0)] * (S.num_edges - G.num_edges)


def _flowed_lengths(G: DecoratedGraph, lengths: Sequence[Fraction], t: Fraction) -> tuple[DecoratedGraph, list[Fraction]]:
    _check_flow_domain(G)
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise DomainError(f"time {t} is outside [0, 1]")
    S, ell = sprout_point(G, lengths)
    ends = one_ends(S)
    d = G.d
    return S, [(1 - t) * x + (t / d if e in ends else 0) for e, x in enumerate(ell)]


def flow_raw(G: DecoratedGraph, lengths: Sequence[Fraction], t: Fraction) -> MetricPoint:
    """The retraction at time ``t`` for non-negative lengths of total one."""
    lengths = [Fraction(x) for x in lengths]
    if sum(lengths) != 1 or any(x < 0 for x in lengths):
        raise DomainError("lengths must be non-negative with total 1")
    S, ell = _flowed_lengths(G, lengths, t)
    return metric_point(S, ell)


def flow(P: MetricPoint, t: Fraction) -> MetricPoint:
    return flow_raw(P.graph, P.lengths, t)


def retract_target(g: int, n: int, d: int) -> MetricPoint:
    """The sprouted interior graph with uniform lengths ``1/d``."""
    G = DecoratedGraph(
        (g,) + (0,) * d,
        (0,) + (1,) * d,
        (frozenset(range(1, n + 1)),) + (frozenset(),) * d,
        tuple((0, j) for j in range(1, d + 1)),
        n,
    )
    _check_flow_domain(G)
    return MetricPoint(G, (Fraction(1, d),) * d)


# ---------------------------------------------------------------------------
# the genus-one embedding


def embed_dual(Q: DualPoint) -> MetricPoint:
    """Spread each level length evenly over its fiber and add up along subdivided edges."""
    AG = Q.aligned
    sub = canonical_subdivision(AG)
    fiber = sub.fiber_sizes
    lengths = [Fraction(0)] * AG.graph.num_edges
    for e, x in zip(AG.core_edges, Q.core_lengths):
        lengths[e] = x
    for seg, m in enumerate(sub.path_edge):
        if m is not None:
            lengths[sub.origin[seg]] += Q.level_lengths[m - 1] / fiber[m]
    return MetricPoint(AG.graph, tuple(lengths))


def project_to_dual(P: MetricPoint) -> DualPoint:
    if not in_Z(P):
        raise DomainError("the point is not in Z (d_min of its canonical alignment is at most 1)")
    AG = canonical_alignment(P)
    dist = core_distances(P.graph, P.lengths)
    shell = [Fraction(0)] * (AG.k + 1)
    for v, lv in enumerate(AG.levels):
        shell[lv] = dist[v]
    fiber = canonical_subdivision(AG).fiber_sizes
    levels = tuple((shell[m] - shell[m - 1]) * fiber[m] for m in range(1, AG.k + 1))
    return DualPoint(AG, tuple(P.lengths[e] for e in AG.core_edges), levels)


# ---------------------------------------------------------------------------
# samplers


def _random_simplex_point(rng: random.Random, size: int, max_numerator: int) -> list[Fraction]:
    raw = [rng.randint(1, max_numerator) for _ in range(size)]
    total = sum(raw)
    return [Fraction(x, total) for x in raw]


def random_metric_point(
    graphs: Sequence[DecoratedGraph], rng: random.Random, max_numerator: int = 12
) -> MetricPoint:
    G = rng.choice([H for H in graphs if H.num_edges > 0])
    return MetricPoint(G, tuple(_random_simplex_point(rng, G.num_edges, max_numerator)))


def random_dual_point(
    aligned: Sequence[AlignedGraph], rng: random.Random, max_numerator: int = 12
) -> DualPoint:
    AG = rng.choice([A for A in aligned if len(A.core_edges) + A.k > 0])
    values = _random_simplex_point(rng, len(AG.core_edges) + AG.k, max_numerator)
    a = len(AG.core_edges)
    return DualPoint(AG, tuple(values[:a]), tuple(values[a:]))

