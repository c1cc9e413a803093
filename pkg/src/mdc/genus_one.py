"""Genus-one combinatorics: cores, radial alignments, subdivisions and merges.

A radial alignment of a genus-one graph is a surjective level function
``rho: V -> {0, ..., k}`` with the core at level 0 that strictly increases
along every tree edge oriented away from the core.  Radial merges play the
role of edge contractions for aligned graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import NamedTuple

from mdc.errors import DomainError, StructureError
from mdc.graph import (
    CanonicalForm,
    DecoratedGraph,
    canonical_form,
    contract_edges,
    genus,
    is_stable,
)

__all__ = [
    "Core",
    "TreeOrder",
    "AlignedGraph",
    "SubdividedGraph",
    "core",
    "tree_order",
    "enumerate_alignments",
    "canonical_subdivision",
    "subdivision_at_radius",
    "radial_merge",
    "contract_core_edge",
    "contraction_radius",
    "in_tilde_category",
    "canonical_aligned",
    "CRITERIA",
]

CRITERIA = ("dmin", "rad-aware")


class Core(NamedTuple):
    vertices: frozenset[int]
    edges: frozenset[int]


def core(G: DecoratedGraph) -> Core:
    """The minimal genus-one subgraph: the weight-one vertex or the unique cycle."""
    if genus(G) != 1:
        raise DomainError("the core is only defined for genus-one graphs")
    for v, w in enumerate(G.weights):
        if w == 1:
            return Core(frozenset([v]), frozenset())
    alive_v = set(range(G.num_vertices))
    alive_e = set(range(G.num_edges))
    deg = [G.valence(v) for v in range(G.num_vertices)]
    queue = deque(v for v in alive_v if deg[v] <= 1)
    while queue:
        v = queue.popleft()
        if v not in alive_v:
            continue
        alive_v.discard(v)
        for e in list(alive_e):
            a, b = G.edges[e]
            if a == v or b == v:
                alive_e.discard(e)
                other = b if a == v else a
                deg[other] -= 1
                if other in alive_v and deg[other] <= 1:
                    queue.append(other)
    return Core(frozenset(alive_v), frozenset(alive_e))


@dataclass(frozen=True)
class TreeOrder:
    """The canonical partial order on a genus-one graph.

    ``parent[v]`` is the neighbour of tree vertex ``v`` on its path to the
    core and ``parent_edge[v]`` the edge joining them; core vertices map to
    ``None``.
    """

    core: Core
    parent: tuple[int | None, ...]
    parent_edge: tuple[int | None, ...]

    def is_tree(self, v: int) -> bool:
        return v not in self.core.vertices

    def less(self, v: int, w: int) -> bool:
        """``v < w``: core below tree, and ancestors below descendants."""
        if not self.is_tree(w):
            return False
        if not self.is_tree(v):
            return True
        x = self.parent[w]
        while x is not None:
            if x == v:
                return True
            x = self.parent[x]
        return False

    def oriented(self, G: DecoratedGraph, e: int) -> tuple[int, int]:
        """Tree edge ``e`` as ``(towards core, away from core)``."""
        u, v = G.edges[e]
        return (u, v) if self.parent_edge[v] == e else (v, u)


def tree_order(G: DecoratedGraph) -> TreeOrder:
    c = core(G)
    parent: list[int | None] = [None] * G.num_vertices
    parent_edge: list[int | None] = [None] * G.num_vertices
    seen = set(c.vertices)
    queue = deque(sorted(c.vertices))
    while queue:
        v = queue.popleft()
        for e, (a, b) in enumerate(G.edges):
            if e in c.edges or (a != v and b != v):
                continue
            other = b if a == v else a
            if other in seen:
                continue
            seen.add(other)
            parent[other] = v
            parent_edge[other] = e
            queue.append(other)
    return TreeOrder(c, tuple(parent), tuple(parent_edge))


@dataclass(frozen=True)
class AlignedGraph:
    """A genus-one graph with a radial alignment ``levels``."""

    graph: DecoratedGraph
    levels: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(int(x) for x in self.levels))
        G = self.graph
        if len(self.levels) != G.num_vertices:
            raise StructureError("one level per vertex is required")
        order = self.order
        k = max(self.levels)
        if set(self.levels) != set(range(k + 1)):
            raise StructureError("the level function must be surjective onto 0..k")
        zero = {v for v, lv in enumerate(self.levels) if lv == 0}
        if zero != set(order.core.vertices):
            raise StructureError("level 0 must be exactly the core")
        for v in range(G.num_vertices):
            p = order.parent[v]
            if p is not None and self.levels[p] >= self.levels[v]:
                raise StructureError("levels must increase away from the core")

    @cached_property
    def order(self) -> TreeOrder:
        return tree_order(self.graph)

    @property
    def k(self) -> int:
        return max(self.levels)

    @property
    def core_vertices(self) -> frozenset[int]:
        return self.order.core.vertices

    @property
    def core_edges(self) -> tuple[int, ...]:
        return tuple(sorted(self.order.core.edges))

    @property
    def tree_edges(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.graph.num_edges) if e not in self.order.core.edges)

    @cached_property
    def level_degrees(self) -> tuple[int, ...]:
        totals = [0] * (self.k + 1)
        for v, lv in enumerate(self.levels):
            totals[lv] += self.graph.degrees[v]
        return tuple(totals)

    @property
    def rad(self) -> int:
        return contraction_radius(self)[0]

    @property
    def d_min(self) -> int:
        return contraction_radius(self)[1]

    def to_json(self) -> dict:
        data = self.graph.to_json()
        data["levels"] = list(self.levels)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "AlignedGraph":
        if "levels" not in data:
            raise StructureError("aligned graph JSON needs a 'levels' array")
        return cls(DecoratedGraph.from_json(data), tuple(data["levels"]))

    def to_dot(self) -> str:
        return self.graph.to_dot(levels=self.levels)


def canonical_aligned(AG: AlignedGraph) -> tuple[CanonicalForm, AlignedGraph]:
    """Canonical form of the pair (graph, levels) and the representative."""
    cf = canonical_form(AG.graph, vertex_colors=AG.levels)
    levels = [0] * len(AG.levels)
    for v, x in enumerate(cf.relabeling.vertex_map):
        levels[x] = AG.levels[v]
    return cf, AlignedGraph(cf.graph, tuple(levels))


def enumerate_alignments(G: DecoratedGraph) -> list[AlignedGraph]:
    """All radial alignments of ``G``.

    Builds ordered set partitions of the tree vertices level by level: each
    new level is a non-empty set of vertices whose parents are already placed.
    """
    order = tree_order(G)
    tree = [v for v in range(G.num_vertices) if order.is_tree(v)]
    children: dict[int, list[int]] = {v: [] for v in range(G.num_vertices)}
    for v in tree:
        children[order.parent[v]].append(v)
    out: list[AlignedGraph] = []
    levels = [0] * G.num_vertices

    def extend(available: frozenset[int], placed: int, k: int) -> None:
        if placed == len(tree):
            out.append(AlignedGraph(G, tuple(levels)))
            return
        pool = sorted(available)
        for size in range(1, len(pool) + 1):
            for block in combinations(pool, size):
                for v in block:
                    levels[v] = k + 1
                freed = [c for v in block for c in children[v]]
                extend((available - set(block)) | frozenset(freed), placed + size, k + 1)

    roots = frozenset(c for v in order.core.vertices for c in children[v])
    extend(roots, 0, 0)
    return out


# ---------------------------------------------------------------------------
# subdivisions


@dataclass(frozen=True)
class SubdividedGraph:
    """A subdivision of an aligned graph with its level map.

    ``kinds[v]`` is ``None`` for vertices of the base graph, ``"bivalent"``
    for inserted weight-0 degree-0 vertices and ``"marking"`` for new leaves
    carrying a relocated marking.  ``origin[e]`` is the base edge a segment
    came from (``None`` for marking leaves); segments of one base edge are
    consecutive and oriented like the base edge.  For the canonical
    subdivision ``path_edge[e]`` is the edge ``m`` of the path ``P_k``
    (joining levels ``m - 1`` and ``m``) a non-core segment lies over.
    """

    graph: DecoratedGraph
    levels: tuple[int, ...]
    kinds: tuple[str | None, ...]
    origin: tuple[int | None, ...]
    path_edge: tuple[int | None, ...]

    @property
    def fiber_sizes(self) -> dict[int, int]:
        sizes: dict[int, int] = {}
        for m in self.path_edge:
            if m is not None:
                sizes[m] = sizes.get(m, 0) + 1
        return dict(sorted(sizes.items()))

    def smooth(self) -> AlignedGraph:
        """Remove synthetic vertices, concatenating edges and restoring markings."""
        G = self.graph
        keep = [v for v in range(G.num_vertices) if self.kinds[v] is None]
        index = {v: i for i, v in enumerate(keep)}
        marks = [set(G.marks[v]) for v in keep]
        chains: dict[int, list[tuple[int, int]]] = {}
        for e, (a, b) in enumerate(G.edges):
            src = self.origin[e]
            if src is None:
                leaf, anchor = (a, b) if self.kinds[a] == "marking" else (b, a)
                marks[index[anchor]] |= G.marks[leaf]
                continue
            chains.setdefault(src, []).append((a, b))
        edges = []
        for src in sorted(chains):
            chain = chains[src]
            edges.append((index[chain[0][0]], index[chain[-1][1]]))
        base = DecoratedGraph(
            tuple(G.weights[v] for v in keep),
            tuple(G.degrees[v] for v in keep),
            tuple(frozenset(m) for m in marks),
            tuple(edges),
            G.n,
        )
        return AlignedGraph(base, tuple(self.levels[v] for v in keep))


class _Builder:
    def __init__(self, AG: AlignedGraph) -> None:
        G = AG.graph
        self.n = G.n
        self.weights = list(G.weights)
        self.degrees = list(G.degrees)
        self.marks = [set(m) for m in G.marks]
        self.levels = list(AG.levels)
        self.kinds: list[str | None] = [None] * G.num_vertices
        self.edges: list[tuple[int, int]] = []
        self.origin: list[int | None] = []
        self.path: list[int | None] = []

    def vertex(self, level: int, kind: str) -> int:
        self.weights.append(0)
        self.degrees.append(0)
        self.marks.append(set())
        self.levels.append(level)
        self.kinds.append(kind)
        return len(self.weights) - 1

    def chain(self, src: int, stops: list[int], path: bool) -> None:
        for a, b in zip(stops, stops[1:]):
            self.edges.append((a, b))
            self.origin.append(src)
            lo, hi = sorted((self.levels[a], self.levels[b]))
            self.path.append(hi if path and hi == lo + 1 else None)

    def build(self) -> SubdividedGraph:
        G = DecoratedGraph(
            tuple(self.weights),
            tuple(self.degrees),
            tuple(frozenset(m) for m in self.marks),
            tuple(self.edges),
            self.n,
        )
        return SubdividedGraph(G, tuple(self.levels), tuple(self.kinds), tuple(self.origin), tuple(self.path))


def canonical_subdivision(AG: AlignedGraph) -> SubdividedGraph:
    """Subdivide each tree edge from level i to level j with j - i - 1 bivalent vertices."""
    G = AG.graph
    b = _Builder(AG)
    core_edges = set(AG.core_edges)
    for e, (u, v) in enumerate(G.edges):
        if e in core_edges:
            b.chain(e, [u, v], path=False)
            continue
        lu, lv = AG.levels[u], AG.levels[v]
        step = 1 if lu < lv else -1
        inner = [b.vertex(lvl, "bivalent") for lvl in range(lu + step, lv, step)]
        b.chain(e, [u, *inner, v], path=True)
    return b.build()


def subdivision_at_radius(AG: AlignedGraph, r: int) -> SubdividedGraph:
    """Subdivide at level ``r``: split crossing edges and push inner markings out to ``r``."""
    if not 1 <= r <= AG.k:
        raise DomainError(f"radius {r} is outside 1..{AG.k}")
    G = AG.graph
    b = _Builder(AG)
    core_edges = set(AG.core_edges)
    for e, (u, v) in enumerate(G.edges):
        lo, hi = sorted((AG.levels[u], AG.levels[v]))
        if e not in core_edges and lo < r < hi:
            b.chain(e, [u, b.vertex(r, "bivalent"), v], path=False)
        else:
            b.chain(e, [u, v], path=False)
    for v in range(G.num_vertices):
        if AG.levels[v] >= r:
            continue
        for label in sorted(G.marks[v]):
            leaf = b.vertex(r, "marking")
            b.marks[v].discard(label)
            b.marks[leaf].add(label)
            b.edges.append((v, leaf))
            b.origin.append(None)
            b.path.append(None)
    return b.build()


# ---------------------------------------------------------------------------
# morphisms


class AlignedContraction(NamedTuple):
    aligned: AlignedGraph
    vertex_map: tuple[int, ...]
    edge_map: tuple[int | None, ...]


def radial_merge_maps(AG: AlignedGraph, i: int) -> AlignedContraction:
    if not 1 <= i <= AG.k:
        raise DomainError(f"merge level {i} is outside 1..{AG.k}")
    G = AG.graph
    S = [
        e
        for e, (u, v) in enumerate(G.edges)
        if {AG.levels[u], AG.levels[v]} == {i - 1, i}
    ]
    res = contract_edges(G, S)
    levels = [0] * res.graph.num_vertices
    for v, x in enumerate(res.vertex_map):
        lv = AG.levels[v]
        levels[x] = lv if lv < i else lv - 1
    try:
        merged = AlignedGraph(res.graph, tuple(levels))
    except StructureError as exc:  # pragma: no cover - guarded by construction
        raise AssertionError(f"radial merge produced an invalid alignment: {exc}") from exc
    if is_stable(G):
        assert is_stable(res.graph), "radial merge broke stability"
    return AlignedContraction(merged, res.vertex_map, res.edge_map)


def radial_merge(AG: AlignedGraph, i: int) -> AlignedGraph:
    """Merge levels ``i - 1`` and ``i`` by contracting every edge between them."""
    return radial_merge_maps(AG, i).aligned


def contract_core_edge_maps(AG: AlignedGraph, e: int) -> AlignedContraction:
    if e not in AG.core_edges:
        raise DomainError(f"edge {e} is not a core edge")
    res = contract_edges(AG.graph, [e])
    levels = [0] * res.graph.num_vertices
    for v, x in enumerate(res.vertex_map):
        levels[x] = AG.levels[v]
    return AlignedContraction(AlignedGraph(res.graph, tuple(levels)), res.vertex_map, res.edge_map)


def contract_core_edge(AG: AlignedGraph, e: int) -> AlignedGraph:
    return contract_core_edge_maps(AG, e).aligned


def contraction_radius(AG: AlignedGraph) -> tuple[int, int]:
    """Least level carrying positive degree, and the degree it carries."""
    for lvl, total in enumerate(AG.level_degrees):
        if total:
            return lvl, total
    raise DomainError("the contraction radius needs positive total degree")


def in_tilde_category(AG: AlignedGraph, criterion: str = "dmin") -> bool:
    """Stratum non-emptiness: ``d_min > 1``.

    ``criterion="rad-aware"`` additionally admits every graph whose core
    carries degree (contraction radius 0).
    """
    if criterion not in CRITERIA:
        raise DomainError(f"unknown criterion {criterion!r}")
    rad, dmin = contraction_radius(AG)
    if criterion == "rad-aware" and rad == 0:
        return True
    return dmin > 1

