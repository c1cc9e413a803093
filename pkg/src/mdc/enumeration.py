"""Exhaustive generation of stable graphs and of aligned graphs.

Stable ``(g, n, d)``-graphs are generated edge count by edge count from the
one-vertex interior graph by *uncontraction*: adding a loop at a vertex of
positive weight, or splitting a vertex in two and joining the halves by a new
edge.  Contracting any edge of a stable graph gives a stable graph with one
edge fewer, so every stable graph with ``E`` edges is an uncontraction of one
with ``E - 1`` edges and the generation is complete.

Edge bound
----------
A stable graph with ``E >= 1`` edges has ``E <= 2d + n + 3g - 3``.  Write
``V0`` for the degree-zero vertices and ``V+`` for the rest.  A degree-zero
vertex has ``val(v) >= 3 - 2w(v) - |m^-1(v)|`` and a positive-degree vertex
has ``val(v) >= 1``.  Summing, ``2E >= 3|V0| - 2 sum(w) - n + |V+|``.  With
``|V| = E + 1 - g + sum(w)`` this rearranges to
``E <= 2|V+| + n + 3g - 3 - sum(w) <= 2d + n + 3g - 3``.  The default search
bound ``2d + n + 3g - 2`` leaves one level of slack, and the generation stops
as soon as one edge level comes out empty (every later level is then empty
too).
"""

from __future__ import annotations

import json
import logging
import os
import random
import time
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator

from mdc.errors import BudgetExceeded, DomainError
from mdc.genus_one import AlignedGraph, canonical_aligned, enumerate_alignments, in_tilde_category
from mdc.graph import DecoratedGraph, canonical_form, interior_graph, is_stable

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_BUDGET = 2_000_000

__all__ = [
    "EnumerationRequest",
    "GraphCatalog",
    "stable_graphs",
    "aligned_graphs",
    "all_aligned_graphs",
    "uncontractions",
    "edge_bound",
    "default_cache_dir",
]


def edge_bound(g: int, n: int, d: int) -> int:
    return max(0, 2 * d + n + 3 * g - 2)


@dataclass(frozen=True)
class EnumerationRequest:
    g: int
    n: int
    d: int
    max_edges: int | None = None

    def __post_init__(self) -> None:
        if self.g not in (0, 1):
            raise DomainError(f"genus {self.g} is not supported (only 0 and 1)")
        if self.n < 0 or self.d < 0:
            raise DomainError("markings and degree must be non-negative")
        if self.max_edges is not None and self.max_edges < 0:
            raise DomainError("max_edges must be non-negative")

    @property
    def bound(self) -> int:
        return edge_bound(self.g, self.n, self.d) if self.max_edges is None else self.max_edges


@dataclass
class GraphCatalog:
    """Isomorphism classes of stable graphs keyed by canonical encoding."""

    request: EnumerationRequest
    graphs: dict[bytes, DecoratedGraph] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[DecoratedGraph]:
        return iter(self.graphs.values())

    def __contains__(self, G: DecoratedGraph) -> bool:
        return canonical_form(G).encoding in self.graphs

    @property
    def encodings(self) -> frozenset[bytes]:
        return frozenset(self.graphs)

    def by_edges(self) -> dict[int, list[DecoratedGraph]]:
        out: dict[int, list[DecoratedGraph]] = {}
        for G in self.graphs.values():
            out.setdefault(G.num_edges, []).append(G)
        return dict(sorted(out.items()))

    def boundary(self) -> list[DecoratedGraph]:
        return [G for G in self.graphs.values() if G.num_edges > 0]

    def to_json(self) -> dict:
        req = self.request
        return {
            "g": req.g,
            "n": req.n,
            "d": req.d,
            "bound": req.bound,
            "schema": SCHEMA_VERSION,
            "metadata": self.metadata,
            "graphs": [G.to_json() for G in self.graphs.values()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GraphCatalog":
        req = EnumerationRequest(data["g"], data["n"], data["d"], data["bound"])
        cat = cls(req, metadata=dict(data.get("metadata", {})))
        for item in data["graphs"]:
            G = DecoratedGraph.from_json(item)
            cat.graphs[canonical_form(G).encoding] = G
        return cat


def uncontractions(G: DecoratedGraph) -> Iterator[DecoratedGraph]:
    """Every graph with one more edge that contracts onto ``G``."""
    nv = G.num_vertices
    for v in range(nv):
        if G.weights[v] >= 1:
            weights = list(G.weights)
            weights[v] -= 1
            yield DecoratedGraph(tuple(weights), G.degrees, G.marks, G.edges + ((v, v),), G.n)
        halves = G.half_edges_at(v)
        marks = sorted(G.marks[v])
        for hsize in range(len(halves) + 1):
            for moved in combinations(halves, hsize):
                edges = [list(e) for e in G.edges]
                for h in moved:
                    edges[h // 2][h % 2] = nv
                edge_tuple = tuple((a, b) for a, b in edges) + ((v, nv),)
                for msize in range(len(marks) + 1):
                    for mset in combinations(marks, msize):
                        m2 = frozenset(mset)
                        m1 = G.marks[v] - m2
                        for w2 in range(G.weights[v] + 1):
                            for d2 in range(G.degrees[v] + 1):
                                yield DecoratedGraph(
                                    G.weights[:v] + (G.weights[v] - w2,) + G.weights[v + 1 :] + (w2,),
                                    G.degrees[:v] + (G.degrees[v] - d2,) + G.degrees[v + 1 :] + (d2,),
                                    G.marks[:v] + (m1,) + G.marks[v + 1 :] + (m2,),
                                    edge_tuple,
                                    G.n,
                                )


def _locally_stable(G: DecoratedGraph, vertices: Iterable[int]) -> bool:
    for v in vertices:
        if G.degrees[v] == 0 and 2 * G.weights[v] - 2 + G.valence(v) + len(G.marks[v]) <= 0:
            return False
    return True


def default_cache_dir() -> Path:
    return Path(os.environ.get("MDC_CACHE_DIR", Path.home() / ".cache" / "mdc"))


def _cache_path(cache_dir: Path, req: EnumerationRequest) -> Path:
    return Path(cache_dir) / f"stable_g{req.g}_n{req.n}_d{req.d}_E{req.bound}_v{SCHEMA_VERSION}.json"


def stable_graphs(
    req: EnumerationRequest,
    cache_dir: str | os.PathLike | None = None,
    budget: int = DEFAULT_BUDGET,
    shuffle: random.Random | None = None,
) -> GraphCatalog:
    """Isomorphism classes of stable ``(g, n, d)``-graphs with at most ``req.bound`` edges.

    The interior (edgeless) graph is included when it is stable.  ``budget``
    caps the number of candidate graphs examined.  When ``cache_dir`` is given
    the catalog is read from / written to a JSON file keyed by the request.
    ``shuffle`` randomises the work order; the result must not depend on it.
    """
    if cache_dir is not None:
        path = _cache_path(Path(cache_dir), req)
        if path.exists():
            try:
                return GraphCatalog.from_json(json.loads(path.read_text()))
            except (ValueError, KeyError) as exc:
                log.warning("ignoring unreadable cache file %s: %s", path, exc)

    catalog = GraphCatalog(req)
    start = interior_graph(req.g, req.n, req.d)
    level: dict[bytes, DecoratedGraph] = {}
    if is_stable(start):
        level[canonical_form(start).encoding] = canonical_form(start).graph
    catalog.graphs.update(level)
    examined = 0
    max_found = 0
    for edges in range(1, req.bound + 1):
        nxt: dict[bytes, DecoratedGraph] = {}
        work = list(level.values())
        if shuffle is not None:
            shuffle.shuffle(work)
        for G in work:
            candidates = uncontractions(G)
            if shuffle is not None:
                candidates = list(candidates)
                shuffle.shuffle(candidates)
            for H in candidates:
                examined += 1
                if examined > budget:
                    raise BudgetExceeded(f"more than {budget} candidates for {req}")
                touched = range(H.num_vertices) if H.num_vertices == G.num_vertices else (
                    H.edges[-1][0],
                    H.num_vertices - 1,
                )
                if not _locally_stable(H, touched):
                    continue
                cf = canonical_form(H)
                if cf.encoding not in nxt:
                    nxt[cf.encoding] = cf.graph
        if not nxt:
            break
        max_found = edges
        nxt = dict(sorted(nxt.items()))
        catalog.graphs.update(nxt)
        level = nxt
    catalog.metadata = {
        "bound": req.bound,
        "max_edges_found": max_found,
        "candidates": examined,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if cache_dir is not None:
        path = _cache_path(Path(cache_dir), req)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(catalog.to_json()))
        tmp.replace(path)
    return catalog


def all_aligned_graphs(catalog: GraphCatalog) -> dict[bytes, AlignedGraph]:
    """Every radially aligned graph over a genus-one catalog, up to isomorphism."""
    if catalog.request.g != 1:
        raise DomainError("radial alignments need a genus-one catalog")
    out: dict[bytes, AlignedGraph] = {}
    for G in catalog:
        for AG in enumerate_alignments(G):
            cf, rep = canonical_aligned(AG)
            out.setdefault(cf.encoding, rep)
    return out


def aligned_graphs(
    n: int,
    d: int,
    criterion: str = "dmin",
    catalog: GraphCatalog | None = None,
    cache_dir: str | os.PathLike | None = None,
) -> list[AlignedGraph]:
    """Aligned stable genus-one graphs whose strata are non-empty.

    Sorted by cell dimension ``|C(G)| + k`` and then by canonical encoding;
    the interior graph comes first.
    """
    if criterion == "dmin" and d < 2:
        warnings.warn(f"no aligned graph has d_min > 1 when d = {d}", stacklevel=2)
        return []
    if d == 0:
        return []
    if catalog is None:
        catalog = stable_graphs(EnumerationRequest(1, n, d), cache_dir=cache_dir)
    keep = {
        enc: AG for enc, AG in all_aligned_graphs(catalog).items() if in_tilde_category(AG, criterion)
    }
    return [keep[enc] for enc in sorted(keep, key=lambda e: (len(keep[e].core_edges) + keep[e].k, e))]
