"""Decorated multigraphs: the combinatorial types of stable maps.

A :class:`DecoratedGraph` carries, for every vertex, a genus weight ``w``, a
degree ``delta`` and a set of marking labels drawn from ``{1, ..., n}``.  Edge
``i`` is stored as the ordered pair ``edges[i] = (u, v)`` and owns two
half-edges: ``2*i`` anchored at ``u`` and ``2*i + 1`` anchored at ``v``.  Loops
(``u == v``) therefore contribute two half-edges to the valence of their
vertex, and the half-edge flip of a loop is a genuine (edge-trivial)
automorphism.

Canonical forms use colour refinement followed by individualisation and
backtracking; the graphs met here have at most a dozen vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Iterator, NamedTuple, Sequence

from mdc.errors import DomainError, StructureError

__all__ = [
    "DecoratedGraph",
    "GraphIsomorphism",
    "CanonicalForm",
    "Contraction",
    "genus",
    "is_connected",
    "is_stable",
    "contract_edge",
    "contract_edges",
    "canonical_form",
    "automorphisms",
    "one_ends",
    "one_end_vertices",
    "sprout",
    "interior_graph",
    "permutation_sign",
]


@dataclass(frozen=True)
class DecoratedGraph:
    """A ``(g, n, d)``-graph.

    ``g`` and ``d`` are derived from the decorations: ``d`` is the total
    degree and ``g`` is the first Betti number plus the total weight.
    Connectivity is not enforced at construction so that intermediate
    objects can be inspected; :func:`genus` and :meth:`check` reject
    disconnected graphs.
    """

    weights: tuple[int, ...]
    degrees: tuple[int, ...]
    marks: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(x) for x in self.weights))
        object.__setattr__(self, "degrees", tuple(int(x) for x in self.degrees))
        object.__setattr__(self, "marks", tuple(frozenset(m) for m in self.marks))
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        nv = len(self.weights)
        if nv == 0:
            raise StructureError("a graph needs at least one vertex")
        if len(self.degrees) != nv or len(self.marks) != nv:
            raise StructureError("weights, degrees and marks must have one entry per vertex")
        if min(self.weights) < 0 or min(self.degrees) < 0:
            raise StructureError("weights and degrees must be non-negative")
        seen: set[int] = set()
        for labels in self.marks:
            for label in labels:
                if not 1 <= label <= self.n or label in seen:
                    raise StructureError(f"marking {label} is out of range or repeated")
                seen.add(label)
        if len(seen) != self.n:
            missing = sorted(set(range(1, self.n + 1)) - seen)
            raise StructureError(f"markings {missing} are not placed on any vertex")
        for u, v in self.edges:
            if not (0 <= u < nv and 0 <= v < nv):
                raise StructureError(f"edge ({u}, {v}) refers to a missing vertex")

    @classmethod
    def from_vertices(
        cls,
        vertices: Sequence[tuple[int, int, Iterable[int]]],
        edges: Sequence[tuple[int, int]] = (),
        n: int | None = None,
    ) -> "DecoratedGraph":
        """Build a graph from ``(w, delta, marks)`` triples."""
        marks = [frozenset(m) for _, _, m in vertices]
        if n is None:
            n = sum(len(m) for m in marks)
        return cls(
            weights=tuple(w for w, _, _ in vertices),
            degrees=tuple(dl for _, dl, _ in vertices),
            marks=tuple(marks),
            edges=tuple(edges),
            n=n,
        )

    @property
    def num_vertices(self) -> int:
        return len(self.weights)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def d(self) -> int:
        return sum(self.degrees)

    @property
    def g(self) -> int:
        return genus(self)

    def valence(self, v: int, loop_valence: int = 2) -> int:
        total = 0
        for a, b in self.edges:
            if a == b == v:
                total += loop_valence
            elif a == v or b == v:
                total += 1
        return total

    def half_edges_at(self, v: int) -> list[int]:
        out = []
        for i, (a, b) in enumerate(self.edges):
            if a == v:
                out.append(2 * i)
            if b == v:
                out.append(2 * i + 1)
        return out

    def anchor(self, h: int) -> int:
        """Vertex a half-edge is anchored at."""
        return self.edges[h // 2][h % 2]

    def is_loop(self, e: int) -> bool:
        u, v = self.edges[e]
        return u == v

    def check(self, g: int | None = None, d: int | None = None) -> None:
        """Raise :class:`StructureError` unless all invariants hold."""
        actual_g = genus(self)
        if g is not None and actual_g != g:
            raise StructureError(f"graph has genus {actual_g}, expected {g}")
        if d is not None and self.d != d:
            raise StructureError(f"graph has degree {self.d}, expected {d}")

    # -- serialisation -------------------------------------------------
    def to_json(self) -> dict:
        return {
            "g": genus(self),
            "n": self.n,
            "d": self.d,
            "vertices": [
                {"id": v, "w": self.weights[v], "delta": self.degrees[v], "marks": sorted(self.marks[v])}
                for v in range(self.num_vertices)
            ],
            "edges": [[u, v] for u, v in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecoratedGraph":
        try:
            verts = sorted(data["vertices"], key=lambda x: x["id"])
            if [x["id"] for x in verts] != list(range(len(verts))):
                raise StructureError("vertex ids must be 0..V-1")
            graph = cls(
                weights=tuple(x["w"] for x in verts),
                degrees=tuple(x["delta"] for x in verts),
                marks=tuple(frozenset(x["marks"]) for x in verts),
                edges=tuple((e[0], e[1]) for e in data["edges"]),
                n=data["n"],
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise StructureError(f"malformed graph JSON: {exc!r}") from exc
        graph.check(g=data.get("g"), d=data.get("d"))
        return graph

    def to_dot(self, levels: Sequence[int] | None = None, lengths: Sequence[object] | None = None) -> str:
        lines = ["graph G {"]
        if levels is not None:
            for lvl in sorted(set(levels)):
                members = " ".join(f"v{v};" for v in range(self.num_vertices) if levels[v] == lvl)
                lines.append(f'  subgraph cluster_level{lvl} {{ label="level {lvl}"; color=blue; {members} }}')
        for v in range(self.num_vertices):
            marks = ",".join(str(m) for m in sorted(self.marks[v]))
            label = f"w={self.weights[v]} &delta;={self.degrees[v]}"
            if marks:
                label += f" m={{{marks}}}"
            lines.append(f'  v{v} [label="{label}"];')
        for i, (u, v) in enumerate(self.edges):
            attr = f' [label="{lengths[i]}"]' if lengths is not None else ""
            lines.append(f"  v{u} -- v{v}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def interior_graph(g: int, n: int, d: int) -> DecoratedGraph:
    """The single-vertex graph with all genus, degree and markings."""
    return DecoratedGraph((g,), (d,), (frozenset(range(1, n + 1)),), (), n)


# ---------------------------------------------------------------------------
# basic invariants


def is_connected(G: DecoratedGraph) -> bool:
    parent = list(range(G.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in G.edges:
        parent[find(u)] = find(v)
    return len({find(v) for v in range(G.num_vertices)}) == 1


def genus(G: DecoratedGraph) -> int:
    """First Betti number plus total weight."""
    if not is_connected(G):
        raise StructureError("genus is only defined for connected graphs")
    return G.num_edges - G.num_vertices + 1 + sum(G.weights)


def is_stable(G: DecoratedGraph, loop_valence: int = 2) -> bool:
    """Every degree-zero vertex satisfies ``2w - 2 + val + #marks > 0``."""
    for v in range(G.num_vertices):
        if G.degrees[v] == 0:
            if 2 * G.weights[v] - 2 + G.valence(v, loop_valence) + len(G.marks[v]) <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# contractions


class Contraction(NamedTuple):
    graph: DecoratedGraph
    vertex_map: tuple[int, ...]
    edge_map: tuple[int | None, ...]


def contract_edges(G: DecoratedGraph, contracted: Iterable[int]) -> Contraction:
    """Contract a set of edges at once.

    Each merged vertex receives the summed weights plus the first Betti
    number of the contracted subgraph it absorbs, so contracting a loop
    raises the weight of its vertex by one.  Surviving edges keep their
    relative order.
    """
    S = set(contracted)
    for e in S:
        if not 0 <= e < G.num_edges:
            raise KeyError(f"edge {e} is not in the graph")
    parent = list(range(G.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in S:
        u, v = G.edges[e]
        parent[find(u)] = find(v)

    new_index: dict[int, int] = {}
    vmap = []
    for v in range(G.num_vertices):
        r = find(v)
        if r not in new_index:
            new_index[r] = len(new_index)
        vmap.append(new_index[r])
    k = len(new_index)
    weights = [0] * k
    degrees = [0] * k
    marks: list[set[int]] = [set() for _ in range(k)]
    size = [0] * k
    for v in range(G.num_vertices):
        c = vmap[v]
        weights[c] += G.weights[v]
        degrees[c] += G.degrees[v]
        marks[c] |= G.marks[v]
        size[c] += 1
    inner = [0] * k
    for e in S:
        inner[vmap[G.edges[e][0]]] += 1
    for c in range(k):
        weights[c] += inner[c] - size[c] + 1

    edges = []
    emap: list[int | None] = []
    for i, (u, v) in enumerate(G.edges):
        if i in S:
            emap.append(None)
        else:
            emap.append(len(edges))
            edges.append((vmap[u], vmap[v]))
    H = DecoratedGraph(tuple(weights), tuple(degrees), tuple(frozenset(m) for m in marks), tuple(edges), G.n)
    return Contraction(H, tuple(vmap), tuple(emap))


def contract_edge(G: DecoratedGraph, e: int) -> DecoratedGraph:
    """Contract a single edge; edges after ``e`` shift down by one."""
    if not 0 <= e < G.num_edges:
        raise KeyError(f"edge {e} is not in the graph")
    H = contract_edges(G, [e]).graph
    if is_stable(G):
        assert is_stable(H), "edge contraction broke stability"
    return H


# ---------------------------------------------------------------------------
# isomorphisms


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of ``range(len(perm))``."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = perm[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class GraphIsomorphism:
    """A vertex bijection together with a compatible half-edge bijection."""

    vertex_map: tuple[int, ...]
    half_edge_map: tuple[int, ...]

    @property
    def edge_map(self) -> tuple[int, ...]:
        return tuple(self.half_edge_map[2 * i] // 2 for i in range(len(self.half_edge_map) // 2))

    @classmethod
    def identity(cls, G: DecoratedGraph) -> "GraphIsomorphism":
        return cls(tuple(range(G.num_vertices)), tuple(range(2 * G.num_edges)))

    def then(self, other: "GraphIsomorphism") -> "GraphIsomorphism":
        """Composite: apply ``self`` first, then ``other``."""
        return GraphIsomorphism(
            tuple(other.vertex_map[x] for x in self.vertex_map),
            tuple(other.half_edge_map[h] for h in self.half_edge_map),
        )

    def inverse(self) -> "GraphIsomorphism":
        vinv = [0] * len(self.vertex_map)
        for a, b in enumerate(self.vertex_map):
            vinv[b] = a
        hinv = [0] * len(self.half_edge_map)
        for a, b in enumerate(self.half_edge_map):
            hinv[b] = a
        return GraphIsomorphism(tuple(vinv), tuple(hinv))

    def apply(self, G: DecoratedGraph) -> DecoratedGraph:
        """Transport ``G`` along this bijection."""
        nv = G.num_vertices
        weights = [0] * nv
        degrees = [0] * nv
        marks: list[frozenset[int]] = [frozenset()] * nv
        for v, x in enumerate(self.vertex_map):
            weights[x] = G.weights[v]
            degrees[x] = G.degrees[v]
            marks[x] = G.marks[v]
        ends = [0] * (2 * G.num_edges)
        for h, k in enumerate(self.half_edge_map):
            ends[k] = self.vertex_map[G.anchor(h)]
        edges = tuple((ends[2 * j], ends[2 * j + 1]) for j in range(G.num_edges))
        return DecoratedGraph(tuple(weights), tuple(degrees), tuple(marks), edges, G.n)

    def label_sign(self, labels: Sequence[int]) -> int:
        """Sign of the permutation induced on an invariant set of edges."""
        position = {e: i for i, e in enumerate(labels)}
        emap = self.edge_map
        try:
            perm = [position[emap[e]] for e in labels]
        except KeyError as exc:
            raise DomainError("label set is not invariant under the isomorphism") from exc
        return permutation_sign(perm)


class CanonicalForm(NamedTuple):
    encoding: bytes
    relabeling: GraphIsomorphism
    graph: DecoratedGraph


def _adjacency(G: DecoratedGraph, ecolors: tuple) -> list[list[tuple[int, object]]]:
    adj: list[list[tuple[int, object]]] = [[] for _ in range(G.num_vertices)]
    for i, (u, v) in enumerate(G.edges):
        adj[u].append((v, ecolors[i]))
        adj[v].append((u, ecolors[i]))
    return adj


def _rank(keys: list) -> list[int]:
    table = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def _refine(adj: list[list[tuple[int, object]]], colors: list[int]) -> list[int]:
    ncolors = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted((colors[u], c) for u, c in adj[v]))) for v in range(len(colors))]
        new = _rank(sig)
        count = len(set(new))
        if count == ncolors:
            return new
        colors, ncolors = new, count


def _leaf_encoding(G: DecoratedGraph, vkeys: list, ecolors: tuple, pos: Sequence[int]) -> tuple:
    order = [0] * len(pos)
    for v, p in enumerate(pos):
        order[p] = v
    verts = tuple(vkeys[v] for v in order)
    edges = tuple(
        sorted(
            (min(pos[u], pos[v]), max(pos[u], pos[v]), ecolors[i]) for i, (u, v) in enumerate(G.edges)
        )
    )
    return (G.n, verts, edges)


def _search(G: DecoratedGraph, vcolors: tuple, ecolors: tuple) -> tuple[tuple, list[tuple[int, ...]]]:
    """Return the minimal leaf encoding and every vertex ordering attaining it."""
    adj = _adjacency(G, ecolors)
    loops = [0] * G.num_vertices
    for u, v in G.edges:
        if u == v:
            loops[u] += 1
    vkeys = [
        (G.weights[v], G.degrees[v], tuple(sorted(G.marks[v])), vcolors[v]) for v in range(G.num_vertices)
    ]
    start = _rank([(vkeys[v], len(adj[v]), loops[v]) for v in range(G.num_vertices)])
    best: list = [None, []]

    def visit(colors: list[int]) -> None:
        colors = _refine(adj, colors)
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        target = min((c for c, k in counts.items() if k > 1), default=None)
        if target is None:
            pos = tuple(colors)
            enc = _leaf_encoding(G, vkeys, ecolors, pos)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, [pos]
            elif enc == best[0]:
                best[1].append(pos)
            return
        for x in range(len(colors)):
            if colors[x] == target:
                visit(_rank([(c, 0 if v == x else 1) for v, c in enumerate(colors)]))

    visit(start)
    return best[0], best[1]


def _normalise_colors(G: DecoratedGraph, vertex_colors, edge_colors) -> tuple[tuple, tuple]:
    vc = tuple(0 for _ in range(G.num_vertices)) if vertex_colors is None else tuple(vertex_colors)
    ec = tuple("" for _ in range(G.num_edges)) if edge_colors is None else tuple(str(c) for c in edge_colors)
    if len(vc) != G.num_vertices or len(ec) != G.num_edges:
        raise DomainError("colour sequences must match the vertex and edge counts")
    return vc, ec


def _relabeling(G: DecoratedGraph, ecolors: tuple, pos: Sequence[int]) -> GraphIsomorphism:
    keys = []
    for i, (u, v) in enumerate(G.edges):
        a, b = sorted((pos[u], pos[v]))
        keys.append((a, b, ecolors[i], i))
    order = sorted(range(G.num_edges), key=lambda i: keys[i])
    emap = [0] * G.num_edges
    for j, i in enumerate(order):
        emap[i] = j
    hmap = [0] * (2 * G.num_edges)
    for i, (u, v) in enumerate(G.edges):
        j = emap[i]
        if u == v or pos[u] < pos[v]:
            hmap[2 * i], hmap[2 * i + 1] = 2 * j, 2 * j + 1
        else:
            hmap[2 * i], hmap[2 * i + 1] = 2 * j + 1, 2 * j
    return GraphIsomorphism(tuple(pos), tuple(hmap))


@lru_cache(maxsize=200_000)
def _canonical_cached(G: DecoratedGraph, vc: tuple, ec: tuple) -> CanonicalForm:
    enc, leaves = _search(G, vc, ec)
    pos = min(leaves)
    phi = _relabeling(G, ec, pos)
    return CanonicalForm(repr(enc).encode(), phi, phi.apply(G))


def canonical_form(
    G: DecoratedGraph,
    vertex_colors: Sequence[int] | None = None,
    edge_colors: Sequence[object] | None = None,
) -> CanonicalForm:
    """Canonical encoding, relabelling onto the representative, and the representative.

    Optional vertex colours (e.g. radial levels) and edge colours (e.g. metric
    lengths) must be preserved by isomorphisms.  The representative is a
    fixed point: its own relabelling is the identity.
    """
    vc, ec = _normalise_colors(G, vertex_colors, edge_colors)
    return _canonical_cached(G, vc, ec)


def _vertex_automorphisms(G: DecoratedGraph, vc: tuple, ec: tuple) -> list[tuple[int, ...]]:
    _, leaves = _search(G, vc, ec)
    pos0 = min(leaves)
    out = []
    for pos1 in leaves:
        order1 = [0] * len(pos1)
        for v, p in enumerate(pos1):
            order1[p] = v
        out.append(tuple(order1[pos0[v]] for v in range(G.num_vertices)))
    return sorted(out)


def automorphisms(
    G: DecoratedGraph,
    vertex_colors: Sequence[int] | None = None,
    edge_colors: Sequence[object] | None = None,
) -> list[GraphIsomorphism]:
    """The full decoration-preserving automorphism group, acting on half-edges."""
    vc, ec = _normalise_colors(G, vertex_colors, edge_colors)
    return list(_automorphisms_cached(G, vc, ec))


@lru_cache(maxsize=50_000)
def _automorphisms_cached(G: DecoratedGraph, vc: tuple, ec: tuple) -> tuple[GraphIsomorphism, ...]:
    groups: dict[tuple, list[int]] = {}
    for i, (u, v) in enumerate(G.edges):
        groups.setdefault((min(u, v), max(u, v), ec[i]), []).append(i)
    out = []
    for sigma in _vertex_automorphisms(G, vc, ec):
        choices = []
        for (a, b, c), members in groups.items():
            x, y = sigma[a], sigma[b]
            image = groups[(min(x, y), max(x, y), c)]
            choices.append([(members, perm) for perm in permutations(image)])
        loops = [i for i, (u, v) in enumerate(G.edges) if u == v]
        for assignment in product(*choices):
            emap = [0] * G.num_edges
            for members, perm in assignment:
                for i, j in zip(members, perm):
                    emap[i] = j
            for flips in product((False, True), repeat=len(loops)):
                hmap = [0] * (2 * G.num_edges)
                flipped = {e for e, f in zip(loops, flips) if f}
                for i, (u, v) in enumerate(G.edges):
                    j = emap[i]
                    straight = G.edges[j][0] == sigma[u] if u != v else i not in flipped
                    hmap[2 * i], hmap[2 * i + 1] = (2 * j, 2 * j + 1) if straight else (2 * j + 1, 2 * j)
                out.append(GraphIsomorphism(sigma, tuple(hmap)))
    return tuple(out)


def has_odd_automorphism(
    G: DecoratedGraph,
    labels: Sequence[int],
    vertex_colors: Sequence[int] | None = None,
) -> bool:
    """Whether some automorphism permutes the labelled edges oddly."""
    return any(phi.label_sign(labels) < 0 for phi in automorphisms(G, vertex_colors))


# ---------------------------------------------------------------------------
# 1-ends and sprouting


def one_end_vertices(G: DecoratedGraph) -> list[int]:
    """Unmarked weight-0 degree-1 vertices cut off by a single edge."""
    out = []
    for v in range(G.num_vertices):
        if G.weights[v] == 0 and G.degrees[v] == 1 and not G.marks[v] and G.valence(v) == 1:
            out.append(v)
    return out


def one_ends(G: DecoratedGraph) -> set[int]:
    ends = set(one_end_vertices(G))
    return {i for i, (u, v) in enumerate(G.edges) if u != v and (u in ends or v in ends)}


def sprout(G: DecoratedGraph) -> DecoratedGraph:
    """Move all degree onto fresh 1-end leaves.

    Every vertex carrying degree that is not already a 1-end vertex gets one
    new degree-1 leaf per unit of degree.  New vertices and edges are appended,
    so the original vertex and edge indices are preserved.
    """
    ends = set(one_end_vertices(G))
    weights = list(G.weights)
    degrees = list(G.degrees)
    marks = list(G.marks)
    edges = list(G.edges)
    for v in range(G.num_vertices):
        if v in ends or G.degrees[v] == 0:
            continue
        for _ in range(G.degrees[v]):
            leaf = len(weights)
            weights.append(0)
            degrees.append(1)
            marks.append(frozenset())
            edges.append((v, leaf))
        degrees[v] = 0
    return DecoratedGraph(tuple(weights), tuple(degrees), tuple(marks), tuple(edges), G.n)


def iter_edges_at(G: DecoratedGraph, v: int) -> Iterator[int]:
    for i, (a, b) in enumerate(G.edges):
        if a == v or b == v:
            yield i
