"""Symmetric Delta-complexes, their rational chain complexes and homology.

A generator is a canonical representative together with its reference
labelling.  For a virtual cell the labels are the edges in canonical order;
for a genus-one cell they are the core edges (in increasing order) followed
by the levels ``1..k``.  A labelled object is a pair ``(generator, perm)``
meaning "position ``q`` carries reference label ``perm[q]``"; its chain is
``sign(perm) * [generator]``.

Face ``i`` deletes the label in position ``i``: for an edge label it contracts
the edge, for a level label it merges radially along that level.  The face
record stores the target generator together with the permutation carrying
the induced labels onto the target's reference labelling, so composite faces
can be recomputed exactly.  Generators with an odd label symmetry vanish
rationally ("dead") and carry no column.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

from mdc.enumeration import EnumerationRequest, GraphCatalog, aligned_graphs, stable_graphs
from mdc.errors import DomainError, StructureError
from mdc.genus_one import (
    AlignedGraph,
    canonical_aligned,
    contract_core_edge_maps,
    in_tilde_category,
    radial_merge_maps,
)
from mdc.graph import (
    DecoratedGraph,
    automorphisms,
    canonical_form,
    contract_edges,
    permutation_sign,
)
from mdc.linalg import matmul, rank

log = logging.getLogger(__name__)

AUGMENTATION = -1

__all__ = [
    "Face",
    "Generator",
    "SymmetricDeltaComplex",
    "ChainComplex",
    "build_virtual_complex",
    "build_genus1_complex",
    "chain_complex",
    "betti",
    "euler_characteristic",
    "euler_from_homology",
    "check_boundary_squared",
    "check_face_identities",
]


@dataclass(frozen=True)
class Face:
    i: int
    target: int
    perm: tuple[int, ...]
    sign: int


@dataclass
class Generator:
    dim: int
    graph: DecoratedGraph
    levels: tuple[int, ...] | None
    labels: tuple[str, ...]
    label_group: tuple[tuple[int, ...], ...]
    alive: bool
    faces: list[Face] = field(default_factory=list)

    @property
    def aligned(self) -> AlignedGraph:
        if self.levels is None:
            raise DomainError("virtual generators carry no alignment")
        return AlignedGraph(self.graph, self.levels)


@dataclass
class SymmetricDeltaComplex:
    kind: str
    g: int
    n: int
    d: int
    dims: list[list[Generator]] = field(default_factory=list)
    criterion: str | None = None

    @property
    def dimension(self) -> int:
        return len(self.dims) - 1

    def alive_counts(self) -> list[int]:
        return [sum(x.alive for x in gens) for gens in self.dims]

    def generator(self, p: int, idx: int) -> Generator:
        return self.dims[p][idx]

    def to_json(self) -> dict:
        dims = []
        for p, gens in enumerate(self.dims):
            items = []
            for x in gens:
                graph = x.graph.to_json()
                if x.levels is not None:
                    graph["levels"] = list(x.levels)
                items.append(
                    {
                        "graph": graph,
                        "labels": list(x.labels),
                        "alive": x.alive,
                        "faces": [{"i": f.i, "target": f.target, "sign": f.sign} for f in x.faces],
                    }
                )
            dims.append({"p": p, "generators": items})
        return {"kind": self.kind, "g": self.g, "n": self.n, "d": self.d, "dims": dims}

    @classmethod
    def from_json(cls, data: dict) -> "SymmetricDeltaComplex":
        """Read back a complex.  Face permutations are not serialised; only signs."""
        try:
            X = cls(data.get("kind", "virtual"), data.get("g", 0), data.get("n", 0), data.get("d", 0))
            for p, block in enumerate(data["dims"]):
                if block["p"] != p:
                    raise StructureError("dimensions must be listed in order starting at 0")
                gens = []
                for item in block["generators"]:
                    graph = DecoratedGraph.from_json(item["graph"])
                    levels = item["graph"].get("levels")
                    faces = [Face(f["i"], f["target"], (), f["sign"]) for f in item["faces"]]
                    gens.append(
                        Generator(
                            p,
                            graph,
                            None if levels is None else tuple(levels),
                            tuple(item["labels"]),
                            (),
                            bool(item["alive"]),
                            faces,
                        )
                    )
                X.dims.append(gens)
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed complex JSON: {exc!r}") from exc
        return X


# ---------------------------------------------------------------------------
# construction


def _label_group_virtual(G: DecoratedGraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted({phi.edge_map for phi in automorphisms(G)}))


def _label_group_aligned(AG: AlignedGraph) -> tuple[tuple[int, ...], ...]:
    core = AG.core_edges
    pos = {e: q for q, e in enumerate(core)}
    tail = tuple(range(len(core), len(core) + AG.k))
    perms = set()
    for phi in automorphisms(AG.graph, vertex_colors=AG.levels):
        emap = phi.edge_map
        perms.add(tuple(pos[emap[e]] for e in core) + tail)
    return tuple(sorted(perms))


def _is_alive(group: Sequence[Sequence[int]]) -> bool:
    return all(permutation_sign(perm) > 0 for perm in group)


def build_virtual_complex(
    g: int,
    n: int,
    d: int,
    catalog: GraphCatalog | None = None,
    cache_dir=None,
) -> SymmetricDeltaComplex:
    """The virtual dual complex: one generator per stable graph with at least one edge."""
    if d <= 0:
        raise DomainError("the dual complex needs positive degree")
    if catalog is None:
        catalog = stable_graphs(EnumerationRequest(g, n, d), cache_dir=cache_dir)
    by_edges = catalog.by_edges()
    top = max(by_edges, default=0)
    X = SymmetricDeltaComplex("virtual", g, n, d)
    index: dict[bytes, tuple[int, int]] = {}
    for E in range(1, top + 1):
        gens = []
        for G in sorted(by_edges.get(E, []), key=lambda H: canonical_form(H).encoding):
            group = _label_group_virtual(G)
            index[canonical_form(G).encoding] = (E - 1, len(gens))
            gens.append(Generator(E - 1, G, None, tuple(f"e{i}" for i in range(E)), group, _is_alive(group)))
        X.dims.append(gens)
    while X.dims and not X.dims[-1]:
        X.dims.pop()

    for p, gens in enumerate(X.dims):
        for x in gens:
            for i in range(p + 1):
                H = contract_edges(x.graph, [i]).graph
                if p == 0:
                    x.faces.append(Face(i, AUGMENTATION, (), 1))
                    continue
                cf = canonical_form(H)
                q, t = index[cf.encoding]
                perm = cf.relabeling.edge_map
                target = X.dims[q][t]
                sign = (-1) ** i * permutation_sign(perm) if target.alive else 0
                x.faces.append(Face(i, t, perm, sign))
    return X


def build_genus1_complex(
    n: int,
    d: int,
    criterion: str = "dmin",
    catalog: GraphCatalog | None = None,
    cache_dir=None,
) -> SymmetricDeltaComplex:
    """The genus-one dual complex over aligned graphs with non-empty strata."""
    X = SymmetricDeltaComplex("genus1", 1, n, d, criterion=criterion)
    if d < 2 and criterion == "dmin":
        warnings.warn(f"the genus-one dual complex is empty for d = {d}", stacklevel=2)
        return X
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        aligned = aligned_graphs(n, d, criterion, catalog=catalog, cache_dir=cache_dir)
    index: dict[bytes, tuple[int, int]] = {}
    interior = None
    for AG in aligned:
        p = len(AG.core_edges) + AG.k - 1
        if p < 0:
            interior = AG
            continue
        while len(X.dims) <= p:
            X.dims.append([])
        group = _label_group_aligned(AG)
        labels = tuple(f"c{e}" for e in AG.core_edges) + tuple(f"L{j}" for j in range(1, AG.k + 1))
        index[canonical_aligned(AG)[0].encoding] = (p, len(X.dims[p]))
        X.dims[p].append(Generator(p, AG.graph, AG.levels, labels, group, _is_alive(group)))
    if interior is None and aligned:
        raise AssertionError("the interior graph is missing from the genus-one category")

    for p, gens in enumerate(X.dims):
        for x in gens:
            AG = x.aligned
            core = AG.core_edges
            for i in range(p + 1):
                if i < len(core):
                    res = contract_core_edge_maps(AG, core[i])
                    induced = [res.edge_map[e] for q, e in enumerate(core) if q != i]
                else:
                    res = radial_merge_maps(AG, i - len(core) + 1)
                    induced = [res.edge_map[e] for e in core]
                if p == 0:
                    x.faces.append(Face(i, AUGMENTATION, (), 1))
                    continue
                if not in_tilde_category(res.aligned, criterion):
                    raise AssertionError(f"face {i} of a generator left the non-empty category")
                cf, rep = canonical_aligned(res.aligned)
                q, t = index[cf.encoding]
                emap = cf.relabeling.edge_map
                rep_core = {e: j for j, e in enumerate(rep.core_edges)}
                perm = tuple(rep_core[emap[e]] for e in induced) + tuple(
                    range(len(induced), len(induced) + rep.k)
                )
                target = X.dims[q][t]
                sign = (-1) ** i * permutation_sign(perm) if target.alive else 0
                x.faces.append(Face(i, t, perm, sign))
    return X


# ---------------------------------------------------------------------------
# chains and homology


@dataclass
class ChainComplex:
    """``boundaries[p]`` is the sparse matrix of ``C_p -> C_{p-1}``.

    Columns index the alive generators of dimension ``p`` (in order); rows
    index the alive generators of dimension ``p - 1``, or the single
    augmentation row when ``p == 0`` and the complex is reduced.
    """

    sizes: list[int]
    boundaries: list[dict[tuple[int, int], int]]
    reduced: bool

    def ranks(self) -> list[int]:
        return [rank(B) for B in self.boundaries]


def chain_complex(X: SymmetricDeltaComplex, reduced: bool = True) -> ChainComplex:
    columns = [[j for j, x in enumerate(gens) if x.alive] for gens in X.dims]
    position = [{j: c for c, j in enumerate(cols)} for cols in columns]
    boundaries = []
    for p, gens in enumerate(X.dims):
        B: dict[tuple[int, int], int] = {}
        for c, j in enumerate(columns[p]):
            for f in gens[j].faces:
                if f.sign == 0:
                    continue
                if f.target == AUGMENTATION:
                    if not reduced:
                        continue
                    row = 0
                else:
                    row = position[p - 1].get(f.target)
                    if row is None:
                        raise StructureError("a nonzero face points at a dead generator")
                B[(row, c)] = B.get((row, c), 0) + f.sign
        boundaries.append({k: v for k, v in B.items() if v})
    return ChainComplex([len(cols) for cols in columns], boundaries, reduced)


def betti(C: ChainComplex) -> dict[int, int]:
    """Betti numbers by dimension; reduced complexes include ``p = -1``."""
    ranks = C.ranks() + [0]
    out: dict[int, int] = {}
    if C.reduced:
        out[-1] = 1 - (ranks[0] if C.sizes else 0)
    for p, size in enumerate(C.sizes):
        incoming = ranks[p] if (p > 0 or C.reduced) else 0
        out[p] = size - incoming - ranks[p + 1]
    return out


def euler_characteristic(X: SymmetricDeltaComplex) -> int:
    return sum((-1) ** p * k for p, k in enumerate(X.alive_counts()))


def euler_from_homology(X: SymmetricDeltaComplex) -> int:
    b = betti(chain_complex(X, reduced=False))
    return sum((-1) ** p * v for p, v in b.items())


def check_boundary_squared(C: ChainComplex) -> bool:
    for p in range(1, len(C.boundaries)):
        if matmul(C.boundaries[p - 1], C.boundaries[p]):
            return False
    return True


def _compose(X: SymmetricDeltaComplex, p: int, perm: Sequence[int], target: int, i: int):
    """Delete position ``i`` of the labelled object ``(target, perm)`` in dimension ``p``."""
    y = X.dims[p][target]
    r = perm[i]
    f = y.faces[r]
    rest = [perm[q] - (perm[q] > r) for q in range(len(perm)) if q != i]
    if f.target == AUGMENTATION:
        return AUGMENTATION, ()
    return f.target, tuple(f.perm[s] for s in rest)


def check_face_identities(X: SymmetricDeltaComplex) -> list[str]:
    """Check ``d_i d_j = d_{j-1} d_i`` (``i < j``) on every generator.

    Both composites must reach the same generator, and their label
    permutations must agree up to an automorphism of the target.  Returns a
    list of failure descriptions (empty on success).
    """
    failures = []
    for p in range(2, len(X.dims)):
        for a, x in enumerate(X.dims[p]):
            ident = tuple(range(p + 1))
            for j in range(p + 1):
                for i in range(j):
                    y1, pi1 = _compose(X, p, ident, a, j)
                    z1, pi1 = _compose(X, p - 1, pi1, y1, i)
                    y2, pi2 = _compose(X, p, ident, a, i)
                    z2, pi2 = _compose(X, p - 1, pi2, y2, j - 1)
                    if z1 != z2:
                        failures.append(f"dim {p} gen {a}: d{i}d{j} and d{j-1}d{i} reach {z1} and {z2}")
                        continue
                    group = X.dims[p - 2][z1].label_group
                    if not any(tuple(g[s] for s in pi2) == pi1 for g in group):
                        failures.append(f"dim {p} gen {a}: d{i}d{j} and d{j-1}d{i} differ in labelling")
    return failures
