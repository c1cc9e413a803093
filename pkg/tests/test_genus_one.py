import pytest

from mdc.enumeration import EnumerationRequest, stable_graphs
from mdc.errors import DomainError, StructureError
from mdc.genus_one import (
    AlignedGraph,
    canonical_aligned,
    canonical_subdivision,
    contract_core_edge,
    contraction_radius,
    core,
    enumerate_alignments,
    in_tilde_category,
    radial_merge,
    subdivision_at_radius,
    tree_order,
)
from mdc.graph import DecoratedGraph

from oracles import brute_alignment_count

V = DecoratedGraph.from_vertices

GENUS1 = [
    G
    for g, n, d in [(1, 1, 2), (1, 2, 2), (1, 1, 3), (1, 0, 2), (1, 0, 3)]
    for G in stable_graphs(EnumerationRequest(g, n, d))
]
ALIGNED = [AG for G in GENUS1 for AG in enumerate_alignments(G)]

# core vertex c (w=1, mark 1) with children a, b
CHERRY = V([(1, 0, {1}), (0, 1, ()), (0, 1, ())], [(0, 1), (0, 2)])
# core c (w=1) - a - b
PATH = V([(1, 0, {1}), (0, 0, {2}), (0, 2, ())], [(0, 1), (1, 2)])


def test_core_of_weight_one_vertex():
    assert core(CHERRY) == (frozenset({0}), frozenset())


def test_core_of_cycle():
    G = V([(0, 0, ()), (0, 0, ()), (0, 0, ()), (0, 2, ())], [(0, 1), (1, 2), (2, 0), (2, 3)])
    c = core(G)
    assert c.vertices == {0, 1, 2} and c.edges == {0, 1, 2}
    assert core(V([(0, 1, {1})], [(0, 0)])) == (frozenset({0}), frozenset({0}))


def test_core_rejects_other_genera():
    with pytest.raises(DomainError):
        core(V([(0, 3, ())]))


def test_tree_order():
    order = tree_order(PATH)
    assert order.parent == (None, 0, 1)
    assert order.less(0, 2) and order.less(1, 2)
    assert not order.less(2, 1) and not order.less(1, 1)
    assert order.oriented(PATH, 1) == (1, 2)


def test_alignment_examples():
    assert [AG.levels for AG in enumerate_alignments(V([(1, 2, {1})]))] == [(0,)]
    cherry = {AG.levels for AG in enumerate_alignments(CHERRY)}
    assert cherry == {(0, 1, 1), (0, 1, 2), (0, 2, 1)}
    assert [AG.levels for AG in enumerate_alignments(PATH)] == [(0, 1, 2)]


def test_alignment_counts_match_brute_force():
    for G in GENUS1:
        order = tree_order(G)
        if sum(order.is_tree(v) for v in range(G.num_vertices)) > 6:
            continue
        expected = brute_alignment_count(G, order.core.vertices, order.parent)
        assert len(enumerate_alignments(G)) == expected


def test_invalid_alignments_rejected():
    with pytest.raises(StructureError):
        AlignedGraph(PATH, (0, 2, 1))
    with pytest.raises(StructureError):
        AlignedGraph(PATH, (0, 1, 3))
    with pytest.raises(StructureError):
        AlignedGraph(PATH, (1, 1, 2))


def test_aligned_json_round_trip():
    AG = AlignedGraph(CHERRY, (0, 2, 1))
    assert AlignedGraph.from_json(AG.to_json()) == AG
    assert "cluster_level2" in AG.to_dot()


def test_canonical_aligned_respects_levels():
    a, _ = canonical_aligned(AlignedGraph(CHERRY, (0, 1, 2)))
    b, _ = canonical_aligned(AlignedGraph(CHERRY, (0, 2, 1)))
    c, _ = canonical_aligned(AlignedGraph(CHERRY, (0, 1, 1)))
    assert a.encoding == b.encoding != c.encoding


# -- subdivisions -----------------------------------------------------------


def test_canonical_subdivision_inserts_bivalent_vertices():
    G = V([(1, 0, {1}), (0, 0, ()), (0, 1, ()), (0, 1, ())], [(0, 1), (1, 2), (0, 3)])
    S = canonical_subdivision(AlignedGraph(G, (0, 1, 2, 2)))
    assert S.kinds.count("bivalent") == 1
    assert S.fiber_sizes == {1: 2, 2: 2}


def test_subdivision_smoothing_is_identity():
    for AG in ALIGNED:
        assert canonical_subdivision(AG).smooth() == AG


def test_subdivision_at_radius_relocates_markings():
    S = subdivision_at_radius(AlignedGraph(PATH, (0, 1, 2)), 2)
    markers = [v for v, kind in enumerate(S.kinds) if kind == "marking"]
    assert sorted(label for v in markers for label in S.graph.marks[v]) == [1, 2]
    assert all(S.levels[v] == 2 for v in markers)
    assert S.smooth() == AlignedGraph(PATH, (0, 1, 2))


def test_subdivision_at_radius_splits_crossing_edges():
    AG = AlignedGraph(CHERRY, (0, 1, 2))
    S = subdivision_at_radius(AG, 1)
    assert S.kinds.count("bivalent") == 1
    assert S.smooth() == AG
    with pytest.raises(DomainError):
        subdivision_at_radius(AG, 3)


# -- merges -----------------------------------------------------------------


def test_merge_examples():
    AG = AlignedGraph(PATH, (0, 1, 2))
    one = radial_merge(AG, 1)
    assert one.graph.weights == (1, 0) and one.levels == (0, 1)
    assert one.graph.marks == (frozenset({1, 2}), frozenset())
    two = radial_merge(AG, 2)
    assert two.graph.num_vertices == 2 and two.levels == (0, 1)
    assert two.graph.degrees == (0, 2)
    with pytest.raises(DomainError):
        radial_merge(AG, 0)


def test_merges_commute():
    for AG in ALIGNED:
        for j in range(2, AG.k + 1):
            for i in range(1, j):
                left = radial_merge(radial_merge(AG, j), i)
                right = radial_merge(radial_merge(AG, i), j - 1)
                assert canonical_aligned(left)[0].encoding == canonical_aligned(right)[0].encoding


def test_core_edge_contraction_keeps_levels():
    G = V([(0, 1, {1}), (0, 0, ()), (0, 1, ())], [(0, 1), (1, 0), (1, 2)])
    AG = AlignedGraph(G, (0, 0, 1))
    H = contract_core_edge(AG, 0)
    assert H.graph.edges == ((0, 0), (0, 1)) and H.levels == (0, 1)
    with pytest.raises(DomainError):
        contract_core_edge(AG, 2)


def test_dmin_never_decreases():
    for AG in ALIGNED:
        if AG.graph.d == 0:
            continue
        base = AG.d_min
        for i in range(1, AG.k + 1):
            assert radial_merge(AG, i).d_min >= base
        for e in AG.core_edges:
            assert contract_core_edge(AG, e).d_min >= base


# -- contraction radius -----------------------------------------------------


def test_contraction_radius_examples():
    assert contraction_radius(AlignedGraph(V([(1, 2, {1})]), (0,))) == (0, 2)
    assert contraction_radius(AlignedGraph(CHERRY, (0, 1, 1))) == (1, 2)
    assert contraction_radius(AlignedGraph(CHERRY, (0, 1, 2))) == (1, 1)
    with pytest.raises(DomainError):
        contraction_radius(AlignedGraph(V([(1, 0, {1})]), (0,)))


def test_tilde_category_membership():
    assert in_tilde_category(AlignedGraph(CHERRY, (0, 1, 1)))
    assert not in_tilde_category(AlignedGraph(CHERRY, (0, 1, 2)))
    core_one = AlignedGraph(V([(1, 1, {1}), (0, 1, ())], [(0, 1)]), (0, 1))
    assert contraction_radius(core_one) == (0, 1)
    assert not in_tilde_category(core_one)
    assert in_tilde_category(core_one, criterion="rad-aware")
    with pytest.raises(DomainError):
        in_tilde_category(core_one, criterion="bogus")


def test_subdivision_edge_counts():
    G = V([(1, 0, {1}), (0, 0, ()), (0, 0, ()), (0, 2, ())], [(0, 1), (1, 2), (0, 3)])
    S = canonical_subdivision(AlignedGraph(G, (0, 1, 2, 3)))
    # the edge 0 -> 3 spans three levels; the other two span one each
    assert S.kinds.count("bivalent") == 2
    assert S.graph.num_edges == 5
    assert contraction_radius(AlignedGraph(G, (0, 1, 2, 3))) == (3, 2)


def test_subdivision_at_radius_unchanged_when_nothing_crosses():
    G = V([(1, 0, ()), (0, 0, {1}), (0, 3, ())], [(0, 1), (1, 2)])
    AG = AlignedGraph(G, (0, 1, 2))
    S = subdivision_at_radius(AG, 1)
    assert S.graph == G and all(kind is None for kind in S.kinds)
    assert contraction_radius(AG) == (2, 3)
