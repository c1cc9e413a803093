import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from mdc.enumeration import EnumerationRequest, stable_graphs
from mdc.errors import StructureError
from mdc.graph import (
    DecoratedGraph,
    GraphIsomorphism,
    automorphisms,
    canonical_form,
    contract_edge,
    genus,
    is_connected,
    is_stable,
    one_end_vertices,
    one_ends,
    permutation_sign,
    sprout,
)

from oracles import brute_automorphisms, brute_canonical_key, brute_isomorphic

V = DecoratedGraph.from_vertices


def small_catalog():
    graphs = []
    for g, n, d in [(0, 3, 1), (0, 4, 1), (0, 2, 2), (0, 1, 3), (1, 1, 2), (1, 0, 2)]:
        graphs += list(stable_graphs(EnumerationRequest(g, n, d)))
    return graphs


CATALOG = small_catalog()


def relabel(G: DecoratedGraph, rng: random.Random) -> DecoratedGraph:
    """A random isomorphic copy: permute vertices, reorder edges, flip edge directions."""
    perm = list(range(G.num_vertices))
    rng.shuffle(perm)
    order = list(range(G.num_edges))
    rng.shuffle(order)
    hmap = [0] * (2 * G.num_edges)
    for new, old in enumerate(order):
        flip = rng.random() < 0.5
        hmap[2 * old], hmap[2 * old + 1] = (2 * new + 1, 2 * new) if flip else (2 * new, 2 * new + 1)
    return GraphIsomorphism(tuple(perm), tuple(hmap)).apply(G)


# -- genus / stability / contraction ----------------------------------------


def test_genus_examples():
    tree = V([(0, 1, ()), (0, 0, ()), (0, 1, ())], [(0, 1), (1, 2)])
    assert genus(tree) == 0
    assert genus(V([(1, 0, ())], [(0, 0)])) == 2
    assert genus(V([(0, 0, ()), (0, 0, ())], [(0, 1)] * 3)) == 2


def test_genus_rejects_disconnected():
    G = V([(0, 1, ()), (0, 1, ())])
    assert not is_connected(G)
    with pytest.raises(StructureError):
        genus(G)


def test_stability_examples():
    assert not is_stable(V([(1, 0, ())]))
    assert is_stable(V([(1, 0, {1})]))
    assert is_stable(V([(0, 1, ()), (0, 1, ())], [(0, 1)]))


def test_loop_valence_is_configurable():
    G = V([(0, 0, ())], [(0, 0)])
    assert not is_stable(G)
    G = V([(0, 0, {1})], [(0, 0)])
    assert is_stable(G, loop_valence=2)
    assert not is_stable(G, loop_valence=1)


def test_contract_edge_examples():
    H = contract_edge(V([(0, 1, ()), (1, 2, ())], [(0, 1)]), 0)
    assert (H.weights, H.degrees, H.num_edges) == ((1,), (3,), 0)
    H = contract_edge(V([(0, 1, {1})], [(0, 0)]), 0)
    assert (H.weights, H.num_edges) == ((1,), 0)
    H = contract_edge(V([(0, 1, ()), (0, 1, ())], [(0, 1), (0, 1)]), 1)
    assert H.edges == ((0, 0),)


def test_contract_edge_missing_edge():
    with pytest.raises(KeyError):
        contract_edge(V([(0, 1, ())]), 0)


def test_contraction_preserves_invariants_on_catalog():
    for G in CATALOG:
        for e in range(G.num_edges):
            H = contract_edge(G, e)
            assert genus(H) == genus(G)
            assert H.d == G.d
            assert is_connected(H)
            assert is_stable(H)


def test_json_round_trip_and_key_order():
    G = V([(0, 0, {1, 2}), (0, 1, ())], [(0, 1)])
    data = G.to_json()
    assert list(data) == ["g", "n", "d", "vertices", "edges"]
    assert DecoratedGraph.from_json(data) == G
    with pytest.raises(StructureError):
        DecoratedGraph.from_json({"vertices": [{"id": 0}]})


def test_dot_export_mentions_decorations():
    dot = V([(1, 2, {1})], [(0, 0)]).to_dot()
    assert "w=1" in dot and "m={1}" in dot and "v0 -- v0" in dot


# -- canonical forms --------------------------------------------------------


def test_canonical_form_examples():
    # the same cherry drawn with the centre first and in the middle
    middle = V([(0, 1, ()), (0, 0, ()), (0, 1, ())], [(0, 1), (1, 2)])
    first = V([(0, 0, ()), (0, 1, ()), (0, 1, ())], [(0, 1), (0, 2)])
    assert canonical_form(middle).encoding == canonical_form(first).encoding
    three = V([(0, 0, ()), (0, 1, ()), (0, 1, ()), (0, 1, ())], [(0, 1), (0, 2), (0, 3)])
    assert canonical_form(middle).encoding != canonical_form(three).encoding
    marked = V([(0, 0, ()), (0, 1, {1}), (0, 1, ())], [(0, 1), (0, 2)])
    assert canonical_form(marked).encoding != canonical_form(first).encoding


def test_representative_is_fixed():
    for G in CATALOG:
        cf = canonical_form(G)
        again = canonical_form(cf.graph)
        assert again.graph == cf.graph
        assert again.relabeling == GraphIsomorphism.identity(cf.graph)


def test_relabeling_maps_onto_representative():
    for G in CATALOG[:80]:
        cf = canonical_form(G)
        assert cf.relabeling.apply(G) == cf.graph


@settings(max_examples=300, deadline=None)
@given(st.integers(0, len(CATALOG) - 1), st.integers(0, 10**6))
def test_canonical_form_invariant_under_relabeling(idx, seed):
    G = CATALOG[idx]
    H = relabel(G, random.Random(seed))
    assert canonical_form(G).encoding == canonical_form(H).encoding


def test_canonical_form_matches_brute_force_isomorphism():
    graphs = [G for G in CATALOG if G.num_vertices <= 7]
    rng = random.Random(7)
    sample = rng.sample(graphs, min(len(graphs), 120))
    keys = {}
    for G in sample:
        keys.setdefault(brute_canonical_key(G), set()).add(canonical_form(G).encoding)
    # brute-force classes and canonical encodings are in bijection
    assert all(len(v) == 1 for v in keys.values())
    assert len({next(iter(v)) for v in keys.values()}) == len(keys)
    for G, H in itertools.combinations(sample[:40], 2):
        same = canonical_form(G).encoding == canonical_form(H).encoding
        assert same == brute_isomorphic(G, H)


# -- automorphisms ----------------------------------------------------------


def test_automorphism_examples():
    tree = V([(0, 0, {1}), (0, 1, {2}), (0, 1, ())], [(0, 1), (0, 2)])
    assert len(automorphisms(tree)) == 1
    two_cycle = V([(0, 1, ()), (0, 1, ())], [(0, 1), (0, 1)])
    assert len(automorphisms(two_cycle)) == 4
    loop = V([(0, 1, {1})], [(0, 0)])
    autos = automorphisms(loop)
    assert len(autos) == 2
    assert {phi.edge_map for phi in autos} == {(0,)}


def test_automorphisms_match_brute_force():
    graphs = [G for G in CATALOG if G.num_edges <= 4 and G.num_vertices <= 5]
    for G in graphs:
        ours = {(phi.vertex_map, phi.half_edge_map) for phi in automorphisms(G)}
        assert ours == set(brute_automorphisms(G))


def test_automorphism_group_closed():
    for G in CATALOG[:150]:
        group = {(phi.vertex_map, phi.half_edge_map) for phi in automorphisms(G)}
        for a, b in itertools.product(automorphisms(G), repeat=2):
            c = a.then(b)
            assert (c.vertex_map, c.half_edge_map) in group
        for a in automorphisms(G):
            inv = a.inverse()
            assert (inv.vertex_map, inv.half_edge_map) in group
            assert a.apply(G) == G


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([1, 2, 0]) == 1


# -- 1-ends and sprouting ----------------------------------------------------


def test_one_end_examples():
    star = V([(0, 0, {1, 2, 3}), (0, 1, ()), (0, 1, ())], [(0, 1), (0, 2)])
    assert one_ends(star) == {0, 1}
    assert one_ends(V([(0, 1, {1})], [(0, 0)])) == set()
    marked = V([(0, 0, {2, 3}), (0, 1, {1})], [(0, 1)])
    assert one_ends(marked) == set()


def test_sprout_examples():
    S = sprout(V([(0, 2, {1, 2, 3})]))
    assert S.degrees == (0, 1, 1) and S.edges == ((0, 1), (0, 2))
    G = V([(0, 1, ()), (0, 1, ())], [(0, 1)])
    assert sprout(G) == G


def test_sprout_idempotent_and_counts():
    for G in CATALOG:
        S = sprout(G)
        assert sprout(S) == S
        assert len(one_end_vertices(S)) == G.d
        assert all(S.degrees[v] == 0 for v in range(S.num_vertices) if v not in one_end_vertices(S))
