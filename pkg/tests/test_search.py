from __future__ import annotations

import itertools

import pytest

from traintrack.folds import apply_fold, stallings_decompose
from traintrack.graphs import compose
from traintrack.search import (
    build_universe,
    graph_isomorphisms,
    single_fold_search,
    trivalent_universe,
    verify_minimal_stretch_argument,
    vertex_structure_audit,
    _canonical_multigraph,
    _conjugate_by_relabeling,
    _enumerate_degree_graphs,
    _is_connected_edges,
)

# frozen universe sizes (rank: iso classes), cross-checked below with networkx
GOLDEN_UNIVERSE_SIZES = {3: 5, 4: 30, 5: 193}


def test_universe_rank3(gmap):
    universe = build_universe(3)
    assert len(universe.graphs) == GOLDEN_UNIVERSE_SIZES[3]
    for graph in universe.graphs:
        assert graph.n_vertices == 3
        assert graph.n_edges == 5
        assert graph.valence_profile() == (3, 3, 4)
        assert graph.is_connected()
    # the reference map's graph appears
    want = _canonical_multigraph(3, _normalized_edges(gmap.source))
    have = {_canonical_multigraph(3, _normalized_edges(g)) for g in universe.graphs}
    assert want in have


def _normalized_edges(graph):
    return [tuple(sorted(e)) for e in graph.ends]


def test_universe_rank4():
    universe = build_universe(4)
    assert len(universe.graphs) == GOLDEN_UNIVERSE_SIZES[4]
    assert all(g.valence_profile() == (3, 3, 3, 3, 4) for g in universe.graphs)


def test_universe_isomorph_free_rank3_networkx():
    # independent grouping oracle via VF2 on multigraphs
    nx = pytest.importorskip("networkx")
    raw = [
        e
        for e in _enumerate_degree_graphs((4, 3, 3))
        if _is_connected_edges(3, e)
    ]
    reps: list = []
    for edges in raw:
        g = nx.MultiGraph()
        g.add_nodes_from(range(3))
        g.add_edges_from(edges)
        for rep in reps:
            if nx.is_isomorphic(g, rep):
                break
        else:
            reps.append(g)
    assert len(reps) == GOLDEN_UNIVERSE_SIZES[3]


def test_universe_isomorph_free_rank4_networkx():
    nx = pytest.importorskip("networkx")
    raw = [
        e
        for e in _enumerate_degree_graphs((4, 3, 3, 3, 3))
        if _is_connected_edges(5, e)
    ]
    reps: list = []
    for edges in raw:
        g = nx.MultiGraph()
        g.add_nodes_from(range(5))
        g.add_edges_from(edges)
        for rep in reps:
            if nx.is_isomorphic(g, rep):
                break
        else:
            reps.append(g)
    assert len(reps) == GOLDEN_UNIVERSE_SIZES[4]


def test_universe_pairwise_non_isomorphic_rank5():
    universe = build_universe(5)
    assert len(universe.graphs) == GOLDEN_UNIVERSE_SIZES[5]
    canons = {
        _canonical_multigraph(7, _normalized_edges(g)) for g in universe.graphs
    }
    assert len(canons) == GOLDEN_UNIVERSE_SIZES[5]


def test_trivalent_universe():
    graphs = trivalent_universe()
    assert len(graphs) == 5
    for g in graphs:
        assert g.valence_profile() == (3, 3, 3, 3)
        assert g.n_edges == 6
        assert g.rank() == 3


def test_graph_isomorphisms_roundtrip(gmap):
    graph = gmap.source
    autos = graph_isomorphisms(graph, graph)
    assert autos
    identity = tuple(range(1, 6))
    assert any(rel.signed_images == identity for rel in autos)
    for rel in autos:
        assert rel.as_graph_map().is_isomorphism()


def test_single_fold_search_rank3(gmap):
    summary = single_fold_search(3)
    assert summary.universe_size == 5
    assert summary.candidates == 260
    assert summary.tt_count == 160
    assert summary.irreducible_count == 16
    assert summary.fic_count == 16
    assert summary.principal_count == 8
    assert summary.class_count == 1
    rep = summary.survivors[summary.class_representatives[0]]
    assert _conjugate_by_relabeling(rep.map, gmap)


def test_single_fold_search_rank4():
    summary = single_fold_search(4)
    assert summary.class_count == 0
    assert summary.principal_count == 0
    assert summary.irreducible_count == 0


def test_search_determinism(gmap):
    plain = single_fold_search(3)
    shuffled = single_fold_search(3, shuffle_seed=12345)
    assert plain.candidates == shuffled.candidates
    assert plain.class_count == shuffled.class_count
    assert [r.map for r in plain.survivors] == [r.map for r in shuffled.survivors]


def test_search_parallel_agrees(gmap):
    serial = single_fold_search(3)
    parallel = single_fold_search(3, jobs=2)
    assert [r.map for r in serial.survivors] == [r.map for r in parallel.survivors]
    assert serial.candidates == parallel.candidates


def test_survivor_audits_and_roundtrip():
    summary = single_fold_search(3)
    for report in summary.survivors:
        audit = vertex_structure_audit(report)
        assert audit.passed
        seq = stallings_decompose(report.map)
        assert len(seq) == 1
        assert seq.composed_map() == report.map


def test_loop_fold_candidates_fail_early():
    # a fold whose target edge is a loop forces the fold vertex to map to
    # itself; no such composition is irreducible
    from traintrack.certify import is_train_track
    from traintrack.spectral import is_irreducible, transition_matrix

    universe = build_universe(3)
    checked = 0
    for graph in universe.graphs:
        v4 = max(range(graph.n_vertices), key=graph.valence)
        for e1, e0 in itertools.permutations(graph.directions_at(v4), 2):
            if abs(e1) == abs(e0):
                continue
            if graph.terminal_vertex(e0) != graph.initial_vertex(e0):
                continue  # not a loop
            move = apply_fold(graph, e1, e0)
            for sigma in graph_isomorphisms(move.target, graph):
                h = compose(sigma.as_graph_map(), move.map)
                checked += 1
                assert not (
                    is_train_track(h).is_train_track
                    and is_irreducible(transition_matrix(h))
                )
    assert checked > 0


def test_minimal_stretch_argument():
    report = verify_minimal_stretch_argument()
    assert report.passed
    names = [s.name for s in report.steps]
    assert names[0] == "characteristic polynomial"
    assert len(report.steps) == 5
