from __future__ import annotations

import random

import pytest

from traintrack.catalog import rose_graph, single_fold_graph
from traintrack.graphs import (
    GraphMap,
    GraphStructureError,
    compose,
    direction_map,
    gates,
    graph_invariants,
    identity_map,
    iterate_map,
    path_of,
    periodic_directions,
    suppress_bivalent,
    suppress_bivalent_map,
    tighten,
)


def random_tight_path(graph, rng, max_len=8):
    d = rng.choice(graph.directions())
    dirs = [d]
    for _ in range(rng.randrange(max_len)):
        options = [x for x in graph.directions_at(graph.terminal_vertex(dirs[-1]))]
        dirs.append(rng.choice(options))
    return tuple(dirs)


def test_tighten_full_cancellation(gmap):
    graph = gmap.source
    a = graph.direction_of("a")
    p = path_of(graph, (a, -a))
    out = tighten(graph, p)
    assert out.is_empty()
    assert out.basepoint == graph.initial_vertex(a)


def test_tighten_already_tight(gmap):
    graph = gmap.source
    image_of_d = gmap.edge_images[graph.edge_index("d")]
    assert graph.path_name(image_of_d) == "~e ~c"
    p = path_of(graph, image_of_d)
    assert tighten(graph, p).directions == image_of_d


def test_tighten_idempotent_and_endpoint_preserving(gmap):
    graph = gmap.source
    rng = random.Random(20240817)
    for _ in range(80):
        dirs = random_tight_path(graph, rng)
        p = path_of(graph, dirs)
        once = tighten(graph, p)
        twice = tighten(graph, once)
        assert once == twice
        if not once.is_empty():
            assert graph.initial_vertex(once.directions[0]) == graph.initial_vertex(dirs[0])
            assert graph.terminal_vertex(once.directions[-1]) == graph.terminal_vertex(dirs[-1])


def test_malformed_path_rejected(gmap):
    graph = gmap.source
    a = graph.direction_of("a")
    with pytest.raises(GraphStructureError):
        path_of(graph, (a, a))  # a's terminus is not a's origin


def test_compose_identity(gmap):
    ident = identity_map(gmap.source)
    assert compose(ident, gmap) == gmap
    assert compose(gmap, ident) == gmap


def test_compose_fold_factors_reproduce_reference(gmap):
    from traintrack.folds import stallings_decompose

    seq = stallings_decompose(gmap)
    assert len(seq.moves) == 1
    rebuilt = compose(seq.final.as_graph_map(), seq.moves[0].map)
    assert rebuilt == gmap


def test_compose_inverse_relabeling_is_identity(gmap):
    from traintrack.whitehead import relabeling_map

    sigma = (1, 2, 3, 5, 4)  # swap the parallel edges d and e
    rel = relabeling_map(gmap.source, sigma)
    assert compose(rel.inverse().as_graph_map(), rel.as_graph_map()) == identity_map(gmap.source)


def test_direction_map_matches_reference_cycle(gmap):
    graph = gmap.source
    dg = direction_map(gmap)
    expected_cycle = ["~c", "~e", "~a", "b", "~d", "c", "e", "a", "~b", "d", "~e"]
    for here, there in zip(expected_cycle, expected_cycle[1:]):
        assert dg[graph.direction_of(here)] == graph.direction_of(there)


def test_direction_map_of_identity(gmap):
    assert direction_map(identity_map(gmap.source)) == {
        d: d for d in gmap.source.directions()
    }


@pytest.mark.parametrize("power", [2, 3, 4])
def test_direction_map_of_power_is_iterated(gmap, power):
    dg = direction_map(gmap)
    iterated = {}
    for d in gmap.source.directions():
        x = d
        for _ in range(power):
            x = dg[x]
        iterated[d] = x
    assert iterated == direction_map(iterate_map(gmap, power))


def test_periodic_directions_reference(gmap):
    graph = gmap.source
    periodic = periodic_directions(gmap)
    assert len(periodic) == 9
    assert graph.direction_of("~c") not in periodic


def test_periodic_directions_identity(gmap):
    assert periodic_directions(identity_map(gmap.source)) == frozenset(
        gmap.source.directions()
    )


def test_periodic_directions_collapse_onto_cycle():
    # x -> y, y -> x, z -> x: the two-cycle {x, y} and its reverses persist
    graph = rose_graph(("x", "y", "z"))
    g = GraphMap(graph, graph, (0,), ((2,), (1,), (1,)))
    per = periodic_directions(g)
    assert per == frozenset({1, 2, -1, -2})


def test_gates_reference(gmap):
    graph = gmap.source
    gs = gates(gmap)
    assert len(gs) == 9
    pair = frozenset({graph.direction_of("d"), graph.direction_of("~c")})
    assert pair in gs
    assert all(len(s) == 1 for s in gs if s != pair)
    # each gate contains exactly one periodic direction
    per = periodic_directions(gmap)
    assert all(len(s & per) == 1 for s in gs)


def test_gates_identity_all_singletons(gmap):
    assert all(len(s) == 1 for s in gates(identity_map(gmap.source)))


def test_gates_refine_vertex_partition(gmap, psi):
    for g in (gmap, psi):
        for gate in gates(g):
            assert len({g.source.initial_vertex(d) for d in gate}) == 1


def test_gates_rose_example(psi):
    graph = psi.source
    pair = {graph.direction_of("~z"), graph.direction_of("~x")}
    assert any(pair <= gate for gate in gates(psi))


def test_graph_invariants_reference(gmap):
    inv = graph_invariants(gmap.source)
    assert inv.euler_characteristic == -2
    assert inv.rank == 3
    assert inv.valences == (3, 3, 4)
    assert inv.connected


def test_graph_invariants_rose():
    inv = graph_invariants(rose_graph(("x", "y", "z")))
    assert inv.euler_characteristic == -2
    assert inv.rank == 3
    assert inv.valences == (6,)


def test_graph_invariants_rank4_universe():
    from traintrack.search import build_universe

    for graph in build_universe(4).graphs:
        assert graph.n_vertices == 5
        assert graph.n_edges == 8
        assert graph_invariants(graph).rank == 4


def test_suppress_bivalent_roundtrip():
    graph = single_fold_graph()
    # subdivide edge a by hand: a1 = v1 -> w, a2 = w -> v2
    sub = graph.__class__(
        vertex_names=graph.vertex_names + ("w",),
        edge_names=("a1", "a2") + graph.edge_names[1:],
        ends=((1, 3), (3, 2)) + graph.ends[1:],
    )
    smoothed, subdivision = suppress_bivalent(sub)
    assert smoothed.n_edges == 5
    assert smoothed.valence_profile() == (3, 3, 4)
    assert subdivision.image_of_direction(1) == (1, 2)


def test_suppress_bivalent_map_conjugates():
    # two-petal rose with one petal subdivided: a1 = v->w, a2 = w->v, b loop
    graph = rose_graph(("a", "b"))
    sub = graph.__class__(
        vertex_names=("v", "w"),
        edge_names=("a1", "a2", "b"),
        ends=((0, 1), (1, 0), (0, 0)),
    )
    g = GraphMap(sub, sub, (0, 1), ((1,), (2, 3), (3,)))
    smoothed = suppress_bivalent_map(g)
    assert smoothed.source.n_edges == 2
    # the merged petal maps over itself then the other petal
    assert smoothed.edge_images == ((1, 2), (2,))
