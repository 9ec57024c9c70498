from __future__ import annotations

import pytest

from traintrack.certify import (
    default_period_bound,
    expanding_edges,
    fic_check,
    illegal_turns,
    is_expanding,
    is_train_track,
    local_whitehead_connected,
    pnp_bounded_search,
    taken_turn_closure,
)
from traintrack.catalog import rose_graph
from traintrack.graphs import (
    GraphMap,
    GraphStructureError,
    identity_map,
    iterate_map,
    make_turn,
    taken_turns,
    tighten_dirs,
)
from traintrack.spectral import transition_matrix

REFERENCE_TURNS = [
    ("e", "~c"), ("a", "~e"), ("~b", "~a"), ("d", "b"), ("~e", "~d"),
    ("~a", "c"), ("b", "e"), ("~d", "a"), ("c", "~b"), ("e", "d"),
]


def named_turns(graph, pairs):
    return {
        make_turn(graph.direction_of(x), graph.direction_of(y)) for x, y in pairs
    }


def test_closure_reference(gmap):
    closure = taken_turn_closure(gmap)
    assert closure.turns == frozenset(named_turns(gmap.source, REFERENCE_TURNS))
    # the generation trace starts from the single seed turn inside g(d)
    seed = make_turn(gmap.source.direction_of("e"), gmap.source.direction_of("~c"))
    assert closure.trace[seed] is None


def test_closure_contains_turns_of_iterates(gmap, doubling_control):
    for g in (gmap, doubling_control):
        closure = taken_turn_closure(g)
        for k in range(1, 6):
            gk = iterate_map(g, k)
            for image in gk.edge_images:
                for t in taken_turns(image):
                    assert t in closure.turns


def test_closure_identity_empty(gmap):
    assert len(taken_turn_closure(identity_map(gmap.source))) == 0


def test_illegal_turns(gmap, psi):
    graph = gmap.source
    assert illegal_turns(gmap) == frozenset(
        {make_turn(graph.direction_of("d"), graph.direction_of("~c"))}
    )
    assert illegal_turns(identity_map(graph)) == frozenset()
    rose = psi.source
    assert make_turn(rose.direction_of("~z"), rose.direction_of("~x")) in illegal_turns(psi)


def test_is_train_track(gmap, psi):
    cert = is_train_track(gmap)
    assert cert.is_train_track
    bad = is_train_track(psi)
    assert not bad.is_train_track
    assert bad.witness == make_turn(
        psi.source.direction_of("~z"), psi.source.direction_of("~x")
    )
    assert is_train_track(identity_map(gmap.source)).is_train_track


def test_untight_image_is_witnessed():
    rose = rose_graph(("a", "b"))
    g = GraphMap(rose, rose, (0,), ((1, -1, 1), (2,)))
    cert = is_train_track(g)
    assert not cert.is_train_track
    assert cert.witness == "a"


def test_tt_implies_tight_powers(gmap, doubling_control, block_map):
    for g in (gmap, doubling_control, block_map):
        assert is_train_track(g).is_train_track
        for k in range(1, 7):
            gk = iterate_map(g, k)
            assert all(
                tighten_dirs(image) == image for image in gk.edge_images
            )


def test_is_expanding(gmap):
    assert is_expanding(gmap)
    assert not is_expanding(identity_map(gmap.source))


def test_expanding_agrees_with_row_sum_growth(gmap, psi, doubling_control, block_map):
    rose = rose_graph(("a", "b"))
    grow = GraphMap(rose, rose, (0,), ((1, 2), (2,)))
    for g in (gmap, psi, doubling_control, block_map, grow, identity_map(gmap.source)):
        matrix = transition_matrix(g)
        growing = set(expanding_edges(matrix))
        m64 = matrix.power(64)
        m32 = matrix.power(32)
        for i in range(matrix.dimension):
            unbounded = sum(m64.rows[i]) > sum(m32.rows[i])
            assert (i in growing) == unbounded


def test_growing_edge_feeding_cycle_not_expanding():
    rose = rose_graph(("a", "b"))
    grow = GraphMap(rose, rose, (0,), ((1, 2), (2,)))
    assert not is_expanding(grow)
    assert expanding_edges(transition_matrix(grow)) == (0,)


def test_pnp_reference_clean(gmap):
    assert default_period_bound(gmap) == 9
    result = pnp_bounded_search(gmap, 50, 9)
    assert result.clean
    assert result.length_bound == 50
    assert result.period_bound == 9


def test_pnp_rejects_non_expanding(gmap):
    with pytest.raises(GraphStructureError):
        pnp_bounded_search(identity_map(gmap.source))


def test_pnp_positive_control(doubling_control):
    result = pnp_bounded_search(doubling_control, 20, 4)
    assert result.verdict == "found"
    assert result.period == 1
    # verify the returned path is genuinely fixed
    image = tighten_dirs(doubling_control.image_of_path(result.path))
    assert image == result.path
    graph = doubling_control.source
    assert graph.path_name(result.path) == "~a b"


def test_local_whitehead_connectivity(gmap, block_map):
    assert all(local_whitehead_connected(gmap).values())
    assert not all(local_whitehead_connected(block_map).values())


def test_fic_reference(gmap):
    report = fic_check(gmap)
    assert report.passed
    assert report.train_track and report.pnp_clean
    assert report.irreducible and report.perron_frobenius
    assert report.whitehead_connected


def test_fic_identity_fails(gmap):
    report = fic_check(identity_map(gmap.source))
    assert not report.passed
    assert not report.irreducible
    assert not report.perron_frobenius


def test_fic_block_reducible(block_map):
    report = fic_check(block_map)
    assert not report.passed
    assert not report.irreducible
    assert report.invariant_edges is not None
    assert 0 < len(report.invariant_edges) < block_map.source.n_edges


def test_single_illegal_turn_for_principal(gmap):
    # maps certified principal have exactly one illegal turn
    from traintrack.search import single_fold_search

    assert len(illegal_turns(gmap)) == 1
    summary = single_fold_search(3)
    for report in summary.survivors:
        assert len(illegal_turns(report.map)) == 1
