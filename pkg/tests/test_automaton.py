from __future__ import annotations

import random

import pytest

from traintrack.automaton import (
    apply_signed,
    compose_signed,
    decomposition_to_loop,
    enumerate_labeled_graphs,
    enumerate_loops,
    enumerate_nodes,
    fold_candidates,
    graph_from_groups,
    invert_signed,
    key_from_structure,
    loop_to_map,
    node_one_analysis,
    node_profile_errors,
    relabel_key,
    rotate_loop,
    transport,
)
from traintrack.certify import taken_turn_closure
from traintrack.folds import stallings_decompose
from traintrack.graphs import periodic_directions
from traintrack.spectral import is_irreducible, transition_matrix
from traintrack.whitehead import ltt_structure

# frozen counts from the enumeration, cross-checked by the orbit sums below
GOLDEN_LABELED_GRAPHS = 2000
GOLDEN_NODES = 24000
GOLDEN_FOLD_EDGES = 86400
GOLDEN_CLASSES = 17


def test_enumeration_counts(automaton):
    assert len(enumerate_labeled_graphs()) == GOLDEN_LABELED_GRAPHS
    assert len(automaton.nodes) == GOLDEN_NODES
    assert len(automaton.fold_edges) == GOLDEN_FOLD_EDGES
    assert automaton.n_classes == GOLDEN_CLASSES


def test_every_node_passes_the_profile(automaton):
    rng = random.Random(8)
    for key in rng.sample(automaton.nodes, 500):
        assert not node_profile_errors(key)


def test_class_sizes_partition_nodes(automaton):
    assert sum(len(m) for m in automaton.class_members) == GOLDEN_NODES
    # orbit-stabilizer: orbit size times stabilizer order is the group order
    for cid, members in enumerate(automaton.class_members):
        assert len(members) * len(automaton.rep_stabilizer[cid]) == 3840


def test_reference_structure_is_a_node(automaton, gmap):
    key = key_from_structure(ltt_structure(gmap))
    assert key in automaton.node_index
    assert automaton.node_index[key] == automaton.node_one


def test_fold_candidates_involve_the_red_direction(automaton):
    rng = random.Random(21)
    for key in rng.sample(automaton.nodes, 200):
        groups, red, _turns = key
        candidates = fold_candidates(key)
        for e1, e0 in candidates:
            assert red in (e1, e0)
        # four ordered candidates generically; two when the valence-4 vertex
        # carries a loop through the red direction (the same-edge pair drops)
        assert len(candidates) in (2, 4)
        if len(candidates) == 2:
            big = next(g for g in groups if len(g) == 4)
            assert -red in big


def test_transport_matches_direct_computation_on_reference(automaton, gmap):
    # one fold around the reference loop equals the structure of the rotated map
    seq = stallings_decompose(gmap)
    loop = decomposition_to_loop(automaton, seq)
    assert loop is not None
    key0 = automaton.nodes[loop.node_ids[0]]
    out = transport(key0, *loop.folds[0])
    assert out == automaton.nodes[loop.node_ids[1]]


def test_node_set_closed_under_relabeling(automaton):
    from traintrack.whitehead import signed_permutations

    rng = random.Random(5)
    sigmas = rng.sample(list(signed_permutations(5)), 6)
    for key in rng.sample(automaton.nodes, 60):
        for sigma in sigmas:
            image = relabel_key(key, sigma)
            assert image in automaton.node_index
            # classes are unions of orbits, so membership is stable
            assert (
                automaton.class_of[automaton.node_index[image]]
                == automaton.class_of[automaton.node_index[key]]
            )


def test_single_loop_component(automaton):
    loops = automaton.loop_sccs()
    assert len(loops) == 1
    component = automaton.sccs[loops[0]]
    assert len(component) == 14
    assert automaton.class_of[automaton.node_one] in component


def test_reference_loop_roundtrip(automaton, gmap):
    seq = stallings_decompose(gmap)
    loop = decomposition_to_loop(automaton, seq)
    assert loop is not None
    assert len(loop.folds) == 1
    rebuilt = loop_to_map(automaton, loop)
    assert rebuilt.edge_images == gmap.edge_images
    assert rebuilt.source.edge_names == gmap.source.edge_names


def test_loop_rotation_is_sound(automaton, gmap):
    seq = stallings_decompose(gmap)
    loop = decomposition_to_loop(automaton, seq)
    rotated = rotate_loop(automaton, loop)
    m = loop_to_map(automaton, rotated)
    assert is_irreducible(transition_matrix(m))
    # rotating a length-1 loop lands on a node in the same class
    assert automaton.class_of[rotated.node_ids[0]] == automaton.class_of[loop.node_ids[0]]


def test_transport_soundness_short_loops(automaton):
    """Master invariant: along every short loop the composed map has exactly
    the node's red direction nonperiodic and takes only node turns, with
    equality whenever the composition is irreducible."""
    loops = enumerate_loops(automaton, 2)
    assert loops
    equal = 0
    for loop in loops:
        m = loop_to_map(automaton, loop)
        key = automaton.nodes[loop.node_ids[0]]
        red = {d for d in m.source.directions()} - periodic_directions(m)
        assert red == {key[1]}
        closure = frozenset(taken_turn_closure(m).turns)
        node_turns = frozenset(tuple(t) for t in key[2])
        assert closure <= node_turns
        if is_irreducible(transition_matrix(m)):
            assert closure == node_turns
            equal += 1
    assert equal > 0


def test_node_one_analysis(automaton):
    analysis = node_one_analysis(automaton, loop_bound=3)
    assert analysis.obstruction_holds
    assert analysis.loops_checked > 0
    assert analysis.loops_with_protected_label == analysis.loops_checked
    assert analysis.entering_folds == 4
    assert len(analysis.residual_loop_classes) == 11
    assert len(analysis.also_disconnected) == 2
    # the reference node's graph and the fold sources' graphs: one class
    assert len(analysis.underlying_graph_classes) == 1


def test_signed_permutation_algebra():
    rng = random.Random(0)
    from traintrack.whitehead import signed_permutations

    sigmas = rng.sample(list(signed_permutations(5)), 10)
    for s in sigmas:
        assert compose_signed(s, invert_signed(s)) == (1, 2, 3, 4, 5)
        for d in range(1, 6):
            assert apply_signed(s, -d) == -apply_signed(s, d)


def test_loops_to_junk_maps_fail_fic(automaton):
    # loops inside the residual component never certify as fully irreducible
    from traintrack.certify import fic_check

    analysis = node_one_analysis(automaton, loop_bound=2)
    residual = set(analysis.residual_loop_classes)
    reps = [automaton.class_rep[c] for c in sorted(residual)]
    loops = [
        lp
        for lp in enumerate_loops(automaton, 2, start_nodes=reps)
        if all(automaton.class_of[n] in residual for n in lp.node_ids)
    ]
    assert loops
    for loop in loops[:40]:
        m = loop_to_map(automaton, loop)
        assert not fic_check(m, length_bound=20).passed


def test_rank_four_rejected():
    from traintrack.automaton import build_automaton
    from traintrack.graphs import GraphStructureError

    with pytest.raises(GraphStructureError):
        build_automaton(rank=4)
    with pytest.raises(GraphStructureError):
        enumerate_nodes(rank=4)


def test_graph_from_groups_reconstruction(automaton):
    rng = random.Random(31)
    for key in rng.sample(automaton.nodes, 50):
        graph = graph_from_groups(key[0])
        assert graph.valence_profile() == (3, 3, 4)
        assert graph.rank() == 3
        assert graph.is_connected()
