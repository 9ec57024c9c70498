"""The rank-3 principal stratum automaton.

Nodes are colored turn structures over rank-3 graphs with a single valence-4
vertex, a stable triangle at every vertex, exactly one nonperiodic (red)
direction at the valence-4 vertex, and exactly one red turn.  Directed edges
are proper full folds at the valence-4 vertex compatible with the structures
at both ends, plus signed relabelings of the five edge labels; relabelings
make each orbit strongly connected, so the strongly connected structure lives
on the quotient by relabeling classes.

A node is stored as a plain key ``(groups, red, turns)``: the partition of
the ten directions into initial-vertex groups (vertex names are forgotten),
the red direction, and the sorted turn tuple.  The fold transport is
edge-local: the folded direction is renamed onto the target direction inside
every turn, the fresh turn crossed by the folded edge-path is added as the
new red edge, and the moved direction becomes the new red vertex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .digraph import strongly_connected_components
from .folds import FoldSequence, apply_fold, push_permutations, stallings_decompose
from .graphs import (
    GraphMap,
    GraphStructureError,
    OrientedGraph,
    suppress_bivalent_map,
)
from .spectral import transition_matrix
from .whitehead import (
    LttStructure,
    Relabeling,
    ltt_structure,
    signed_permutations,
)

RANK3_EDGE_NAMES = ("a", "b", "c", "d", "e")

NodeKey = tuple  # (groups, red, turns), all plain nested tuples


# -- signed permutation action ------------------------------------------------


def apply_signed(sigma: tuple[int, ...], d: int) -> int:
    return sigma[d - 1] if d > 0 else -sigma[-d - 1]


def compose_signed(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    """Apply t, then s."""
    return tuple(apply_signed(s, t[i]) for i in range(len(t)))


def invert_signed(s: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(s)
    for i, x in enumerate(s):
        out[abs(x) - 1] = (i + 1) if x > 0 else -(i + 1)
    return tuple(out)


def _canonical_groups(groups) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(g)) for g in groups)))


def _canonical_turns(turns) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((min(t), max(t)) for t in turns))


def relabel_key(key: NodeKey, sigma: tuple[int, ...]) -> NodeKey:
    groups, red, turns = key
    new_groups = _canonical_groups(
        tuple(apply_signed(sigma, d) for d in g) for g in groups
    )
    new_turns = _canonical_turns(
        (apply_signed(sigma, t[0]), apply_signed(sigma, t[1])) for t in turns
    )
    return (new_groups, apply_signed(sigma, red), new_turns)


def key_from_structure(structure: LttStructure) -> NodeKey:
    if len(structure.red_vertices) != 1:
        raise GraphStructureError("node keys need exactly one red direction")
    partition, red_set, turns = structure.exact_key()
    return (
        _canonical_groups(partition),
        next(iter(red_set)),
        _canonical_turns(turns),
    )


def graph_from_groups(
    groups: tuple[tuple[int, ...], ...], edge_names: tuple[str, ...] = RANK3_EDGE_NAMES
) -> OrientedGraph:
    at = {}
    for gi, group in enumerate(groups):
        for d in group:
            at[d] = gi
    n = len(edge_names)
    return OrientedGraph(
        vertex_names=tuple(f"u{gi}" for gi in range(len(groups))),
        edge_names=edge_names,
        ends=tuple((at[i + 1], at[-(i + 1)]) for i in range(n)),
    )


def structure_from_key(key: NodeKey) -> LttStructure:
    groups, red, turns = key
    return LttStructure(
        graph=graph_from_groups(groups),
        red_vertices=frozenset((red,)),
        turns=frozenset(turns),
    )


# -- the node profile ----------------------------------------------------------


def node_profile_errors(key: NodeKey) -> list[str]:
    """Check the four structural conditions that define automaton nodes."""
    groups, red, turns = key
    errors = []
    sizes = sorted(len(g) for g in groups)
    if sizes != [3, 3, 4]:
        errors.append(f"valence profile {sizes} is not [3, 3, 4]")
        return errors
    big = next(g for g in groups if len(g) == 4)
    if red not in big:
        errors.append("red direction is not at the valence-4 vertex")
    red_edges = [t for t in turns if red in t]
    if len(red_edges) != 1:
        errors.append(f"red direction lies in {len(red_edges)} turns, not 1")
    for group in groups:
        purple = [d for d in group if d != red]
        want = {(min(p), max(p)) for p in itertools.combinations(purple, 2)}
        have = {t for t in turns if t[0] in purple and t[1] in purple}
        if len(purple) != 3 or want != have:
            errors.append("stable subgraph at some vertex is not a triangle")
            break
    if len(turns) != 10:
        errors.append(f"{len(turns)} turns instead of 10")
    return errors


# -- fold transport -------------------------------------------------------------


def fold_candidates(key: NodeKey) -> list[tuple[int, int]]:
    """Ordered pairs (e1, e0) of distinct-edge directions at the valence-4
    vertex whose pair is not a turn of the structure.  The triangle structure
    forces every such pair to involve the red direction."""
    groups, red, turns = key
    big = next(g for g in groups if len(g) == 4)
    turn_set = set(turns)
    out = []
    for e1, e0 in itertools.permutations(big, 2):
        if abs(e1) == abs(e0):
            continue
        if (min(e1, e0), max(e1, e0)) in turn_set:
            continue
        out.append((e1, e0))
    return out


def transport(key: NodeKey, e1: int, e0: int) -> NodeKey | None:
    """Edge-local image of a node under the fold of e1 over e0.

    Replaces e1 by e0 inside every turn, adds the turn crossed by the folded
    image path as the new red edge, and moves e1 to the terminal vertex of
    e0 as the new red direction.  Returns None when the result violates the
    node profile.
    """
    groups, red, turns = key
    new_turns = set()
    for t in turns:
        a = e0 if t[0] == e1 else t[0]
        b = e0 if t[1] == e1 else t[1]
        if a == b:
            return None
        new_turns.add((min(a, b), max(a, b)))
    new_turns.add((min(e1, -e0), max(e1, -e0)))
    moved = []
    for g in groups:
        g2 = [d for d in g if d != e1]
        if -e0 in g2:
            g2.append(e1)
        moved.append(tuple(sorted(g2)))
    out = (_canonical_groups(moved), e1, _canonical_turns(new_turns))
    if node_profile_errors(out):
        return None
    return out


# -- enumeration -----------------------------------------------------------------


def enumerate_labeled_graphs(edge_names: tuple[str, ...] = RANK3_EDGE_NAMES):
    """All connected (4,3,3)-graphs on five labeled, oriented edges, up to
    vertex renaming (encoded as direction partitions)."""
    n = len(edge_names)
    seen = set()
    out = []
    for ends in itertools.product(itertools.product(range(3), repeat=2), repeat=n):
        counts = [0, 0, 0]
        for u, v in ends:
            counts[u] += 1
            counts[v] += 1
        if sorted(counts) != [3, 3, 4]:
            continue
        groups_raw = {0: [], 1: [], 2: []}
        for i, (u, v) in enumerate(ends):
            groups_raw[u].append(i + 1)
            groups_raw[v].append(-(i + 1))
        # connectivity over the three vertices
        adj = {0: set(), 1: set(), 2: set()}
        for u, v in ends:
            adj[u].add(v)
            adj[v].add(u)
        comp = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    frontier.append(y)
        if len(comp) != 3:
            continue
        key = _canonical_groups(groups_raw.values())
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def enumerate_nodes(rank: int = 3) -> list[NodeKey]:
    """All node structures over all (4,3,3) rank-3 graphs: for each labeled
    graph, each choice of red direction at the valence-4 vertex and of the
    purple direction its single red turn attaches to."""
    if rank != 3:
        raise GraphStructureError("node enumeration is implemented for rank 3")
    nodes = []
    for groups in enumerate_labeled_graphs():
        big = next(g for g in groups if len(g) == 4)
        for red in big:
            purple_big = [d for d in big if d != red]
            base_turns = []
            for group in groups:
                purple = [d for d in group if d != red]
                base_turns.extend(
                    (min(p), max(p)) for p in itertools.combinations(purple, 2)
                )
            for attach in purple_big:
                turns = _canonical_turns(
                    base_turns + [(min(red, attach), max(red, attach))]
                )
                key = (groups, red, turns)
                assert not node_profile_errors(key)
                nodes.append(key)
    return sorted(nodes)


# -- the automaton ---------------------------------------------------------------


_GENERATORS = None


def _group_generators(n: int = 5):
    global _GENERATORS
    if _GENERATORS is None:
        swap = (2, 1) + tuple(range(3, n + 1))
        cycle = tuple(range(2, n + 1)) + (1,)
        flip = (-1,) + tuple(range(2, n + 1))
        _GENERATORS = (swap, cycle, flip)
    return _GENERATORS


@dataclass(frozen=True)
class FoldEdge:
    source: int
    target: int
    e1: int
    e0: int


@dataclass
class Automaton:
    """Exact nodes, fold edges, relabeling classes, and the quotient SCCs."""

    nodes: list[NodeKey]
    node_index: dict[NodeKey, int]
    fold_edges: list[FoldEdge]
    class_of: list[int]
    class_members: list[list[int]]
    class_rep: list[int]
    rep_word: list[tuple[int, ...]]  # node -> sigma with  sigma . rep == node
    rep_stabilizer: list[list[tuple[int, ...]]]  # per class, at the representative
    quotient_edges: dict[tuple[int, int], int]
    sccs: list[list[int]]  # class-level strongly connected components
    node_one: int  # exact node of the reference single-fold map

    @property
    def n_classes(self) -> int:
        return len(self.class_members)

    def out_folds(self, node_id: int) -> list[FoldEdge]:
        return [e for e in self.fold_edges if e.source == node_id]

    def loop_sccs(self) -> list[int]:
        """Indices of class-level components containing a directed fold loop."""
        comp_of = {}
        for ci, comp in enumerate(self.sccs):
            for c in comp:
                comp_of[c] = ci
        out = set()
        for (c1, c2), _count in self.quotient_edges.items():
            if comp_of[c1] == comp_of[c2]:
                out.add(comp_of[c1])
        return sorted(out)

    def permutations_between(self, n1: int, n2: int) -> list[tuple[int, ...]]:
        """All sigma with sigma . node(n1) == node(n2)."""
        if self.class_of[n1] != self.class_of[n2]:
            return []
        w1 = self.rep_word[n1]
        w2 = self.rep_word[n2]
        inv1 = invert_signed(w1)
        return [
            compose_signed(w2, compose_signed(s, inv1))
            for s in self.rep_stabilizer[self.class_of[n1]]
        ]


def build_automaton(rank: int = 3, reference: GraphMap | None = None) -> Automaton:
    """Enumerate nodes and fold edges, group nodes into relabeling classes,
    and compute the class-level strongly connected components."""
    if rank != 3:
        raise GraphStructureError("the automaton is implemented for rank 3")
    nodes = enumerate_nodes(rank)
    node_index = {key: i for i, key in enumerate(nodes)}

    fold_edges = []
    for i, key in enumerate(nodes):
        for e1, e0 in fold_candidates(key):
            out = transport(key, e1, e0)
            if out is None:
                continue
            j = node_index.get(out)
            if j is None:
                raise GraphStructureError("fold transport left the node set")
            fold_edges.append(FoldEdge(i, j, e1, e0))

    # relabeling classes by orbit search
    n_labels = len(RANK3_EDGE_NAMES)
    identity = tuple(range(1, n_labels + 1))
    class_of = [-1] * len(nodes)
    class_members: list[list[int]] = []
    class_rep: list[int] = []
    rep_word: list[tuple[int, ...]] = [identity] * len(nodes)
    for i, key in enumerate(nodes):
        if class_of[i] != -1:
            continue
        cid = len(class_members)
        members = [i]
        class_of[i] = cid
        rep_word[i] = identity
        frontier = [(key, identity)]
        while frontier:
            cur, word = frontier.pop()
            for gen in _group_generators(n_labels):
                nxt = relabel_key(cur, gen)
                j = node_index[nxt]
                if class_of[j] == -1:
                    class_of[j] = cid
                    members.append(j)
                    nw = compose_signed(gen, word)
                    rep_word[j] = nw
                    frontier.append((nxt, nw))
        class_members.append(sorted(members))
        class_rep.append(i)

    rep_stabilizer: list[list[tuple[int, ...]]] = []
    for cid, rep in enumerate(class_rep):
        key = nodes[rep]
        stab = [
            sigma
            for sigma in signed_permutations(n_labels)
            if relabel_key(key, sigma) == key
        ]
        rep_stabilizer.append(stab)

    quotient_edges: dict[tuple[int, int], int] = {}
    for e in fold_edges:
        pair = (class_of[e.source], class_of[e.target])
        quotient_edges[pair] = quotient_edges.get(pair, 0) + 1

    adjacency: dict[int, list[int]] = {}
    for c1, c2 in quotient_edges:
        adjacency.setdefault(c1, []).append(c2)
    sccs = strongly_connected_components(len(class_members), adjacency)

    if reference is None:
        from .catalog import single_fold_map

        reference = single_fold_map()
    ref_key = key_from_structure(ltt_structure(reference))
    node_one = node_index.get(ref_key)
    if node_one is None:
        raise GraphStructureError("reference structure is not an automaton node")

    return Automaton(
        nodes=nodes,
        node_index=node_index,
        fold_edges=fold_edges,
        class_of=class_of,
        class_members=class_members,
        class_rep=class_rep,
        rep_word=rep_word,
        rep_stabilizer=rep_stabilizer,
        quotient_edges=quotient_edges,
        sccs=sccs,
        node_one=node_one,
    )


# -- loops and maps ----------------------------------------------------------------


@dataclass(frozen=True)
class DirectedLoop:
    """A closed fold walk: exact node ids, the folds between them, and the
    relabeling closing the walk back to its start."""

    node_ids: tuple[int, ...]
    folds: tuple[tuple[int, int], ...]
    closing: tuple[int, ...]


def enumerate_loops(
    automaton: Automaton, max_length: int, start_nodes: list[int] | None = None
) -> list[DirectedLoop]:
    """All fold loops of length <= max_length based at the given exact nodes
    (class representatives by default), with every closing relabeling."""
    if start_nodes is None:
        start_nodes = list(automaton.class_rep)
    out: list[DirectedLoop] = []

    def extend(path_nodes: list[int], path_folds: list[tuple[int, int]]):
        current = path_nodes[-1]
        if len(path_folds) >= 1 and automaton.class_of[current] == automaton.class_of[path_nodes[0]]:
            for sigma in automaton.permutations_between(current, path_nodes[0]):
                out.append(
                    DirectedLoop(tuple(path_nodes), tuple(path_folds), sigma)
                )
        if len(path_folds) == max_length:
            return
        for e in automaton.out_folds(current):
            extend(path_nodes + [e.target], path_folds + [(e.e1, e.e0)])

    for start in start_nodes:
        extend([start], [])
    return out


def loop_to_map(automaton: Automaton, loop: DirectedLoop) -> GraphMap:
    """Compose a directed loop into a graph self-map, folds first and the
    closing relabeling last."""
    graph = graph_from_groups(automaton.nodes[loop.node_ids[0]][0])
    steps = []
    current = graph
    for e1, e0 in loop.folds:
        move = apply_fold(current, e1, e0, "proper_full")
        steps.append(move)
        current = move.target
    closing = Relabeling(current, graph, loop.closing)
    seq = push_permutations(steps + [closing])
    return seq.composed_map()


def loop_fold_sequence(automaton: Automaton, loop: DirectedLoop) -> FoldSequence:
    graph = graph_from_groups(automaton.nodes[loop.node_ids[0]][0])
    steps = []
    current = graph
    for e1, e0 in loop.folds:
        move = apply_fold(current, e1, e0, "proper_full")
        steps.append(move)
        current = move.target
    closing = Relabeling(current, graph, loop.closing)
    return push_permutations(steps + [closing])


def rotate_loop(automaton: Automaton, loop: DirectedLoop) -> DirectedLoop:
    """The loop based one fold later: the first fold is pulled through the
    closing relabeling and appended at the end."""
    if not loop.folds:
        return loop
    inv = invert_signed(loop.closing)
    e1, e0 = loop.folds[0]
    pulled = (apply_signed(inv, e1), apply_signed(inv, e0))
    last = loop.node_ids[-1]
    target_key = transport(automaton.nodes[last], *pulled)
    if target_key is None or target_key not in automaton.node_index:
        raise GraphStructureError("loop rotation left the node set")
    new_nodes = loop.node_ids[1:] + (automaton.node_index[target_key],)
    return DirectedLoop(new_nodes, loop.folds[1:] + (pulled,), loop.closing)


def decomposition_to_loop(
    automaton: Automaton, seq: FoldSequence
) -> DirectedLoop | None:
    """Locate a fold decomposition (or a fold conjugate of it) as a directed
    loop in the automaton.

    Tries every rotation of the sequence; for a fully trivalent base graph it
    first passes to the bivalent-suppressed conjugate of the once-rotated
    map, whose graph has the valence-(4,3,3) profile, and re-decomposes.
    Returns None when no rotation lands in the node set.
    """
    for j in range(len(seq) + 1):
        from .folds import rotate

        rotated = rotate(seq, j)
        found = _walk_decomposition(automaton, rotated)
        if found is not None:
            return found
    base = seq.base_graph
    if base.valence_profile() == (3, 3, 3, 3) and base.n_edges == 6:
        from .folds import rotate

        for j in range(len(seq)):
            rotated = rotate(seq, j)
            try:
                smoothed = suppress_bivalent_map(rotated.composed_map())
            except GraphStructureError:
                continue
            try:
                seq2 = stallings_decompose(smoothed)
            except GraphStructureError:
                continue
            found = _walk_decomposition(automaton, seq2)
            if found is not None:
                return found
    return None


def _walk_decomposition(automaton: Automaton, seq: FoldSequence) -> DirectedLoop | None:
    """Match a fold sequence on a (4,3,3) graph against the automaton."""
    base = seq.base_graph
    if sorted(base.valence_profile()) != [3, 3, 4] or base.n_edges != 5:
        return None
    if any(move.kind != "proper_full" for move in seq.moves):
        return None
    try:
        start_structure = ltt_structure(seq.composed_map())
        start_key = key_from_structure(start_structure)
    except GraphStructureError:
        return None
    # Map the sequence's labels onto the automaton alphabet.
    match = None
    for sigma in signed_permutations(base.n_edges):
        cand = relabel_key(start_key, sigma)
        if cand in automaton.node_index:
            match = sigma
            break
    if match is None:
        return None
    node_ids = [automaton.node_index[relabel_key(start_key, match)]]
    folds = []
    key = relabel_key(start_key, match)
    for move in seq.moves:
        e1 = apply_signed(match, move.e1)
        e0 = apply_signed(match, move.e0)
        out = transport(key, e1, e0)
        if out is None or out not in automaton.node_index:
            return None
        folds.append((e1, e0))
        node_ids.append(automaton.node_index[out])
        key = out
    closing_candidates = automaton.permutations_between(node_ids[-1], node_ids[0])
    # The decomposition's own relabeling, pushed through the alphabet match.
    target_sigma = compose_signed(
        match, compose_signed(seq.final.signed_images, invert_signed(match))
    )
    if target_sigma in closing_candidates or relabel_key(key, target_sigma) == relabel_key(
        start_key, match
    ):
        return DirectedLoop(tuple(node_ids), tuple(folds), target_sigma)
    if closing_candidates:
        return DirectedLoop(tuple(node_ids), tuple(folds), closing_candidates[0])
    return None


# -- analysis of the loop component -------------------------------------------------


@dataclass(frozen=True)
class NodeOneAnalysis:
    node_one_class: int
    removed_scc_classes: tuple[int, ...]  # the loop component before removal
    residual_loop_classes: tuple[int, ...]  # loop-carrying classes after removal
    also_disconnected: tuple[int, ...]  # classes that leave the loop part with it
    loops_checked: int
    loops_reducible: int
    loops_with_protected_label: int
    protected_labels: dict[int, int] | None  # class -> protected edge label
    protected_signs_preserved: bool
    entering_folds: int
    entering_sources: tuple[int, ...]
    underlying_graph_classes: tuple[tuple, ...]

    @property
    def obstruction_holds(self) -> bool:
        return self.loops_checked == self.loops_reducible


def _graph_class_key(groups) -> tuple:
    """Canonical form of the underlying labeled graph modulo relabelings."""
    best = None
    for sigma in signed_permutations(len(RANK3_EDGE_NAMES)):
        cand = _canonical_groups(
            tuple(apply_signed(sigma, d) for d in g) for g in groups
        )
        if best is None or cand < best:
            best = cand
    return best


def node_one_analysis(automaton: Automaton, loop_bound: int = 4) -> NodeOneAnalysis:
    """Remove the reference node's relabeling class and study what remains.

    Verifies, by direct composition, that every directed loop of fold-length
    up to the bound confined to the residual loop component has a reducible
    transition matrix, and searches for the structural witness: an
    equivariant choice of edge label, one per class, never folded over
    another edge and preserved by every closing relabeling within the
    component.  Also counts the folds entering the reference node and
    reports the underlying graphs involved.
    """
    from .spectral import invariant_edge_set, is_irreducible as matrix_irreducible

    node_one_class = automaton.class_of[automaton.node_one]
    comp_of = {}
    for ci, comp in enumerate(automaton.sccs):
        for c in comp:
            comp_of[c] = ci
    loop_comps = set(automaton.loop_sccs())
    removed_scc = tuple(
        sorted(c for c in range(automaton.n_classes) if comp_of[c] in loop_comps)
    )

    # SCCs of the quotient with the reference class deleted
    keep = [c for c in range(automaton.n_classes) if c != node_one_class]
    index = {c: i for i, c in enumerate(keep)}
    adjacency: dict[int, list[int]] = {}
    for (c1, c2), _n in automaton.quotient_edges.items():
        if c1 in index and c2 in index:
            adjacency.setdefault(index[c1], []).append(index[c2])
    comps = strongly_connected_components(len(keep), adjacency)
    comp_of2 = {}
    for ci, comp in enumerate(comps):
        for i in comp:
            comp_of2[keep[i]] = ci
    residual_loops = set()
    for (c1, c2), _n in automaton.quotient_edges.items():
        if c1 in index and c2 in index and comp_of2[c1] == comp_of2[c2]:
            residual_loops.add(comp_of2[c1])
    residual_classes = tuple(
        sorted(c for c in keep if comp_of2[c] in residual_loops)
    )
    also_disconnected = tuple(
        sorted(set(removed_scc) - set(residual_classes) - {node_one_class})
    )

    # direct composition of all short loops within the residual component
    residual_set = set(residual_classes)
    reps = [automaton.class_rep[c] for c in sorted(residual_set)]
    loops = [
        lp
        for lp in enumerate_loops(automaton, loop_bound, start_nodes=reps)
        if all(automaton.class_of[n] in residual_set for n in lp.node_ids)
    ]
    reducible = 0
    with_label = 0
    for lp in loops:
        m = loop_to_map(automaton, lp)
        matrix = transition_matrix(m)
        if not matrix_irreducible(matrix) and invariant_edge_set(matrix) is not None:
            reducible += 1
        # some edge label maps over a single edge for the whole loop
        if any(sum(row) == 1 for row in matrix.rows):
            with_label += 1

    protected, signs_ok = _protected_labels(automaton, residual_classes)

    entering = [e for e in automaton.fold_edges if e.target == automaton.node_one]
    graph_keys = {
        _graph_class_key(automaton.nodes[automaton.node_one][0]),
    }
    for e in entering:
        graph_keys.add(_graph_class_key(automaton.nodes[e.source][0]))

    return NodeOneAnalysis(
        node_one_class=node_one_class,
        removed_scc_classes=removed_scc,
        residual_loop_classes=residual_classes,
        also_disconnected=also_disconnected,
        loops_checked=len(loops),
        loops_reducible=reducible,
        loops_with_protected_label=with_label,
        protected_labels=protected,
        protected_signs_preserved=signs_ok,
        entering_folds=len(entering),
        entering_sources=tuple(sorted({e.source for e in entering})),
        underlying_graph_classes=tuple(sorted(graph_keys)),
    )


def _protected_labels(
    automaton: Automaton, classes: tuple[int, ...]
) -> tuple[dict[int, int] | None, bool]:
    """Search for an equivariant protected-label assignment on a class set.

    Assigns each class an (unsigned) edge label, read at the class
    representative, such that no fold edge within the set folds that label
    over another edge and every translation between representatives carries
    the source label to the target label.  Orientation reversals are allowed
    (they do not affect the reducibility argument); whether orientations are
    in fact preserved by all representative stabilizers is reported alongside.
    """
    class_set = set(classes)
    if not class_set:
        return None, False
    edges = []
    for e in automaton.fold_edges:
        c1, c2 = automaton.class_of[e.source], automaton.class_of[e.target]
        if c1 in class_set and c2 in class_set:
            edges.append(e)
    n_labels = len(RANK3_EDGE_NAMES)
    start = classes[0]
    for seed in range(1, n_labels + 1):
        assignment = {start: seed}
        ok = True
        changed = True
        while changed and ok:
            changed = False
            for e in edges:
                c1, c2 = automaton.class_of[e.source], automaton.class_of[e.target]
                if c1 not in assignment:
                    continue
                label_at_source = abs(
                    apply_signed(automaton.rep_word[e.source], assignment[c1])
                )
                if abs(e.e1) == label_at_source:
                    ok = False
                    break
                pulled = abs(
                    apply_signed(
                        invert_signed(automaton.rep_word[e.target]), label_at_source
                    )
                )
                if c2 not in assignment:
                    assignment[c2] = pulled
                    changed = True
                elif assignment[c2] != pulled:
                    ok = False
                    break
        if not ok or set(assignment) != class_set:
            continue
        signs_preserved = True
        stable = True
        for c in classes:
            lab = assignment[c]
            for s in automaton.rep_stabilizer[c]:
                img = apply_signed(s, lab)
                if abs(img) != lab:
                    stable = False
                    break
                if img != lab:
                    signs_preserved = False
            if not stable:
                break
        if stable:
            return assignment, signs_preserved
    return None, False


# -- exports ---------------------------------------------------------------------


def automaton_to_dot(automaton: Automaton) -> str:
    """Class-level DOT rendering: one node per relabeling class (the
    reference node's class double-circled), black fold arrows labeled with
    exact-edge multiplicities, and green arrows marking the relabeling that
    closes each fold back onto the target representative."""
    lines = ["digraph principal_stratum {"]
    node_one_class = automaton.class_of[automaton.node_one]
    for cid in range(automaton.n_classes):
        shape = "doublecircle" if cid == node_one_class else "circle"
        size = len(automaton.class_members[cid])
        lines.append(
            f'  C{cid} [shape={shape}, label="class {cid}\\n{size} nodes"];'
        )
    for (c1, c2), count in sorted(automaton.quotient_edges.items()):
        lines.append(f'  C{c1} -> C{c2} [color=black, label="{count}"];')
    # one green identification arrow per class with a nontrivial stabilizer
    for cid, stab in enumerate(automaton.rep_stabilizer):
        if len(stab) > 1:
            lines.append(
                f'  C{cid} -> C{cid} [color=green, style=dashed, '
                f'label="{len(stab)} relabelings"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_json(automaton: Automaton, analysis: "NodeOneAnalysis | None" = None) -> dict:
    out = {
        "schema": "1",
        "kind": "automaton",
        "nodes": len(automaton.nodes),
        "fold_edges": len(automaton.fold_edges),
        "classes": automaton.n_classes,
        "class_sizes": sorted(len(m) for m in automaton.class_members),
        "scc_sizes": sorted(len(s) for s in automaton.sccs),
        "loop_scc_count": len(automaton.loop_sccs()),
        "reference_class": automaton.class_of[automaton.node_one],
    }
    if analysis is not None:
        out["reference_analysis"] = {
            "loop_component_classes": len(analysis.removed_scc_classes),
            "residual_loop_classes": len(analysis.residual_loop_classes),
            "also_disconnected": len(analysis.also_disconnected),
            "loops_checked": analysis.loops_checked,
            "loops_reducible": analysis.loops_reducible,
            "loops_with_protected_label": analysis.loops_with_protected_label,
            "entering_folds": analysis.entering_folds,
            "underlying_graph_classes": len(analysis.underlying_graph_classes),
            "obstruction_holds": analysis.obstruction_holds,
        }
    return out
