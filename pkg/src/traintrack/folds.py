"""Fold moves and Stallings fold decompositions.

A tight homotopy equivalence factors as a sequence of folds followed by a
graph isomorphism.  The decomposition driver below folds greedily: whenever
two directions at a vertex have images sharing a first edge, it folds their
maximal common image prefix, as a complete fold when the images coincide, a
proper full fold when one image is a prefix of the other, and a partial fold
(subdivide, then fold) otherwise.  Each move factors the residual map
exactly, so composing the produced sequence reproduces the input bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graphs import (
    GraphMap,
    GraphStructureError,
    OrientedGraph,
    compose,
    identity_map,
    reverse_path,
    rewrite_through_subdivision,
)
from .whitehead import Relabeling, relabeling_from_map


class NotHomotopyEquivalence(GraphStructureError):
    """Folding terminated without reaching a graph isomorphism."""

    def __init__(self, message: str, residual: GraphMap | None = None):
        super().__init__(message)
        self.residual = residual


FOLD_KINDS = ("proper_full", "complete", "partial")


@dataclass(frozen=True)
class FoldMove:
    """A single fold: directions ``e1`` (folded) and ``e0`` (folded over) in
    the source graph, with the induced edge-labeling on the result.

    Proper full folds preserve the edge count, complete folds drop it by one,
    partial folds subdivide (one new vertex and one new edge).
    """

    kind: str
    e1: int
    e0: int
    source: OrientedGraph
    target: OrientedGraph
    map: GraphMap

    def describe(self) -> str:
        return "%s fold of %s over %s" % (
            self.kind.replace("_", " "),
            self.source.direction_name(self.e1),
            self.source.direction_name(self.e0),
        )


def _fresh_name(taken, stem: str) -> str:
    i = 0
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def apply_fold(
    graph: OrientedGraph, e1: int, e0: int, kind: str = "proper_full"
) -> FoldMove:
    """Fold direction ``e1`` with direction ``e0`` at their common vertex.

    The two directions must belong to distinct edges.  A complete fold
    additionally needs distinct terminal vertices (identifying a bigon is not
    a homotopy equivalence and is rejected).
    """
    if kind not in FOLD_KINDS:
        raise GraphStructureError(f"unknown fold kind {kind!r}")
    if abs(e0) == abs(e1):
        raise GraphStructureError("cannot fold an edge with itself")
    v = graph.initial_vertex(e1)
    if graph.initial_vertex(e0) != v:
        raise GraphStructureError("fold directions have different initial vertices")

    if kind == "proper_full":
        w = graph.terminal_vertex(e0)
        x1 = abs(e1) - 1
        u0, u1 = graph.ends[x1]
        new_ends = list(graph.ends)
        new_ends[x1] = (w, u1) if e1 > 0 else (u0, w)
        target = OrientedGraph(graph.vertex_names, graph.edge_names, tuple(new_ends))
        images = []
        for i in range(graph.n_edges):
            if i == x1:
                images.append((e0, i + 1) if e1 > 0 else ((i + 1), -e0))
            else:
                images.append((i + 1,))
        fold_map = GraphMap(graph, target, tuple(range(graph.n_vertices)), tuple(images))
        return FoldMove(kind, e1, e0, graph, target, fold_map)

    if kind == "complete":
        t1 = graph.terminal_vertex(e1)
        t0 = graph.terminal_vertex(e0)
        if t1 == t0:
            raise NotHomotopyEquivalence(
                "complete fold of %s and %s would identify a bigon"
                % (graph.direction_name(e1), graph.direction_name(e0))
            )
        x1 = abs(e1) - 1
        vmap = []
        for u in range(graph.n_vertices):
            u2 = t0 if u == t1 else u
            vmap.append(u2 - (1 if u2 > t1 else 0))
        new_vertices = tuple(
            name for u, name in enumerate(graph.vertex_names) if u != t1
        )

        def tr(d: int) -> int:
            i = abs(d) - 1
            j = i - (1 if i > x1 else 0)
            return (j + 1) if d > 0 else -(j + 1)

        new_names = tuple(n for i, n in enumerate(graph.edge_names) if i != x1)
        new_ends = tuple(
            (vmap[u], vmap[w]) for i, (u, w) in enumerate(graph.ends) if i != x1
        )
        target = OrientedGraph(new_vertices, new_names, new_ends)
        images = []
        for i in range(graph.n_edges):
            if i == x1:
                images.append((tr(e0),) if e1 > 0 else (tr(-e0),))
            else:
                images.append((tr(i + 1),))
        fold_map = GraphMap(graph, target, tuple(vmap), tuple(images))
        return FoldMove(kind, e1, e0, graph, target, fold_map)

    # partial: subdivide both directions and fold the initial halves into a
    # fresh edge ending at a fresh vertex.
    x0, x1 = abs(e0) - 1, abs(e1) - 1
    w_name = _fresh_name(graph.vertex_names, "w")
    z_name = _fresh_name(graph.edge_names, "s")
    w = graph.n_vertices
    new_vertices = graph.vertex_names + (w_name,)
    new_ends = list(graph.ends)
    for xi, d in ((x0, e0), (x1, e1)):
        u0, u1 = new_ends[xi]
        new_ends[xi] = (w, u1) if d > 0 else (u0, w)
    new_ends.append((v, w))
    z = graph.n_edges + 1
    target = OrientedGraph(new_vertices, graph.edge_names + (z_name,), tuple(new_ends))
    images = []
    for i in range(graph.n_edges):
        if i == x0:
            images.append((z, i + 1) if e0 > 0 else ((i + 1), -z))
        elif i == x1:
            images.append((z, i + 1) if e1 > 0 else ((i + 1), -z))
        else:
            images.append((i + 1,))
    fold_map = GraphMap(graph, target, tuple(range(graph.n_vertices)), tuple(images))
    return FoldMove(kind, e1, e0, graph, target, fold_map)


# -- fold sequences -----------------------------------------------------------


@dataclass(frozen=True)
class FoldSequence:
    """An ordered run of folds plus a final relabeling isomorphism.

    When ``final_subdivision`` is set, the sequence ends mid-fold: the last
    graph is a subdivided copy of the relabeling's source, and the recorded
    subdivision map (from the smooth graph onto the subdivided one) is undone
    before the relabeling when composing.  This realizes the "final
    homeomorphism" of a decomposition whose last fold was split in two.
    """

    moves: tuple[FoldMove, ...]
    final: Relabeling
    final_subdivision: GraphMap | None = None

    def __post_init__(self) -> None:
        for a, b in zip(self.moves, self.moves[1:]):
            if a.target != b.source:
                raise GraphStructureError("fold sequence graphs do not chain")
        last = self.moves[-1].target if self.moves else None
        if self.final_subdivision is None:
            if last is not None and last != self.final.source:
                raise GraphStructureError("final relabeling does not chain")
        else:
            if self.final_subdivision.target != (last if last is not None else self.final.source):
                raise GraphStructureError("final subdivision does not chain")
            if self.final_subdivision.source != self.final.source:
                raise GraphStructureError("final subdivision does not meet the relabeling")

    @property
    def base_graph(self) -> OrientedGraph:
        if self.moves:
            return self.moves[0].source
        return self.final_subdivision.target if self.final_subdivision else self.final.source

    def __len__(self) -> int:
        return len(self.moves)

    def composed_map(self) -> GraphMap:
        """Exact composition of the moves and the final step."""
        m = None
        for move in self.moves:
            m = move.map if m is None else compose(move.map, m)
        if self.final_subdivision is None:
            fin = self.final.as_graph_map()
            return fin if m is None else compose(fin, m)
        if m is None:
            raise GraphStructureError("subdivided sequence needs at least one move")
        sub = self.final_subdivision
        smooth_vertices = {v: i for i, v in enumerate(sub.vertex_map)}
        vmap = []
        for u in range(m.source.n_vertices):
            image = m.vertex_map[u]
            if image not in smooth_vertices:
                raise GraphStructureError("composition lands on a subdivision vertex")
            vmap.append(self.final.vertex_map[smooth_vertices[image]])
        images = tuple(
            self.final.apply_path(rewrite_through_subdivision(sub, im))
            for im in m.edge_images
        )
        return GraphMap(m.source, self.final.target, tuple(vmap), images)

    def describe(self) -> str:
        lines = [f"{len(self.moves)} fold(s)"]
        for k, move in enumerate(self.moves):
            lines.append(f"  {k + 1}. {move.describe()}")
        lines.append(f"  relabeling: {self.final.describe()}")
        return "\n".join(lines)


def stallings_decompose(g: GraphMap) -> FoldSequence:
    """Greedy Stallings fold decomposition of a tight homotopy equivalence.

    While some vertex carries two directions whose images share their first
    edge, fold the maximal common prefix; ties are broken by lowest edge
    index.  Terminates because each move strictly shortens the total residual
    image length; if the residual map is not an isomorphism at the end the
    input was not a homotopy equivalence, and the error carries the residual.
    """
    if not g.is_self_map:
        raise GraphStructureError("decomposition requires a self-map")
    if not g.is_tight_map():
        raise GraphStructureError("decomposition requires tight edge images")

    moves: list[FoldMove] = []
    residual = g
    while True:
        pair = _first_foldable_pair(residual)
        if pair is None:
            break
        d1, d2 = pair
        g1 = residual.image_of_direction(d1)
        g2 = residual.image_of_direction(d2)
        ell = _common_prefix_length(g1, g2)
        try:
            if ell == len(g1) == len(g2):
                e0, e1 = (d1, d2) if abs(d1) < abs(d2) else (d2, d1)
                move = apply_fold(residual.source, e1, e0, "complete")
            elif ell == len(g1):
                move = apply_fold(residual.source, d2, d1, "proper_full")
            elif ell == len(g2):
                move = apply_fold(residual.source, d1, d2, "proper_full")
            else:
                move = apply_fold(residual.source, d2, d1, "partial")
        except NotHomotopyEquivalence as exc:
            raise NotHomotopyEquivalence(str(exc), residual) from exc
        moves.append(move)
        residual = _factor_residual(residual, move, ell)
    if not residual.is_isomorphism():
        raise NotHomotopyEquivalence(
            "residual map after folding is not a graph isomorphism", residual
        )
    seq = FoldSequence(tuple(moves), relabeling_from_map(residual))
    if seq.composed_map() != g:
        raise GraphStructureError("internal error: decomposition does not recompose")
    return seq


def _first_foldable_pair(m: GraphMap) -> tuple[int, int] | None:
    for v in range(m.source.n_vertices):
        ds = sorted(m.source.directions_at(v), key=lambda d: (abs(d), d < 0))
        for d1, d2 in itertools.combinations(ds, 2):
            if m.image_of_direction(d1)[0] == m.image_of_direction(d2)[0]:
                return d1, d2
    return None


def _common_prefix_length(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _factor_residual(m: GraphMap, move: FoldMove, ell: int) -> GraphMap:
    """The map ``m'`` with ``m = m' . move.map``, built from the move kind."""
    src = move.target
    g_e1 = m.image_of_direction(move.e1)
    if move.kind == "proper_full":
        images = []
        for i in range(src.n_edges):
            if i == abs(move.e1) - 1:
                tail = g_e1[ell:]
                images.append(tail if move.e1 > 0 else reverse_path(tail))
            else:
                images.append(m.edge_images[i])
        return GraphMap(src, m.target, m.vertex_map, tuple(images))
    if move.kind == "complete":
        x1 = abs(move.e1) - 1
        t1 = m.source.terminal_vertex(move.e1)
        vmap = tuple(w for u, w in enumerate(m.vertex_map) if u != t1)
        images = tuple(im for i, im in enumerate(m.edge_images) if i != x1)
        return GraphMap(src, m.target, vmap, images)
    # partial: the fresh edge carries the common prefix, the two tails keep
    # their suffixes, and the fresh vertex maps to the prefix endpoint.
    g_e0 = m.image_of_direction(move.e0)
    prefix = g_e0[:ell]
    images = []
    for i in range(m.source.n_edges):
        if i == abs(move.e0) - 1:
            tail = g_e0[ell:]
            images.append(tail if move.e0 > 0 else reverse_path(tail))
        elif i == abs(move.e1) - 1:
            tail = g_e1[ell:]
            images.append(tail if move.e1 > 0 else reverse_path(tail))
        else:
            images.append(m.edge_images[i])
    images.append(prefix)
    vmap = m.vertex_map + (m.target.terminal_vertex(prefix[-1]),)
    return GraphMap(src, m.target, vmap, tuple(images))


# -- permutation pushing and rotation ----------------------------------------


FoldStep = FoldMove  # alias for readability in interleaved paths


def _swap_relabeling_fold(rel: Relabeling, move: FoldMove) -> tuple[FoldMove, Relabeling]:
    """Rewrite (relabel, then fold) as (fold, then relabel), exactly.

    The replacement fold acts on the relabeling's source, folding the
    pulled-back directions; the closing relabeling is read off letterwise
    from the two parallel images of every source direction, then verified by
    an exact composition check.
    """
    if rel.target != move.source:
        raise GraphStructureError("relabeling and fold do not chain")
    inv = rel.inverse()
    move2 = apply_fold(
        rel.source, inv.apply_direction(move.e1), inv.apply_direction(move.e0), move.kind
    )
    assignment: dict[int, int] = {}
    for a in rel.source.directions():
        lhs = move.map.image_of_direction(rel.apply_direction(a))
        rhs = move2.map.image_of_direction(a)
        if len(lhs) != len(rhs):
            raise GraphStructureError("internal error: fold shapes disagree under relabeling")
        for x, y in zip(rhs, lhs):
            if assignment.setdefault(x, y) != y or assignment.setdefault(-x, -y) != -y:
                raise GraphStructureError("internal error: inconsistent fold correspondence")
    signed = tuple(assignment[i + 1] for i in range(move2.target.n_edges))
    rel2 = Relabeling(move2.target, move.target, signed)
    lhs_map = compose(move.map, rel.as_graph_map())
    rhs_map = compose(rel2.as_graph_map(), move2.map)
    if lhs_map != rhs_map:
        raise GraphStructureError("internal error: fold/relabeling swap failed")
    return move2, rel2


def push_permutations(steps: list[FoldMove | Relabeling]) -> FoldSequence:
    """Normalize an interleaved run of folds and relabelings to folds
    followed by one final relabeling, preserving the composition exactly."""
    work: list[FoldMove | Relabeling] = list(steps)
    changed = True
    while changed:
        changed = False
        for i in range(len(work) - 1):
            if isinstance(work[i], Relabeling) and isinstance(work[i + 1], FoldMove):
                move2, rel2 = _swap_relabeling_fold(work[i], work[i + 1])
                work[i : i + 2] = [move2, rel2]
                changed = True
                break
    moves = []
    rel: Relabeling | None = None
    for item in work:
        if isinstance(item, FoldMove):
            moves.append(item)
        else:
            rel = item if rel is None else item.after(rel)
    if rel is None:
        last = moves[-1].target if moves else None
        if last is None:
            raise GraphStructureError("empty step list")
        rel = relabeling_from_map(identity_map(last))
    return FoldSequence(tuple(moves), rel)


def sequence_steps(seq: FoldSequence) -> list[FoldMove | Relabeling]:
    if seq.final_subdivision is not None:
        raise GraphStructureError("subdivided sequences cannot be re-interleaved")
    return list(seq.moves) + [seq.final]


def rotate(seq: FoldSequence, j: int, subdivide: bool = False) -> FoldSequence:
    """The fold-conjugate sequence starting at position ``j``.

    With ``subdivide`` the last fold of the rotated sequence is split into a
    partial fold and a completing proper full fold; the sequence then ends on
    a subdivided graph and the final step smooths it before relabeling, so
    the composition is unchanged.
    """
    if not (0 <= j <= len(seq)):
        raise GraphStructureError("rotation index out of range")
    if j == 0:
        out = seq
    else:
        steps: list[FoldMove | Relabeling] = list(seq.moves[j:]) + [seq.final] + list(
            seq.moves[:j]
        )
        out = push_permutations(steps)
    if not subdivide:
        return out
    return _subdivide_last(out)


def _subdivide_last(seq: FoldSequence) -> FoldSequence:
    if not seq.moves:
        raise GraphStructureError("no fold to subdivide")
    last = seq.moves[-1]
    if last.kind != "proper_full":
        raise GraphStructureError("only proper full folds can be subdivided")
    p = apply_fold(last.source, last.e1, last.e0, "partial")
    z = p.target.n_edges  # fresh edge index + 1 == new edge direction
    # Finish by folding the e1 tail over the e0 tail at the fresh vertex;
    # after the partial fold, each tail keeps its signed direction value.
    q = apply_fold(p.target, last.e1, last.e0, "proper_full")
    # subdivision map: smooth target of the original fold -> target of q
    images = []
    for i in range(last.target.n_edges):
        if i == abs(last.e0) - 1:
            images.append((z, i + 1) if last.e0 > 0 else ((i + 1), -z))
        else:
            images.append((i + 1,))
    sub = GraphMap(
        last.target,
        q.target,
        tuple(range(last.target.n_vertices)),
        tuple(images),
    )
    return FoldSequence(seq.moves[:-1] + (p, q), seq.final, final_subdivision=sub)


def compose_power(seq: FoldSequence, power: int) -> FoldSequence:
    """Decomposition of the p-th power, permutations pushed to the end."""
    if power < 1:
        raise GraphStructureError("power must be >= 1")
    if seq.final_subdivision is not None:
        raise GraphStructureError("subdivided sequences cannot be powered")
    steps: list[FoldMove | Relabeling] = []
    for _ in range(power):
        steps.extend(sequence_steps(seq))
    return push_permutations(steps)
