"""Train track certification.

A self-map is a train track map when every power is tight, which for tight
edge images reduces to a finite check: close the set of turns taken inside
edge images under the direction map and intersect with the illegal turns.
This module also houses the expanding test, a bounded search for periodic
Nielsen paths, and the full-irreducibility criterion that combines them with
the spectral classification and local Whitehead connectivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .digraph import condensation_reachability, strongly_connected_components
from .graphs import (
    GraphMap,
    GraphStructureError,
    direction_map,
    is_tight,
    iterate_map,
    make_turn,
    periodic_directions,
    reverse_path,
    taken_turns,
    tighten_dirs,
)
from .spectral import (
    IntegerMatrix,
    classify_matrix,
    invariant_edge_set,
    transition_matrix,
)


@dataclass(frozen=True)
class TurnClosure:
    """Turns taken by any power of the map, with their generation trace.

    ``trace`` records, for each turn, the turn whose image under the
    direction map produced it (seeds map to None).
    """

    turns: frozenset[tuple[int, int]]
    trace: dict[tuple[int, int], tuple[int, int] | None]

    def __len__(self) -> int:
        return len(self.turns)


def taken_turn_closure(g: GraphMap) -> TurnClosure:
    """Seed with turns inside each edge image, then close under Dg.

    Degenerate images are not recorded as turns; a taken turn that collapses
    is caught by the illegal-turn intersection instead.
    """
    if not g.is_self_map:
        raise GraphStructureError("turn closure requires a self-map")
    dg = direction_map(g)
    trace: dict[tuple[int, int], tuple[int, int] | None] = {}
    frontier = []
    for i in range(g.source.n_edges):
        for t in taken_turns(g.edge_images[i]):
            if not t[0] == t[1] and t not in trace:
                trace[t] = None
                frontier.append(t)
    while frontier:
        t = frontier.pop()
        image = make_turn(dg[t[0]], dg[t[1]])
        if image[0] == image[1]:
            continue
        if image not in trace:
            trace[image] = t
            frontier.append(image)
    return TurnClosure(frozenset(trace), trace)


def illegal_turns(g: GraphMap) -> frozenset[tuple[int, int]]:
    """Nondegenerate turns some power of Dg collapses to a degenerate pair."""
    if not g.is_self_map:
        raise GraphStructureError("illegal turns require a self-map")
    dg = direction_map(g)
    bound = (2 * g.source.n_edges) ** 2
    out = set()
    for turn in g.source.all_turns():
        d1, d2 = turn
        for _ in range(bound):
            d1, d2 = dg[d1], dg[d2]
            if d1 == d2:
                out.add(turn)
                break
    return frozenset(out)


@dataclass(frozen=True)
class TtCertificate:
    is_train_track: bool
    witness: tuple[int, int] | str | None
    illegal: frozenset[tuple[int, int]]
    closure: TurnClosure

    def describe(self, graph) -> str:
        if self.is_train_track:
            return "train track"
        if isinstance(self.witness, str):
            return f"not a train track map: image of edge {self.witness} is not tight"
        return f"not a train track map: taken turn {graph.turn_name(self.witness)} is illegal"


def is_train_track(g: GraphMap) -> TtCertificate:
    """Certify that all powers of the map are tight.

    An untight edge image is an immediate failure with that edge as witness;
    otherwise the verdict is that the taken-turn closure avoids every illegal
    turn, which is equivalent to tightness of all powers.
    """
    for i in range(g.source.n_edges):
        if not is_tight(g.edge_images[i]):
            return TtCertificate(False, g.source.edge_names[i], frozenset(), TurnClosure(frozenset(), {}))
    closure = taken_turn_closure(g)
    illegal = illegal_turns(g)
    bad = sorted(closure.turns & illegal)
    return TtCertificate(not bad, bad[0] if bad else None, illegal, closure)


def is_expanding(g: GraphMap) -> bool:
    """Whether every edge's image length is unbounded under iteration.

    The length of the n-th image of an edge counts length-n walks from it in
    the multiplicity digraph of the transition matrix.  Every vertex there
    has out-multiplicity at least one, so the count is unbounded exactly when
    a vertex of out-multiplicity two or more lying on a directed cycle is
    reachable; this is decided on the condensation, with no iteration cutoff.
    """
    matrix = transition_matrix(g)
    return expanding_edges(matrix) == tuple(range(matrix.dimension))


def expanding_edges(matrix: IntegerMatrix) -> tuple[int, ...]:
    """Indices of edges with unbounded iterated image length."""
    n = matrix.dimension
    edges = {i: [j for j in range(n) if matrix.rows[i][j] > 0] for i in range(n)}
    comps = strongly_connected_components(n, edges)
    comp_of, reach = condensation_reachability(n, edges, comps)
    growing = set()
    for ci, comp in enumerate(comps):
        cyclic = len(comp) > 1 or matrix.rows[comp[0]][comp[0]] > 0
        if cyclic and any(sum(matrix.rows[v]) >= 2 for v in comp):
            growing.add(ci)
    return tuple(
        i for i in range(n) if any(cj in growing for cj in reach[comp_of[i]])
    )


# -- bounded periodic-Nielsen-path search -----------------------------------


@dataclass(frozen=True)
class PnpSearchResult:
    verdict: str  # "none-up-to-bound" or "found"
    length_bound: int
    period_bound: int
    path: tuple[int, ...] | None = None
    period: int | None = None
    tip: tuple[int, int] | None = None

    @property
    def clean(self) -> bool:
        return self.verdict == "none-up-to-bound"


def default_period_bound(g: GraphMap) -> int:
    """lcm of the direction-map cycle lengths."""
    dg = direction_map(g)
    periodic = periodic_directions(g)
    lengths = set()
    seen = set()
    for d in periodic:
        if d in seen:
            continue
        cycle = [d]
        x = dg[d]
        while x != d:
            cycle.append(x)
            x = dg[x]
        seen.update(cycle)
        lengths.add(len(cycle))
    return math.lcm(*lengths) if lengths else 1


def _strip_common_prefix(
    a: tuple[int, ...], b: tuple[int, ...]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return a[k:], b[k:]


def pnp_bounded_search(
    g: GraphMap, length_bound: int = 50, period_bound: int | None = None
) -> PnpSearchResult:
    """Search for a periodic Nielsen path up to explicit bounds.

    Candidates have the form reverse(alpha) . beta with both legs tight,
    meeting at an illegal turn.  For each illegal tip, the pair of legs is
    iterated by: apply the map to both legs, tighten, and strip the common
    prefix.  A genuine periodic path is a periodic state of this iteration
    and is confirmed by tightening the image directly; legs exceeding the
    length bound, a swallowed leg, or an over-long period stop the tip.

    A "none-up-to-bound" verdict is not a proof of absence; the bounds used
    are part of the result.
    """
    tt = is_train_track(g)
    if not tt.is_train_track:
        raise GraphStructureError("periodic path search requires a train track map")
    if not is_expanding(g):
        raise GraphStructureError("periodic path search requires an expanding map")
    if period_bound is None:
        period_bound = default_period_bound(g)

    for tip in sorted(tt.illegal):
        state = ((tip[0],), (tip[1],))
        seen: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {state: 0}
        step = 0
        while True:
            step += 1
            alpha = tighten_dirs(g.image_of_path(state[0]))
            beta = tighten_dirs(g.image_of_path(state[1]))
            state = _strip_common_prefix(alpha, beta)
            if not state[0] or not state[1]:
                break  # one leg swallowed; no candidate at this tip
            if max(len(state[0]), len(state[1])) > length_bound:
                break
            if state in seen:
                period = step - seen[state]
                if period <= period_bound:
                    candidate = reverse_path(state[0]) + state[1]
                    image = tighten_dirs(iterate_map(g, period).image_of_path(candidate))
                    if image == candidate:
                        return PnpSearchResult(
                            "found", length_bound, period_bound, candidate, period, tip
                        )
                break
            seen[state] = step
    return PnpSearchResult("none-up-to-bound", length_bound, period_bound)


# -- full irreducibility criterion -------------------------------------------


def local_whitehead_connected(g: GraphMap) -> dict[int, bool]:
    """Connectivity of the turn graph on the directions at each vertex."""
    closure = taken_turn_closure(g)
    out = {}
    for v in range(g.source.n_vertices):
        ds = g.source.directions_at(v)
        adj: dict[int, set[int]] = {d: set() for d in ds}
        for t in closure.turns:
            if g.source.initial_vertex(t[0]) == v:
                adj[t[0]].add(t[1])
                adj[t[1]].add(t[0])
        if not ds:
            out[v] = False
            continue
        seen = {ds[0]}
        frontier = [ds[0]]
        while frontier:
            x = frontier.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        out[v] = len(seen) == len(ds)
    return out


@dataclass(frozen=True)
class FicReport:
    """One flag per conjunct of the full irreducibility criterion."""

    train_track: bool
    pnp_clean: bool
    pnp: PnpSearchResult | None
    irreducible: bool
    perron_frobenius: bool
    whitehead_connected: bool
    whitehead_by_vertex: dict[int, bool]
    invariant_edges: tuple[int, ...] | None

    @property
    def passed(self) -> bool:
        return (
            self.train_track
            and self.pnp_clean
            and self.irreducible
            and self.perron_frobenius
            and self.whitehead_connected
        )


def fic_check(
    g: GraphMap, length_bound: int = 50, period_bound: int | None = None
) -> FicReport:
    """Bounded-PNP-clean, irreducible, PF, and connected local Whitehead
    graphs; each conjunct reported separately, failures enumerated."""
    tt = is_train_track(g)
    pnp = None
    pnp_clean = False
    if tt.is_train_track:
        try:
            pnp = pnp_bounded_search(g, length_bound, period_bound)
            pnp_clean = pnp.clean
        except GraphStructureError:
            pnp = None
    matrix = transition_matrix(g)
    report = classify_matrix(matrix)
    by_vertex = local_whitehead_connected(g) if tt.is_train_track else {}
    return FicReport(
        train_track=tt.is_train_track,
        pnp_clean=pnp_clean,
        pnp=pnp,
        irreducible=report.irreducible,
        perron_frobenius=report.perron_frobenius,
        whitehead_connected=bool(by_vertex) and all(by_vertex.values()),
        whitehead_by_vertex=by_vertex,
        invariant_edges=None if report.irreducible else invariant_edge_set(matrix),
    )
