"""Exhaustive verification drivers.

Two independent computations back the headline facts: the single-fold search
enumerates every map of the form (proper full fold at the valence-4 vertex,
then graph isomorphism) over the rank-r universe of (4,3,...,3)-graphs and
classifies each through the full pipeline; the minimal-stretch-factor driver
re-verifies the arithmetic steps that pin the smallest stretch factor down to
the largest root of x^5 - x - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from multiprocessing import Pool

from .certify import is_train_track
from .folds import apply_fold
from .graphs import GraphMap, GraphStructureError, OrientedGraph, compose
from .spectral import (
    IntPolynomial,
    char_poly,
    is_irreducible,
    largest_real_root_interval,
    minimal_perron_table,
    trace_obstruction,
    transition_matrix,
)
from .whitehead import PrincipalReport, Relabeling, is_principal


# -- the graph universe --------------------------------------------------------


def _enumerate_degree_graphs(degrees: tuple[int, ...]):
    """All loopy multigraphs on len(degrees) vertices with the exact degree
    sequence, as sorted edge tuples ((u, v) with u <= v; loops count twice)."""
    m = len(degrees)
    slots = [(u, v) for u in range(m) for v in range(u, m)]
    # vertices still reachable from slot idx onwards, and the remaining
    # degree capacity each can absorb there
    future = [set() for _ in range(len(slots) + 1)]
    capacity = [dict() for _ in range(len(slots) + 1)]
    for idx in range(len(slots) - 1, -1, -1):
        u, v = slots[idx]
        future[idx] = future[idx + 1] | {u, v}
        cap = dict(capacity[idx + 1])
        cap[u] = cap.get(u, 0) + (2 if u == v else 1) * max(degrees)
        if u != v:
            cap[v] = cap.get(v, 0) + max(degrees)
        capacity[idx] = cap
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(idx: int, residual: tuple[int, ...], chosen: tuple[tuple[int, int], ...]):
        if idx == len(slots):
            if all(r == 0 for r in residual):
                out.append(chosen)
            return
        u, v = slots[idx]
        cap = residual[u] // 2 if u == v else min(residual[u], residual[v])
        res = list(residual)
        for count in range(cap + 1):
            if count:
                if u == v:
                    res[u] -= 2
                else:
                    res[u] -= 1
                    res[v] -= 1
            ok = True
            for w in range(m):
                if res[w] and (w not in future[idx + 1] or res[w] > capacity[idx + 1].get(w, 0)):
                    ok = False
                    break
            if ok:
                rec(idx + 1, tuple(res), chosen + ((u, v),) * count)

    rec(0, tuple(degrees), ())
    return out


def _is_connected_edges(m: int, edges) -> bool:
    adj = {v: set() for v in range(m)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen) == m


def _refine_colors(m: int, edges, initial: list[int]) -> list[int]:
    """Iterated neighborhood refinement of a vertex coloring."""
    mult: dict[tuple[int, int], int] = {}
    for u, v in edges:
        mult[(u, v)] = mult.get((u, v), 0) + 1
        if u != v:
            mult[(v, u)] = mult.get((v, u), 0) + 1
    colors = list(initial)
    for _ in range(m):
        signatures = []
        for v in range(m):
            sig = sorted(
                (colors[w], n) for (x, w), n in mult.items() if x == v
            )
            signatures.append((colors[v], tuple(sig)))
        order = sorted(set(signatures))
        new = [order.index(s) for s in signatures]
        if new == colors:
            break
        colors = new
    return colors


def _canonical_multigraph(m: int, edges, fixed: tuple[int, ...] = (0,)):
    """Minimal edge encoding over vertex permutations fixing the listed
    vertices.  Color refinement cuts the permutations down to products over
    same-color cells."""
    initial = [-(list(fixed).index(v) + 1) if v in fixed else 0 for v in range(m)]
    colors = _refine_colors(m, edges, initial)
    cells: dict[int, list[int]] = {}
    for v in range(m):
        cells.setdefault(colors[v], []).append(v)
    cell_list = [cells[c] for c in sorted(cells)]
    best = None
    for perms in itertools.product(*(itertools.permutations(cell) for cell in cell_list)):
        mapping = {}
        pos = 0
        for perm in perms:
            for src in perm:
                mapping[src] = pos
                pos += 1
        encoded = tuple(
            sorted(tuple(sorted((mapping[u], mapping[v]))) for u, v in edges)
        )
        if best is None or encoded < best:
            best = encoded
    return best


@dataclass(frozen=True)
class SearchUniverse:
    rank: int
    graphs: tuple[OrientedGraph, ...]


def _letters(n: int) -> tuple[str, ...]:
    return tuple("abcdefghijklmnopqrstuvwxyz"[:n])


def _graph_from_edges(m: int, edges) -> OrientedGraph:
    return OrientedGraph(
        vertex_names=tuple(f"v{i}" for i in range(m)),
        edge_names=_letters(len(edges)),
        ends=tuple(edges),
    )


def build_universe(rank: int) -> SearchUniverse:
    """Isomorph-free list of connected graphs with one valence-4 vertex,
    valence 3 elsewhere: 2r-3 vertices and 3r-4 edges."""
    if not 3 <= rank <= 5:
        raise GraphStructureError("universe is built for ranks 3 to 5")
    return _build_universe_cached(rank)


@lru_cache(maxsize=None)
def _build_universe_cached(rank: int) -> SearchUniverse:
    m = 2 * rank - 3
    degrees = (4,) + (3,) * (m - 1)
    seen = set()
    for edges in _enumerate_degree_graphs(degrees):
        if not _is_connected_edges(m, edges):
            continue
        seen.add(_canonical_multigraph(m, edges))
    graphs = tuple(_graph_from_edges(m, canon) for canon in sorted(seen))
    return SearchUniverse(rank, graphs)


def trivalent_universe() -> tuple[OrientedGraph, ...]:
    """Connected trivalent graphs with 4 vertices and 6 edges, up to iso."""
    m = 4
    seen = set()
    for edges in _enumerate_degree_graphs((3, 3, 3, 3)):
        if not _is_connected_edges(m, edges):
            continue
        seen.add(_canonical_multigraph(m, edges, fixed=()))
    return tuple(_graph_from_edges(m, canon) for canon in sorted(seen))


# -- graph isomorphisms ---------------------------------------------------------


def graph_isomorphisms(source: OrientedGraph, target: OrientedGraph) -> list[Relabeling]:
    """All label-level isomorphisms: vertex bijection plus signed edge
    bijection (parallel edges permute, loops may flip)."""
    m = source.n_vertices
    if target.n_vertices != m or target.n_edges != source.n_edges:
        return []
    sv = [source.valence(v) for v in range(m)]
    tv = [target.valence(v) for v in range(m)]
    if sorted(sv) != sorted(tv):
        return []
    out: list[Relabeling] = []
    candidates = [[w for w in range(m) if tv[w] == sv[v]] for v in range(m)]
    target_buckets: dict[tuple[int, int], list[int]] = {}
    for j in range(target.n_edges):
        u, w = target.ends[j]
        target_buckets.setdefault(tuple(sorted((u, w))), []).append(j)
    for image in itertools.product(*candidates):
        if len(set(image)) != m:
            continue
        needed: dict[tuple[int, int], list[int]] = {}
        for i in range(source.n_edges):
            u, w = source.ends[i]
            needed.setdefault(tuple(sorted((image[u], image[w]))), []).append(i)
        if any(
            len(target_buckets.get(key, ())) != len(srcs) for key, srcs in needed.items()
        ) or len(needed) != len(
            {k for k in target_buckets if target_buckets[k]}
        ):
            continue
        per_slot_options: list[list[tuple[int, ...]]] = []
        slot_sources: list[list[int]] = []
        feasible = True
        for key, srcs in sorted(needed.items()):
            bucket = target_buckets[key]
            opts: list[tuple[int, ...]] = []
            for perm in itertools.permutations(bucket):
                value_choices: list[list[int]] = []
                ok = True
                for i, j in zip(srcs, perm):
                    u, w = source.ends[i]
                    p, q = image[u], image[w]
                    tu, tw = target.ends[j]
                    if p == q and tu == tw and p == tu:
                        value_choices.append([j + 1, -(j + 1)])  # loop may flip
                    elif (p, q) == (tu, tw):
                        value_choices.append([j + 1])
                    elif (p, q) == (tw, tu):
                        value_choices.append([-(j + 1)])
                    else:
                        ok = False
                        break
                if ok:
                    opts.extend(itertools.product(*value_choices))
            if not opts:
                feasible = False
                break
            per_slot_options.append(opts)
            slot_sources.append(srcs)
        if not feasible:
            continue
        for combo in itertools.product(*per_slot_options):
            signed = [0] * source.n_edges
            for srcs, values in zip(slot_sources, combo):
                for i, val in zip(srcs, values):
                    signed[i] = val
            try:
                out.append(Relabeling(source, target, tuple(signed)))
            except GraphStructureError:
                continue
    return out


# -- the single-fold search -------------------------------------------------------


@dataclass(frozen=True)
class CandidateReport:
    graph_index: int
    e1: int
    e0: int
    sigma: Relabeling
    map: GraphMap
    train_track: bool
    irreducible: bool
    fic_passed: bool
    principal: bool
    principal_report: PrincipalReport | None


@dataclass(frozen=True)
class SearchSummary:
    rank: int
    universe_size: int
    candidates: int
    tt_count: int
    irreducible_count: int
    fic_count: int
    principal_count: int
    survivors: tuple[CandidateReport, ...]
    class_count: int
    class_representatives: tuple[int, ...]  # indices into survivors


def _search_one_graph(args) -> list[CandidateReport]:
    rank, gi, length_bound = args
    universe = build_universe(rank)
    graph = universe.graphs[gi]
    out = []
    v4 = max(range(graph.n_vertices), key=graph.valence)
    dirs = sorted(graph.directions_at(v4), key=lambda d: (abs(d), d < 0))
    for e1, e0 in itertools.permutations(dirs, 2):
        if abs(e1) == abs(e0):
            continue
        move = apply_fold(graph, e1, e0, "proper_full")
        for sigma in graph_isomorphisms(move.target, graph):
            h = compose(sigma.as_graph_map(), move.map)
            tt = is_train_track(h).is_train_track
            irr = tt and is_irreducible(transition_matrix(h))
            fic_ok = False
            principal = False
            principal_report = None
            if irr:
                principal_report = is_principal(h, rank, length_bound=length_bound)
                fic_ok = principal_report.fic.passed
                principal = principal_report.is_principal
            out.append(
                CandidateReport(
                    gi, e1, e0, sigma, h, tt, irr, fic_ok, principal, principal_report
                )
            )
    return out


def single_fold_search(
    rank: int, jobs: int = 1, length_bound: int = 50, shuffle_seed: int | None = None
) -> SearchSummary:
    """Classify every (graph, ordered fold pair at the valence-4 vertex,
    graph isomorphism back) candidate and group the principal survivors by
    relabeling conjugacy.

    Results are independent of job count and of the optional shuffling of
    the work order (used by determinism self-tests).
    """
    universe = build_universe(rank)
    order = list(range(len(universe.graphs)))
    if shuffle_seed is not None:
        import random

        random.Random(shuffle_seed).shuffle(order)
    tasks = [(rank, gi, length_bound) for gi in order]
    if jobs > 1:
        with Pool(jobs) as pool:
            chunks = pool.map(_search_one_graph, tasks)
    else:
        chunks = [_search_one_graph(t) for t in tasks]
    reports: list[CandidateReport] = [r for chunk in chunks for r in chunk]
    reports.sort(key=lambda r: (r.graph_index, r.e1, r.e0, r.sigma.signed_images))

    survivors = tuple(r for r in reports if r.principal)
    classes: list[int] = []
    for i, r in enumerate(survivors):
        for j in classes:
            if _conjugate_by_relabeling(survivors[j].map, r.map):
                break
        else:
            classes.append(i)
    return SearchSummary(
        rank=rank,
        universe_size=len(universe.graphs),
        candidates=len(reports),
        tt_count=sum(1 for r in reports if r.train_track),
        irreducible_count=sum(1 for r in reports if r.irreducible),
        fic_count=sum(1 for r in reports if r.fic_passed),
        principal_count=len(survivors),
        survivors=survivors,
        class_count=len(classes),
        class_representatives=tuple(classes),
    )


def _conjugate_by_relabeling(h1: GraphMap, h2: GraphMap) -> bool:
    """Whether some graph isomorphism conjugates one self-map into the other."""
    for sigma in graph_isomorphisms(h1.source, h2.source):
        m = sigma.as_graph_map()
        if compose(m, h1) == compose(h2, m):
            return True
    return False


@dataclass(frozen=True)
class VertexAudit:
    vertices_distinct: bool
    relabeling_sends_fold_target: bool
    relabeling_sends_tail: bool
    vertex_transitive: bool

    @property
    def passed(self) -> bool:
        return (
            self.vertices_distinct
            and self.relabeling_sends_fold_target
            and self.relabeling_sends_tail
            and self.vertex_transitive
        )


def vertex_structure_audit(report: CandidateReport) -> VertexAudit:
    """Structural facts forced for every surviving candidate: the fold-adjacent
    vertices are distinct, the relabeling carries the folded edge data the
    forced way, and the composed map is transitive on vertices."""
    graph = report.map.source
    v0 = graph.initial_vertex(report.e1)
    v1 = graph.terminal_vertex(report.e0)
    v2 = graph.terminal_vertex(report.e1)
    distinct = len({v0, v1, v2}) == 3
    sends_v1 = report.sigma.vertex_map[v1] == v0
    sends_e1 = report.sigma.apply_direction(report.e1) == report.e0
    sends_v2 = report.sigma.vertex_map[v2] == v1
    # vertex transitivity of the composed map
    vmap = report.map.vertex_map
    orbit = {0}
    x = 0
    for _ in range(len(vmap)):
        x = vmap[x]
        orbit.add(x)
    transitive = len(orbit) == len(vmap)
    return VertexAudit(distinct, sends_v1 and sends_e1, sends_v2, transitive)


# -- the minimal stretch factor driver ---------------------------------------------


@dataclass(frozen=True)
class ArgumentStep:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class MinimalStretchReport:
    steps: tuple[ArgumentStep, ...]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps)


def verify_minimal_stretch_argument() -> MinimalStretchReport:
    """Re-verify the machine-checkable steps showing the reference map's
    stretch factor is the smallest one possible:

    1. its characteristic polynomial is exactly x^5 - x - 1;
    2. its dominant root lies strictly below the smallest Perron numbers of
       degrees 2, 3, and 4;
    3. the trace obstruction rules out the one smaller degree-5 candidate;
    4. on every 6-edge trivalent rank-3 graph, a proper full fold keeps 6
       edges and creates a valence-4 vertex, while a complete fold drops to
       5 edges and creates a valence-5 vertex (so 6-edge graphs never carry
       a minimal example).
    """
    from .catalog import single_fold_map

    steps = []
    g = single_fold_map()
    p = char_poly(transition_matrix(g))
    target = IntPolynomial((-1, -1, 0, 0, 0, 1))
    steps.append(
        ArgumentStep(
            "characteristic polynomial",
            p == target,
            f"char poly = {p.pretty()}",
        )
    )

    lo, hi = largest_real_root_interval(p, Fraction(1, 10**9))
    table = {entry.degree: entry for entry in minimal_perron_table() if entry.rank_within_degree == 1}
    comparisons = []
    ok = True
    for degree in (4, 3, 2):
        bound = Fraction(table[degree].approximate_root).limit_denominator(10**6)
        good = hi < bound
        ok = ok and good
        comparisons.append(f"root < {float(bound):.3f} (degree {degree}): {good}")
    steps.append(
        ArgumentStep(
            "dominant root below smaller-degree minima",
            ok,
            f"root in [{float(lo):.10f}, {float(hi):.10f}]; " + "; ".join(comparisons),
        )
    )

    rival = IntPolynomial((-1, -1, -1, 0, 1, 1))
    steps.append(
        ArgumentStep(
            "trace obstruction",
            trace_obstruction(rival, 5) and not trace_obstruction(p, 5),
            "x^5 + x^4 - x^2 - x - 1 needs trace -1; x^5 - x - 1 has trace 0",
        )
    )

    graphs = trivalent_universe()
    proper_ok = True
    complete_ok = True
    proper_count = complete_count = 0
    loop_proper = loop_complete = 0
    loop_fold_moves = []
    for graph in graphs:
        for v in range(graph.n_vertices):
            for e1, e0 in itertools.permutations(graph.directions_at(v), 2):
                if abs(e1) == abs(e0):
                    continue
                e0_loop = graph.terminal_vertex(e0) == graph.initial_vertex(e0)
                move = apply_fold(graph, e1, e0, "proper_full")
                proper_count += 1
                top = max(move.target.valence(w) for w in range(move.target.n_vertices))
                if move.target.n_edges != 6:
                    proper_ok = False
                if e0_loop:
                    # folding over a loop keeps the graph trivalent
                    loop_proper += 1
                    loop_fold_moves.append(move)
                    if top != 3:
                        proper_ok = False
                elif top < 4:
                    proper_ok = False
                if graph.terminal_vertex(e1) != graph.terminal_vertex(e0):
                    loopy = e0_loop or graph.terminal_vertex(e1) == graph.initial_vertex(e1)
                    cmove = apply_fold(graph, e1, e0, "complete")
                    complete_count += 1
                    ctop = max(
                        cmove.target.valence(w) for w in range(cmove.target.n_vertices)
                    )
                    if cmove.target.n_edges > 5:
                        complete_ok = False
                    if loopy:
                        loop_complete += 1
                        if ctop < 4:
                            complete_ok = False
                    elif ctop < 5:
                        complete_ok = False
    steps.append(
        ArgumentStep(
            "fold bookkeeping on trivalent graphs",
            proper_ok and complete_ok,
            f"{len(graphs)} trivalent graphs; {proper_count} proper full folds keep 6 edges, "
            f"reaching valence 4 except over a loop ({loop_proper} cases, graph unchanged); "
            f"{complete_count} complete folds drop to 5 edges, reaching valence 5 except "
            f"with a loop ({loop_complete} cases, valence 4)",
        )
    )

    # Folding over a loop evades the valence count, so check exhaustively
    # that no single (fold over a loop, isomorphism back) composition is an
    # expanding irreducible train track map on these graphs.
    from .certify import is_expanding

    loop_fold_maps = 0
    loop_fold_bad = 0
    for move in loop_fold_moves:
        for sigma in graph_isomorphisms(move.target, move.source):
            h = compose(sigma.as_graph_map(), move.map)
            loop_fold_maps += 1
            if (
                is_train_track(h).is_train_track
                and is_irreducible(transition_matrix(h))
                and is_expanding(h)
            ):
                loop_fold_bad += 1
    steps.append(
        ArgumentStep(
            "loop folds carry no expanding irreducible map",
            loop_fold_bad == 0,
            f"{loop_fold_maps} (loop fold, isomorphism) compositions, "
            f"{loop_fold_bad} expanding irreducible train track maps among them",
        )
    )
    return MinimalStretchReport(tuple(steps))
