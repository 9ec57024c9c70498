"""Local, stable, and ideal Whitehead graphs; colored turn structures over a
graph; and relabeling (signed edge-label permutation) actions.

The colored structure of a self-map records, over the underlying graph, one
vertex per direction (purple when the direction is periodic, red otherwise),
one edge per taken turn (purple when both ends are periodic), and a black
edge per original edge.  Identity of such structures "up to label-preserving
isomorphism" forgets vertex names but keeps edge labels, which is captured by
the partition of directions into initial-vertex groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .certify import (
    FicReport,
    fic_check,
    taken_turn_closure,
)
from .graphs import (
    GraphMap,
    GraphStructureError,
    OrientedGraph,
    compose,
    make_turn,
    periodic_directions,
)


# -- Whitehead graphs --------------------------------------------------------


@dataclass(frozen=True)
class WhiteheadGraph:
    """Turn-incidence graph at a vertex; ``kind`` is "local" or "stable"."""

    kind: str
    vertex: int
    directions: frozenset[int]
    edges: frozenset[tuple[int, int]]

    def components(self) -> list[frozenset[int]]:
        adj: dict[int, set[int]] = {d: set() for d in self.directions}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        out = []
        seen: set[int] = set()
        for d in sorted(self.directions):
            if d in seen:
                continue
            comp = {d}
            frontier = [d]
            while frontier:
                x = frontier.pop()
                for y in adj[x]:
                    if y not in comp:
                        comp.add(y)
                        frontier.append(y)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def is_triangle(self) -> bool:
        return len(self.directions) == 3 and len(self.edges) == 3


def local_whitehead(g: GraphMap, vertex: int) -> WhiteheadGraph:
    """One vertex per direction at ``vertex``; edges are the taken turns."""
    if not (0 <= vertex < g.source.n_vertices):
        raise GraphStructureError("unknown vertex")
    closure = taken_turn_closure(g)
    ds = frozenset(g.source.directions_at(vertex))
    edges = frozenset(t for t in closure.turns if t[0] in ds)
    return WhiteheadGraph("local", vertex, ds, edges)


def stable_whitehead(g: GraphMap, vertex: int) -> WhiteheadGraph:
    """Restriction of the local graph to periodic directions."""
    lw = local_whitehead(g, vertex)
    periodic = periodic_directions(g)
    ds = lw.directions & periodic
    edges = frozenset(t for t in lw.edges if t[0] in periodic and t[1] in periodic)
    return WhiteheadGraph("stable", vertex, ds, edges)


@dataclass(frozen=True)
class IdealWhiteheadGraph:
    """Disjoint union of the stable graphs, 2-vertex components removed."""

    components: tuple[WhiteheadGraph, ...]

    def component_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(c.directions) for c in self.components))

    def is_triangle_union(self, count: int) -> bool:
        return len(self.components) == count and all(c.is_triangle() for c in self.components)

    def index(self) -> Fraction:
        """Sum of 1 - k/2 over components with k vertices."""
        return sum((1 - Fraction(len(c.directions), 2) for c in self.components), Fraction(0))


def ideal_whitehead(
    g: GraphMap, length_bound: int = 50, period_bound: int | None = None
) -> IdealWhiteheadGraph:
    """Assemble the ideal Whitehead graph, valid only when the bounded search
    finds no periodic Nielsen path.

    Raises when the map is not an expanding train track map or when the
    search finds a path, since the construction is undefined there.
    """
    from .certify import is_expanding, is_train_track, pnp_bounded_search

    if not is_train_track(g).is_train_track:
        raise GraphStructureError("ideal Whitehead graph requires a train track map")
    if not is_expanding(g):
        raise GraphStructureError("ideal Whitehead graph requires an expanding map")
    pnp = pnp_bounded_search(g, length_bound, period_bound)
    if not pnp.clean:
        raise GraphStructureError(
            "a periodic Nielsen path was found (period %s); the ideal Whitehead graph "
            "is not defined by this construction" % pnp.period
        )
    comps: list[WhiteheadGraph] = []
    for v in range(g.source.n_vertices):
        sw = stable_whitehead(g, v)
        for piece in sw.components():
            if len(piece) == 2:
                continue
            edges = frozenset(t for t in sw.edges if t[0] in piece)
            comps.append(WhiteheadGraph("stable", v, piece, edges))
    return IdealWhiteheadGraph(tuple(comps))


@dataclass(frozen=True)
class PrincipalReport:
    fic: FicReport
    ideal: IdealWhiteheadGraph | None
    triangle_count_expected: int
    index: Fraction | None
    is_principal: bool

    @property
    def index_expected(self) -> Fraction:
        return Fraction(3, 2) - (self.triangle_count_expected + 3) // 2


def is_principal(
    g: GraphMap, rank: int | None = None, length_bound: int = 50, period_bound: int | None = None
) -> PrincipalReport:
    """Whether the map's ideal Whitehead graph is 2r-3 triangles.

    Propagates full-irreducibility-criterion failures, and cross-checks the
    index identity: the component sum of 1 - k/2 must equal 3/2 - r.
    """
    if rank is None:
        rank = g.source.rank()
    expected = 2 * rank - 3
    fic = fic_check(g, length_bound, period_bound)
    if not fic.passed:
        return PrincipalReport(fic, None, expected, None, False)
    ideal = ideal_whitehead(g, length_bound, period_bound)
    index = ideal.index()
    ok = ideal.is_triangle_union(expected) and index == Fraction(3, 2) - rank
    return PrincipalReport(fic, ideal, expected, index, ok)


# -- colored turn structures (ltt) -------------------------------------------


@dataclass(frozen=True)
class LttStructure:
    """A colored blow-up of a graph: direction vertices, turn edges, black
    edges.  Red marks the nonperiodic directions and the turns touching them.
    """

    graph: OrientedGraph
    red_vertices: frozenset[int]
    turns: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        ds = set(self.graph.directions())
        if not self.red_vertices <= ds:
            raise GraphStructureError("red vertex outside the direction set")
        for t in self.turns:
            if t[0] not in ds or t[1] not in ds:
                raise GraphStructureError("turn outside the direction set")
            if t[0] == t[1]:
                raise GraphStructureError("degenerate turn in structure")
            if self.graph.initial_vertex(t[0]) != self.graph.initial_vertex(t[1]):
                raise GraphStructureError("turn directions at different vertices")

    @property
    def purple_vertices(self) -> frozenset[int]:
        return frozenset(self.graph.directions()) - self.red_vertices

    @property
    def purple_edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            t for t in self.turns if t[0] not in self.red_vertices and t[1] not in self.red_vertices
        )

    @property
    def red_edges(self) -> frozenset[tuple[int, int]]:
        return self.turns - self.purple_edges

    def stable_component_at(self, vertex: int) -> tuple[frozenset[int], frozenset[tuple[int, int]]]:
        ds = frozenset(self.graph.directions_at(vertex)) - self.red_vertices
        edges = frozenset(t for t in self.purple_edges if t[0] in ds)
        return ds, edges

    def exact_key(self):
        """Identity up to label-preserving isomorphism: the grouping of
        directions by initial vertex, plus colors and turns.  Vertex names
        are forgotten."""
        groups = {}
        for d in self.graph.directions():
            groups.setdefault(self.graph.initial_vertex(d), []).append(d)
        partition = frozenset(frozenset(v) for v in groups.values())
        return (partition, self.red_vertices, self.turns)


def ltt_structure(g: GraphMap) -> LttStructure:
    """The colored structure of a train track self-map."""
    from .certify import is_train_track

    if not is_train_track(g).is_train_track:
        raise GraphStructureError("colored turn structure requires a train track map")
    closure = taken_turn_closure(g)
    red = frozenset(g.source.directions()) - periodic_directions(g)
    return LttStructure(g.source, red, frozenset(closure.turns))


# -- relabelings -------------------------------------------------------------


@dataclass(frozen=True)
class Relabeling:
    """A bijection of signed edge labels inducing a graph isomorphism.

    ``signed_images[i]`` is the signed target direction of source edge ``i``;
    compatibility with reversal holds by construction.  The induced vertex
    bijection is derived and validated.
    """

    source: OrientedGraph
    target: OrientedGraph
    signed_images: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.source.n_edges
        if self.target.n_edges != n or len(self.signed_images) != n:
            raise GraphStructureError("relabeling size mismatch")
        if sorted(abs(s) for s in self.signed_images) != list(range(1, n + 1)):
            raise GraphStructureError("relabeling is not a signed bijection")
        self.vertex_map  # force consistency validation

    @property
    def vertex_map(self) -> tuple[int, ...]:
        assignment: dict[int, int] = {}
        for i, s in enumerate(self.signed_images):
            pairs = (
                (self.source.initial_vertex(i + 1), self.target.initial_vertex(s)),
                (self.source.terminal_vertex(i + 1), self.target.terminal_vertex(s)),
            )
            for u, w in pairs:
                if assignment.setdefault(u, w) != w:
                    raise GraphStructureError("relabeling induces no vertex bijection")
        if len(assignment) != self.source.n_vertices or len(set(assignment.values())) != len(
            assignment
        ):
            raise GraphStructureError("relabeling induces no vertex bijection")
        return tuple(assignment[v] for v in range(self.source.n_vertices))

    def apply_direction(self, d: int) -> int:
        s = self.signed_images[abs(d) - 1]
        return s if d > 0 else -s

    def apply_turn(self, t: tuple[int, int]) -> tuple[int, int]:
        return make_turn(self.apply_direction(t[0]), self.apply_direction(t[1]))

    def apply_path(self, dirs: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(self.apply_direction(d) for d in dirs)

    def as_graph_map(self) -> GraphMap:
        return GraphMap(
            source=self.source,
            target=self.target,
            vertex_map=self.vertex_map,
            edge_images=tuple((self.apply_direction(i + 1),) for i in range(self.source.n_edges)),
        )

    def inverse(self) -> "Relabeling":
        inv = [0] * self.source.n_edges
        for i, s in enumerate(self.signed_images):
            inv[abs(s) - 1] = (i + 1) if s > 0 else -(i + 1)
        return Relabeling(self.target, self.source, tuple(inv))

    def after(self, other: "Relabeling") -> "Relabeling":
        """The composite self∘other."""
        if other.target != self.source:
            raise GraphStructureError("relabelings do not compose")
        return Relabeling(
            other.source,
            self.target,
            tuple(self.apply_direction(s) for s in other.signed_images),
        )

    def is_permutation(self) -> bool:
        return self.source.edge_names == self.target.edge_names

    def describe(self) -> str:
        parts = []
        for i, s in enumerate(self.signed_images):
            parts.append(f"{self.source.edge_names[i]}->{self.target.direction_name(s)}")
        return ", ".join(parts)


def relabeling_from_map(m: GraphMap) -> Relabeling:
    """Extract the relabeling of a map that is a graph isomorphism."""
    if not m.is_isomorphism():
        raise GraphStructureError("map is not a graph isomorphism")
    return Relabeling(m.source, m.target, tuple(im[0] for im in m.edge_images))


def relabeled_graph(graph: OrientedGraph, sigma: tuple[int, ...]) -> OrientedGraph:
    """The graph with each edge label e replaced by sigma(e).

    ``sigma[i]`` is the signed new index of old edge ``i``: the edge that was
    labeled i now carries label abs(sigma[i]) - 1, reversed when negative.
    """
    n = graph.n_edges
    ends = [None] * n
    for i, s in enumerate(sigma):
        u, v = graph.ends[i]
        ends[abs(s) - 1] = (u, v) if s > 0 else (v, u)
    return OrientedGraph(graph.vertex_names, graph.edge_names, tuple(ends))


def relabeling_map(graph: OrientedGraph, sigma: tuple[int, ...]) -> Relabeling:
    """The isomorphism from a graph to its sigma-relabeled version."""
    return Relabeling(graph, relabeled_graph(graph, sigma), tuple(sigma))


def relabel_structure(structure: LttStructure, sigma: tuple[int, ...]) -> LttStructure:
    rel = relabeling_map(structure.graph, sigma)
    return LttStructure(
        graph=rel.target,
        red_vertices=frozenset(rel.apply_direction(d) for d in structure.red_vertices),
        turns=frozenset(rel.apply_turn(t) for t in structure.turns),
    )


def relabel_map(g: GraphMap, sigma: tuple[int, ...]) -> GraphMap:
    """Conjugate a self-map by the relabeling: sigma . g . sigma^{-1}."""
    if not g.is_self_map:
        raise GraphStructureError("relabel_map conjugates self-maps")
    rel = relabeling_map(g.source, sigma)
    return compose(rel.as_graph_map(), compose(g, rel.inverse().as_graph_map()))


def signed_permutations(n: int):
    """All signed permutations of n labels (2**n n! of them)."""
    for perm in itertools.permutations(range(1, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            yield tuple(p * s for p, s in zip(perm, signs))


def ltt_isomorphic(
    g1: LttStructure, g2: LttStructure, upto: str = "exact"
) -> tuple[int, ...] | None:
    """Test structure equality exactly or up to a signed label permutation.

    In relabeling mode the witness permutation is returned; the search is a
    brute-force scan over signed permutations, pruned by matching the red
    vertices first.
    """
    if upto == "exact":
        if g1.exact_key() == g2.exact_key():
            n = g1.graph.n_edges
            return tuple(range(1, n + 1))
        return None
    if upto != "relabeling":
        raise GraphStructureError("upto must be 'exact' or 'relabeling'")
    n = g1.graph.n_edges
    if g2.graph.n_edges != n or len(g1.red_vertices) != len(g2.red_vertices):
        return None
    key2 = g2.exact_key()
    for sigma in signed_permutations(n):
        rel_red = frozenset(
            (sigma[d - 1] if d > 0 else -sigma[-d - 1]) for d in g1.red_vertices
        )
        if rel_red != g2.red_vertices:
            continue
        if relabel_structure(g1, sigma).exact_key() == key2:
            return sigma
    return None


# -- DOT export ---------------------------------------------------------------


def ltt_to_dot(structure: LttStructure, name: str = "ltt") -> str:
    """Deterministic DOT rendering: purple/red direction vertices and turn
    edges, black edges for the underlying graph."""
    g = structure.graph
    lines = [f"graph {name} {{"]
    for d in sorted(g.directions(), key=lambda x: (abs(x), x < 0)):
        color = "red" if d in structure.red_vertices else "purple"
        lines.append(f'  "{g.direction_name(d)}" [color={color}];')
    for t in sorted(structure.turns):
        color = "red" if t in structure.red_edges else "purple"
        lines.append(
            f'  "{g.direction_name(t[0])}" -- "{g.direction_name(t[1])}" [color={color}];'
        )
    for i in range(g.n_edges):
        lines.append(
            f'  "{g.direction_name(i + 1)}" -- "{g.direction_name(-(i + 1))}" '
            f'[color=black, style=bold];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
