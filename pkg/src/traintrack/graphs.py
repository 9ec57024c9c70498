"""Oriented multigraphs, directions, turns, edge paths, and graph maps.

Edges are stored once with a chosen positive orientation.  A *direction* is a
signed integer: ``+(i+1)`` is edge ``i`` traversed positively, ``-(i+1)`` is
its reversal.  A *turn* is an unordered pair of directions with a common
initial vertex, stored as a sorted tuple so that equality and hashing are
structural.  All values are immutable after construction; every operation in
this module is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class GraphStructureError(ValueError):
    """A graph, path, or map violates a structural precondition."""


def reverse(direction: int) -> int:
    """The opposite direction of the same edge."""
    return -direction


def make_turn(d1: int, d2: int) -> tuple[int, int]:
    """Canonical (sorted) form of the unordered pair {d1, d2}."""
    return (d1, d2) if d1 <= d2 else (d2, d1)


def is_degenerate(turn: tuple[int, int]) -> bool:
    return turn[0] == turn[1]


@dataclass(frozen=True)
class OrientedGraph:
    """A finite connected multigraph with positively oriented edges.

    ``ends[i]`` records (initial vertex index, terminal vertex index) of edge
    ``i``.  Loops (equal endpoints) and parallel edges are allowed.  Validity
    beyond index ranges (connectivity, minimum valence) is checked on demand
    by :meth:`validate`, not at construction, because intermediate graphs of
    subdivided folds legitimately carry valence-2 vertices.
    """

    vertex_names: tuple[str, ...]
    edge_names: tuple[str, ...]
    ends: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(set(self.vertex_names)) != len(self.vertex_names):
            raise GraphStructureError("duplicate vertex names")
        if len(set(self.edge_names)) != len(self.edge_names):
            raise GraphStructureError("duplicate edge names")
        if len(self.ends) != len(self.edge_names):
            raise GraphStructureError("edge name/extremity count mismatch")
        m = len(self.vertex_names)
        for u, v in self.ends:
            if not (0 <= u < m and 0 <= v < m):
                raise GraphStructureError("edge endpoint out of range")

    # -- basic queries -------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edge_names)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_names)

    def directions(self) -> tuple[int, ...]:
        n = self.n_edges
        return tuple(range(1, n + 1)) + tuple(range(-1, -n - 1, -1))

    def initial_vertex(self, direction: int) -> int:
        """Index of the vertex the direction emanates from."""
        u, v = self.ends[abs(direction) - 1]
        return u if direction > 0 else v

    def terminal_vertex(self, direction: int) -> int:
        return self.initial_vertex(-direction)

    def directions_at(self, vertex: int) -> tuple[int, ...]:
        return tuple(d for d in self.directions() if self.initial_vertex(d) == vertex)

    def valence(self, vertex: int) -> int:
        return len(self.directions_at(vertex))

    def valence_profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.valence(v) for v in range(self.n_vertices)))

    def edge_index(self, name: str) -> int:
        return self.edge_names.index(name)

    def direction_of(self, token: str) -> int:
        """Direction for a name, with a leading ``~`` meaning reversal."""
        if token.startswith("~"):
            return -(self.edge_index(token[1:]) + 1)
        return self.edge_index(token) + 1

    def direction_name(self, direction: int) -> str:
        name = self.edge_names[abs(direction) - 1]
        return name if direction > 0 else "~" + name

    def turn_name(self, turn: tuple[int, int]) -> str:
        return "{%s,%s}" % (self.direction_name(turn[0]), self.direction_name(turn[1]))

    def path_name(self, dirs: tuple[int, ...]) -> str:
        return " ".join(self.direction_name(d) for d in dirs)

    # -- global invariants ---------------------------------------------

    def components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps = []
        for start in range(self.n_vertices):
            if start in seen:
                continue
            comp = {start}
            frontier = [start]
            while frontier:
                v = frontier.pop()
                for d in self.directions_at(v):
                    w = self.terminal_vertex(d)
                    if w not in comp:
                        comp.add(w)
                        frontier.append(w)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges

    def rank(self) -> int:
        """First betti number, summed over components."""
        return self.n_edges - self.n_vertices + len(self.components())

    def validate(self, min_valence: int = 3) -> None:
        """Reject disconnected graphs and low-valence vertices.

        Pass ``min_valence=2`` (or lower) for intermediate graphs produced by
        subdivided folds.
        """
        if not self.is_connected():
            raise GraphStructureError("graph is not connected")
        for v in range(self.n_vertices):
            if self.valence(v) < min_valence:
                raise GraphStructureError(
                    f"vertex {self.vertex_names[v]} has valence {self.valence(v)} < {min_valence}"
                )

    def turns_at(self, vertex: int) -> list[tuple[int, int]]:
        """All nondegenerate turns based at a vertex."""
        ds = self.directions_at(vertex)
        return [make_turn(a, b) for a, b in itertools.combinations(ds, 2)]

    def all_turns(self) -> list[tuple[int, int]]:
        return [t for v in range(self.n_vertices) for t in self.turns_at(v)]


@dataclass(frozen=True)
class GraphInvariants:
    valences: tuple[int, ...]
    euler_characteristic: int
    rank: int
    connected: bool


def graph_invariants(graph: OrientedGraph) -> GraphInvariants:
    """Valence profile, Euler characteristic, rank, and connectivity."""
    return GraphInvariants(
        valences=graph.valence_profile(),
        euler_characteristic=graph.euler_characteristic(),
        rank=graph.rank(),
        connected=graph.is_connected(),
    )


# -- edge paths ----------------------------------------------------------


@dataclass(frozen=True)
class EdgePath:
    """A finite, endpoint-compatible sequence of directions.

    The empty path is allowed and carries its basepoint vertex explicitly;
    nonempty paths record the initial vertex of their first direction.
    """

    directions: tuple[int, ...]
    basepoint: int

    def is_empty(self) -> bool:
        return not self.directions

    def __len__(self) -> int:
        return len(self.directions)


def check_path(graph: OrientedGraph, dirs: tuple[int, ...]) -> None:
    for a, b in zip(dirs, dirs[1:]):
        if graph.terminal_vertex(a) != graph.initial_vertex(b):
            raise GraphStructureError(
                f"path breaks at {graph.direction_name(a)} -> {graph.direction_name(b)}"
            )


def path_of(graph: OrientedGraph, dirs: tuple[int, ...], basepoint: int | None = None) -> EdgePath:
    check_path(graph, dirs)
    if dirs:
        basepoint = graph.initial_vertex(dirs[0])
    elif basepoint is None:
        raise GraphStructureError("empty path needs a basepoint")
    return EdgePath(tuple(dirs), basepoint)


def reverse_path(dirs: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-d for d in reversed(dirs))


def taken_turns(dirs: tuple[int, ...]) -> list[tuple[int, int]]:
    """Turns crossed by a path: {reverse(a_i), a_{i+1}} at interior points."""
    return [make_turn(-a, b) for a, b in zip(dirs, dirs[1:])]


def tighten_dirs(dirs: tuple[int, ...]) -> tuple[int, ...]:
    stack: list[int] = []
    for d in dirs:
        if stack and stack[-1] == -d:
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def is_tight(dirs: tuple[int, ...]) -> bool:
    return all(a != -b for a, b in zip(dirs, dirs[1:]))


def tighten(graph: OrientedGraph, path: EdgePath) -> EdgePath:
    """The reduced path homotopic rel endpoints; idempotent."""
    check_path(graph, path.directions)
    reduced = tighten_dirs(path.directions)
    base = graph.initial_vertex(path.directions[0]) if path.directions else path.basepoint
    return EdgePath(reduced, base)


# -- graph maps ----------------------------------------------------------


@dataclass(frozen=True)
class GraphMap:
    """Vertex assignment plus a tight-or-not edge-path image per edge.

    Stores images of positive edges only; images of reversed directions are
    derived, so the compatibility of a map with edge reversal holds by
    construction.  Images must be nonempty and start at the image of the
    edge's initial vertex.
    """

    source: OrientedGraph
    target: OrientedGraph
    vertex_map: tuple[int, ...]
    edge_images: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.vertex_map) != self.source.n_vertices:
            raise GraphStructureError("vertex map size mismatch")
        if len(self.edge_images) != self.source.n_edges:
            raise GraphStructureError("edge image count mismatch")
        for w in self.vertex_map:
            if not (0 <= w < self.target.n_vertices):
                raise GraphStructureError("vertex image out of range")
        for i, image in enumerate(self.edge_images):
            if not image:
                raise GraphStructureError(
                    f"edge {self.source.edge_names[i]} has an empty image"
                )
            check_path(self.target, image)
            u, v = self.source.ends[i]
            if self.target.initial_vertex(image[0]) != self.vertex_map[u]:
                raise GraphStructureError(
                    f"image of edge {self.source.edge_names[i]} starts at the wrong vertex"
                )
            if self.target.terminal_vertex(image[-1]) != self.vertex_map[v]:
                raise GraphStructureError(
                    f"image of edge {self.source.edge_names[i]} ends at the wrong vertex"
                )

    # -- application -----------------------------------------------------

    def image_of_direction(self, d: int) -> tuple[int, ...]:
        image = self.edge_images[abs(d) - 1]
        return image if d > 0 else reverse_path(image)

    def image_of_path(self, dirs: tuple[int, ...]) -> tuple[int, ...]:
        out: list[int] = []
        for d in dirs:
            out.extend(self.image_of_direction(d))
        return tuple(out)

    def __call__(self, dirs: tuple[int, ...]) -> tuple[int, ...]:
        return self.image_of_path(dirs)

    @property
    def is_self_map(self) -> bool:
        return self.source == self.target

    def is_tight_map(self) -> bool:
        return all(is_tight(im) for im in self.edge_images)

    def is_isomorphism(self) -> bool:
        """True iff the map is a label-level graph isomorphism."""
        if self.source.n_edges != self.target.n_edges:
            return False
        if self.source.n_vertices != self.target.n_vertices:
            return False
        if len(set(self.vertex_map)) != len(self.vertex_map):
            return False
        if any(len(im) != 1 for im in self.edge_images):
            return False
        hit = {abs(im[0]) for im in self.edge_images}
        return len(hit) == self.source.n_edges

    def describe(self) -> str:
        lines = []
        for i, image in enumerate(self.edge_images):
            lines.append(f"{self.source.edge_names[i]} -> {self.target.path_name(image)}")
        return "\n".join(lines)


def identity_map(graph: OrientedGraph) -> GraphMap:
    return GraphMap(
        source=graph,
        target=graph,
        vertex_map=tuple(range(graph.n_vertices)),
        edge_images=tuple((i + 1,) for i in range(graph.n_edges)),
    )


def compose(g: GraphMap, f: GraphMap) -> GraphMap:
    """The map ``g after f``, with images tightened.

    Raises if the middle graphs disagree or if some composite edge image
    tightens to the empty path (collapsed edges are not supported).
    """
    if f.target != g.source:
        raise GraphStructureError("compose: target of inner map differs from source of outer map")
    images = []
    for i in range(f.source.n_edges):
        image = tighten_dirs(g.image_of_path(f.edge_images[i]))
        if not image:
            raise GraphStructureError(
                f"compose: image of edge {f.source.edge_names[i]} collapses"
            )
        images.append(image)
    return GraphMap(
        source=f.source,
        target=g.target,
        vertex_map=tuple(g.vertex_map[w] for w in f.vertex_map),
        edge_images=tuple(images),
    )


def iterate_map(g: GraphMap, power: int) -> GraphMap:
    if not g.is_self_map:
        raise GraphStructureError("iterate_map requires a self-map")
    if power < 1:
        raise GraphStructureError("power must be >= 1")
    result = g
    for _ in range(power - 1):
        result = compose(g, result)
    return result


def direction_map(g: GraphMap) -> dict[int, int]:
    """The map sending a direction to the first direction of its image."""
    return {d: g.image_of_direction(d)[0] for d in g.source.directions()}


def periodic_directions(g: GraphMap) -> frozenset[int]:
    """Directions lying on cycles of the direction map's functional graph."""
    if not g.is_self_map:
        raise GraphStructureError("periodic_directions requires a self-map")
    dg = direction_map(g)
    periodic: set[int] = set()
    for d in g.source.directions():
        seen = {d}
        x = d
        while True:
            x = dg[x]
            if x == d:
                periodic.add(d)
                break
            if x in seen:
                break
            seen.add(x)
    return frozenset(periodic)


def _pair_collapses(dg: dict[int, int], d1: int, d2: int, bound: int) -> bool:
    """Whether some iterate of the direction map makes {d1, d2} degenerate."""
    for _ in range(bound):
        if d1 == d2:
            return True
        d1, d2 = dg[d1], dg[d2]
    return d1 == d2


def gates(g: GraphMap) -> tuple[frozenset[int], ...]:
    """Partition of directions by the illegal-turn equivalence relation.

    Two directions at a vertex are equivalent when some power of the
    direction map sends them to a degenerate pair.  Orbits of pairs live in
    a set of size at most ``|directions|**2``, which bounds the iteration.
    """
    if not g.is_self_map:
        raise GraphStructureError("gates requires a self-map")
    ds = g.source.directions()
    dg = direction_map(g)
    bound = len(ds) ** 2
    parent = {d: d for d in ds}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d1, d2 in itertools.combinations(ds, 2):
        if g.source.initial_vertex(d1) != g.source.initial_vertex(d2):
            continue
        if _pair_collapses(dg, d1, d2, bound):
            parent[find(d1)] = find(d2)

    classes: dict[int, set[int]] = {}
    for d in ds:
        classes.setdefault(find(d), set()).add(d)
    return tuple(sorted((frozenset(c) for c in classes.values()), key=sorted))


# -- bivalent-vertex suppression ------------------------------------------


def suppress_bivalent(graph: OrientedGraph) -> tuple[OrientedGraph, GraphMap]:
    """Erase valence-2 vertices, merging their two edge germs into one edge.

    Returns the smoothed graph and the subdivision map from it back onto the
    original graph (each merged edge maps over the run of edges it replaces).
    Chains and loops made entirely of bivalent vertices are rejected.
    """
    bivalent = [v for v in range(graph.n_vertices) if graph.valence(v) == 2]
    if not bivalent:
        return graph, identity_map(graph)
    biv = set(bivalent)

    # Walk maximal runs of edges through bivalent vertices, starting from
    # germs at surviving vertices.
    runs: list[tuple[int, ...]] = []
    used: set[int] = set()
    for v in range(graph.n_vertices):
        if v in biv:
            continue
        for d in graph.directions_at(v):
            if abs(d) in used:
                continue
            run = [d]
            while graph.terminal_vertex(run[-1]) in biv:
                w = graph.terminal_vertex(run[-1])
                nxt = [x for x in graph.directions_at(w) if x != -run[-1]]
                if len(nxt) != 1:
                    raise GraphStructureError("inconsistent bivalent vertex")
                run.append(nxt[0])
            if any(abs(x) in used for x in run):
                continue
            used.update(abs(x) for x in run)
            runs.append(tuple(run))
    if len(used) != graph.n_edges:
        raise GraphStructureError("bivalent suppression: circle component of bivalent vertices")

    keep_vertices = [v for v in range(graph.n_vertices) if v not in biv]
    vmap = {v: i for i, v in enumerate(keep_vertices)}
    names = []
    ends = []
    images = []
    for run in sorted(runs, key=lambda r: min(abs(x) for x in r)):
        if len(run) == 1 and run[0] < 0:
            run = reverse_path(run)
        lead = min(run, key=abs)
        base = graph.edge_names[abs(lead) - 1]
        names.append(base if len(run) == 1 else base + "*")
        ends.append((vmap[graph.initial_vertex(run[0])], vmap[graph.terminal_vertex(run[-1])]))
        images.append(run)
    smoothed = OrientedGraph(
        vertex_names=tuple(graph.vertex_names[v] for v in keep_vertices),
        edge_names=tuple(names),
        ends=tuple(ends),
    )
    subdivision = GraphMap(
        source=smoothed,
        target=graph,
        vertex_map=tuple(keep_vertices),
        edge_images=tuple(images),
    )
    return smoothed, subdivision


def rewrite_through_subdivision(subdivision: GraphMap, dirs: tuple[int, ...]) -> tuple[int, ...]:
    """Express a path in the subdivided graph as a path in the smoothed one.

    ``subdivision`` maps the smoothed graph onto the subdivided one; the path
    must traverse each merged run in full, which tight paths through bivalent
    vertices always do.
    """
    images = {}
    for i in range(subdivision.source.n_edges):
        images[subdivision.edge_images[i]] = i + 1
        images[reverse_path(subdivision.edge_images[i])] = -(i + 1)
    out: list[int] = []
    pos = 0
    n = len(dirs)
    by_first: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for path, d in images.items():
        by_first.setdefault(path[0], []).append((path, d))
    while pos < n:
        for path, d in by_first.get(dirs[pos], ()):
            if dirs[pos : pos + len(path)] == path:
                out.append(d)
                pos += len(path)
                break
        else:
            raise GraphStructureError("path does not factor through the subdivision")
    return tuple(out)


def suppress_bivalent_map(g: GraphMap) -> GraphMap:
    """Conjugate a self-map by bivalent-vertex suppression of its graph.

    Fails if the map sends a surviving vertex onto a suppressed one, in which
    case the smoothed conjugate is not an edge map.
    """
    if not g.is_self_map:
        raise GraphStructureError("suppress_bivalent_map requires a self-map")
    smoothed, subdivision = suppress_bivalent(g.source)
    if smoothed is g.source:
        return g
    keep = set(subdivision.vertex_map)
    for v in subdivision.vertex_map:
        if g.vertex_map[v] not in keep:
            raise GraphStructureError("map moves a surviving vertex onto a bivalent one")
    vmap_new = []
    back = {v: i for i, v in enumerate(subdivision.vertex_map)}
    for v in subdivision.vertex_map:
        vmap_new.append(back[g.vertex_map[v]])
    images = []
    for i in range(smoothed.n_edges):
        old_path = g.image_of_path(subdivision.edge_images[i])
        images.append(rewrite_through_subdivision(subdivision, tighten_dirs(old_path)))
    return GraphMap(
        source=smoothed,
        target=smoothed,
        vertex_map=tuple(vmap_new),
        edge_images=tuple(images),
    )
