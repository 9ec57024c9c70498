"""Plain-text documents describing a graph self-map.

Format::

    vertices v0 v1 v2
    edge a = v1 -> v2
    edge b = v0 -> v2

    map
    a -> ~b
    b -> a a

Path tokens are edge names, prefixed with ``~`` for reversal and separated by
whitespace.  Lines starting with ``#`` and blank lines are ignored.  Parsing
then printing a canonical document is the identity.
"""

from __future__ import annotations

from .graphs import GraphMap, GraphStructureError, OrientedGraph


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _token_column(raw: str, token: str) -> int:
    pos = raw.find(token)
    return pos + 1 if pos >= 0 else 1


def parse_map_document(text: str) -> GraphMap:
    """Parse a self-map document; errors carry line and column."""
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    images: dict[str, tuple[str, ...]] = {}
    image_lines: dict[str, int] = {}
    in_map = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if not in_map:
            if parts[0] == "vertices":
                if vertices:
                    raise ParseError("duplicate vertices line", lineno)
                if len(parts) < 2:
                    raise ParseError("vertices line needs at least one name", lineno)
                vertices = parts[1:]
            elif parts[0] == "edge":
                if len(parts) != 6 or parts[2] != "=" or parts[4] != "->":
                    raise ParseError("expected: edge NAME = V -> W", lineno)
                edges.append((parts[1], parts[3], parts[5]))
            elif parts[0] == "map":
                in_map = True
            else:
                raise ParseError(f"unexpected directive {parts[0]!r}", lineno, _token_column(raw, parts[0]))
        else:
            if len(parts) < 3 or parts[1] != "->":
                raise ParseError("expected: EDGE -> PATH", lineno)
            name = parts[0]
            if name in images:
                raise ParseError(f"duplicate image for edge {name!r}", lineno)
            images[name] = tuple(parts[2:])
            image_lines[name] = lineno

    if not vertices:
        raise ParseError("missing vertices line", 1)
    if not in_map:
        raise ParseError("missing map section", len(text.splitlines()) or 1)

    vindex = {name: i for i, name in enumerate(vertices)}
    for name, u, w in edges:
        for v in (u, w):
            if v not in vindex:
                raise ParseError(f"undeclared vertex {v!r} on edge {name!r}", 1)
    graph = OrientedGraph(
        vertex_names=tuple(vertices),
        edge_names=tuple(name for name, _, _ in edges),
        ends=tuple((vindex[u], vindex[w]) for _, u, w in edges),
    )

    edge_names = set(graph.edge_names)
    missing = [n for n in graph.edge_names if n not in images]
    if missing:
        raise ParseError(f"missing image for edge {missing[0]!r}", len(text.splitlines()))
    extra = [n for n in images if n not in edge_names]
    if extra:
        raise ParseError(f"image for undeclared edge {extra[0]!r}", image_lines[extra[0]])

    dir_images = []
    for name in graph.edge_names:
        dirs = []
        for token in images[name]:
            stem = token[1:] if token.startswith("~") else token
            if stem not in edge_names:
                raise ParseError(
                    f"undeclared edge {stem!r} in image of {name!r}",
                    image_lines[name],
                )
            dirs.append(graph.direction_of(token))
        dir_images.append(tuple(dirs))

    # The vertex map is forced by the images: each vertex must go where the
    # images of its outgoing directions start.
    vmap: dict[int, int] = {}
    for i, dirs in enumerate(dir_images):
        u, w = graph.ends[i]
        constraints = ((u, graph.initial_vertex(dirs[0])), (w, graph.terminal_vertex(dirs[-1])))
        for vertex, image in constraints:
            if vmap.setdefault(vertex, image) != image:
                raise ParseError(
                    f"endpoint mismatch in image of {graph.edge_names[i]!r}",
                    image_lines[graph.edge_names[i]],
                )
    for v in range(graph.n_vertices):
        if v not in vmap:
            raise ParseError(f"vertex {vertices[v]!r} is isolated", 1)

    try:
        return GraphMap(
            source=graph,
            target=graph,
            vertex_map=tuple(vmap[v] for v in range(graph.n_vertices)),
            edge_images=tuple(dir_images),
        )
    except GraphStructureError as exc:
        raise ParseError(str(exc), 1) from exc


def print_map_document(g: GraphMap) -> str:
    """Canonical document for a self-map; inverse to the parser."""
    if not g.is_self_map:
        raise GraphStructureError("documents describe self-maps")
    graph = g.source
    lines = ["vertices " + " ".join(graph.vertex_names)]
    for i, name in enumerate(graph.edge_names):
        u, w = graph.ends[i]
        lines.append(f"edge {name} = {graph.vertex_names[u]} -> {graph.vertex_names[w]}")
    lines.append("")
    lines.append("map")
    for i, name in enumerate(graph.edge_names):
        lines.append(f"{name} -> {graph.path_name(g.edge_images[i])}")
    return "\n".join(lines) + "\n"
