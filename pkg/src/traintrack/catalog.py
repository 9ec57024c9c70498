"""Named example graphs and maps used across the library and its tests."""

from __future__ import annotations

from .graphs import GraphMap, OrientedGraph


def single_fold_graph() -> OrientedGraph:
    """Three vertices, five edges: a triangle with two doubled sides meeting
    at the valence-4 vertex v0."""
    return OrientedGraph(
        vertex_names=("v0", "v1", "v2"),
        edge_names=("a", "b", "c", "d", "e"),
        ends=((1, 2), (0, 2), (2, 0), (0, 1), (0, 1)),
    )


def single_fold_map() -> GraphMap:
    """The rank-3 map a->~b, b->~d, c->e, d->~e ~c, e->a.

    Its decomposition is one proper full fold (d over ~c) followed by a
    relabeling; it is the standard positive control for the whole pipeline.
    """
    graph = single_fold_graph()
    img = {
        "a": ("~b",),
        "b": ("~d",),
        "c": ("e",),
        "d": ("~e", "~c"),
        "e": ("a",),
    }
    images = tuple(
        tuple(graph.direction_of(tok) for tok in img[name]) for name in graph.edge_names
    )
    return GraphMap(
        source=graph,
        target=graph,
        vertex_map=(1, 2, 0),
        edge_images=images,
    )


SINGLE_FOLD_DOCUMENT = """\
vertices v0 v1 v2
edge a = v1 -> v2
edge b = v0 -> v2
edge c = v2 -> v0
edge d = v0 -> v1
edge e = v0 -> v1

map
a -> ~b
b -> ~d
c -> e
d -> ~e ~c
e -> a
"""


def rose_graph(labels: tuple[str, ...]) -> OrientedGraph:
    return OrientedGraph(
        vertex_names=("v",),
        edge_names=labels,
        ends=tuple((0, 0) for _ in labels),
    )


def rose_map_xyz() -> GraphMap:
    """x->y, y->z, z->z ~x on the 3-rose; not a train track map."""
    graph = rose_graph(("x", "y", "z"))
    return GraphMap(
        source=graph,
        target=graph,
        vertex_map=(0,),
        edge_images=((2,), (3,), (3, -1)),
    )


def doubling_control_map() -> GraphMap:
    """a->ba, b->bb on the 2-rose; expanding, with the fixed path ~a b."""
    graph = rose_graph(("a", "b"))
    return GraphMap(
        source=graph,
        target=graph,
        vertex_map=(0,),
        edge_images=((2, 1), (2, 2)),
    )


def block_reducible_map() -> GraphMap:
    """a->aa, b->bb on the 2-rose; train track but block reducible."""
    graph = rose_graph(("a", "b"))
    return GraphMap(
        source=graph,
        target=graph,
        vertex_map=(0,),
        edge_images=((1, 1), (2, 2)),
    )
