"""Small directed-graph helpers shared by certification and the automaton."""

from __future__ import annotations


def strongly_connected_components(n: int, edges: dict[int, list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if root in index:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def condensation_reachability(
    n: int, edges: dict[int, list[int]], components: list[list[int]]
) -> tuple[list[int], list[set[int]]]:
    """Per-vertex component index and, per component, the set of reachable
    components (including itself)."""
    comp_of = [0] * n
    for ci, comp in enumerate(components):
        for v in comp:
            comp_of[v] = ci
    k = len(components)
    comp_edges: list[set[int]] = [set() for _ in range(k)]
    for v, ws in edges.items():
        for w in ws:
            if comp_of[v] != comp_of[w]:
                comp_edges[comp_of[v]].add(comp_of[w])
    reach: list[set[int]] = [set() for _ in range(k)]
    # Tarjan emits components in reverse topological order, so successors of
    # component i have smaller indices and their closures are already final.
    for ci in range(k):
        acc = {ci}
        for cj in comp_edges[ci]:
            acc |= reach[cj]
        reach[ci] = acc
    return comp_of, reach
