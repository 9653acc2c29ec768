"""Small reference families used by the tests, demos and CLI fixtures."""
from __future__ import annotations

from .family import DagFamily
from .graph import UndirectedGraph


def _levels(vertices, levels):
    if isinstance(levels, int):
        return {v: levels for v in vertices}
    return dict(levels)


def _tree_parents(edges, root):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    parents = {root: []}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in sorted(adj[v]):
            if w not in parents:
                parents[w] = [v]
                stack.append(w)
    return parents


# Three triangles {1,2,5}, {2,3,5}, {3,4,5} glued along edges {2,5} and {3,5}.
TRIANGLES_EDGES = [(1, 2), (1, 5), (2, 5), (2, 3), (3, 5), (3, 4), (4, 5)]
TRIANGLES_P = {1: [2, 5], 2: [], 3: [2, 5], 4: [3, 5], 5: [2]}
TRIANGLES_P2 = {1: [2, 5], 2: [3, 5], 3: [], 4: [3, 5], 5: [3]}
TRIANGLES_ORDERS = {
    "p": {1: [(2, 3, 5), (1, 2, 5), (3, 4, 5)], 2: [(1, 2, 5), (2, 3, 5), (3, 4, 5)]},
    "p2": {1: [(2, 3, 5), (3, 4, 5), (1, 2, 5)], 2: [(3, 4, 5), (2, 3, 5), (1, 2, 5)]},
}
# case -> (order index for p, order index for p2)
TRIANGLES_CASES = {"I": (2, 2), "II": (2, 1), "III": (1, 2), "IV": (1, 1)}


def triangles_family(case: str = "I", levels=2) -> DagFamily:
    """Two DAGs on the three-triangle graph; ``case`` picks one order per DAG."""
    i, j = TRIANGLES_CASES[case]
    g = UndirectedGraph(_levels(range(1, 6), levels), TRIANGLES_EDGES)
    return DagFamily.build(
        g, [("p", TRIANGLES_P), ("p2", TRIANGLES_P2)],
        {"p": TRIANGLES_ORDERS["p"][i], "p2": TRIANGLES_ORDERS["p2"][j]},
    )


BRIDGE_EDGES = [(1, 3), (2, 4), (3, 4), (3, 5), (4, 5)]
BRIDGE_P = {1: [], 2: [4], 3: [1], 4: [3], 5: [3, 4]}
BRIDGE_P2 = {1: [3], 2: [], 3: [4], 4: [2], 5: [3, 4]}


def bridge_family(levels=2) -> DagFamily:
    """Triangle {3,4,5} with pendant edges 1-3 and 2-4; the two DAGs share closure {3,4}."""
    g = UndirectedGraph(_levels(range(1, 6), levels), BRIDGE_EDGES)
    return DagFamily.build(
        g, [("p", BRIDGE_P), ("p2", BRIDGE_P2)],
        {"p": [(1, 3), (3, 4, 5), (2, 4)], "p2": [(2, 4), (3, 4, 5), (1, 3)]},
    )


TREE_EDGES = [(1, 2), (2, 3), (2, 4), (4, 5)]


def tree_family(choice: int = 1, levels=2) -> DagFamily:
    """The five-vertex tree with separator {2} twice, rooted at 1 and at 3.

    ``choice`` selects the order used for the DAG rooted at 3: 1 keeps the
    two occurrences of {2} apart, 2 links them.
    """
    g = UndirectedGraph(_levels(range(1, 6), levels), TREE_EDGES)
    second = [(2, 3), (1, 2), (2, 4), (4, 5)] if choice == 1 else [(2, 3), (2, 4), (4, 5), (1, 2)]
    return DagFamily.build(
        g, [("p", _tree_parents(TREE_EDGES, 1)), ("p2", _tree_parents(TREE_EDGES, 3))],
        {"p": [(1, 2), (2, 3), (2, 4), (4, 5)], "p2": second},
    )


def leaf_rooted_tree_family(levels=2) -> DagFamily:
    """The same tree with one DAG rooted at each leaf (1, 3, 5)."""
    g = UndirectedGraph(_levels(range(1, 6), levels), TREE_EDGES)
    return DagFamily.build(g, [(f"r{r}", _tree_parents(TREE_EDGES, r)) for r in (1, 3, 5)])


def chain_family(d: int = 4, levels=2) -> DagFamily:
    """Path 1-2-...-d directed forward and backward."""
    edges = [(i, i + 1) for i in range(1, d)]
    g = UndirectedGraph(_levels(range(1, d + 1), levels), edges)
    fwd = {i: ([i - 1] if i > 1 else []) for i in range(1, d + 1)}
    bwd = {i: ([i + 1] if i < d else []) for i in range(1, d + 1)}
    return DagFamily.build(g, [("forward", fwd), ("backward", bwd)])


def complete_family(d: int = 2, levels=2) -> DagFamily:
    """Complete graph on d vertices with the two opposite linear orientations."""
    vs = list(range(1, d + 1))
    edges = [(a, b) for a in vs for b in vs if a < b]
    g = UndirectedGraph(_levels(vs, levels), edges)
    up = {v: list(range(1, v)) for v in vs}
    down = {v: list(range(v + 1, d + 1)) for v in vs}
    return DagFamily.build(g, [("up", up), ("down", down)])
