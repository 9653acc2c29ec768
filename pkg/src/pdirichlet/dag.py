"""Moral DAGs sharing a decomposable skeleton.

A DAG is given by its parent function: ``parents[v]`` is the parent set of
``v``.  Only DAGs without immoralities are accepted, so every validated DAG is
Markov equivalent to its skeleton.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple

from .errors import (
    CycleDetected,
    DagError,
    ImmoralityDetected,
    NoPerfectOrderFound,
    NotPPerfect,
    SkeletonMismatch,
    UnknownVertex,
)
from .graph import CliqueOrder, UndirectedGraph, VSet, _order_from, find_cliques, fmt, vset


@dataclass(frozen=True)
class ParentMap:
    """A validated moral DAG; build it with :func:`validate_dag`."""

    id: str
    graph: UndirectedGraph = field(repr=False)
    parents: Mapping[int, VSet]
    topological_order: tuple[int, ...] = field(repr=False)

    def __hash__(self):
        return hash((self.id, tuple(self.parents.items())))

    def closure(self, v: int) -> VSet:
        """Parents of ``v`` together with ``v`` itself."""
        return vset(self.parents[v] + (v,))

    @property
    def children(self) -> dict[int, VSet]:
        out = {v: [] for v in self.parents}
        for v, ps in self.parents.items():
            for p in ps:
                out[p].append(v)
        return {v: vset(c) for v, c in out.items()}

    @property
    def source(self) -> int:
        return self.topological_order[0]


def validate_dag(graph: UndirectedGraph, parents: Mapping, dag_id: str = "p") -> ParentMap:
    """Validate a parent function against the skeleton ``graph``.

    Raises:
      SkeletonMismatch: the undirected version differs from ``graph``.
      CycleDetected: the directed graph has a cycle.
      ImmoralityDetected: two non-adjacent parents share a child.
    """
    pm = {}
    for v, ps in parents.items():
        v = int(v)
        if v not in graph.levels:
            raise UnknownVertex(f"parent map mentions unknown vertex {v}")
        pm[v] = vset(int(p) for p in ps)
    missing = [v for v in graph.vertices if v not in pm]
    if missing:
        raise DagError(f"parent sets missing for vertices {missing}")
    for v, ps in pm.items():
        if v in ps:
            raise CycleDetected(f"vertex {v} is its own parent")

    skeleton = {(min(v, p), max(v, p)) for v, ps in pm.items() for p in ps}
    if skeleton != set(graph.edges):
        extra = sorted(skeleton - graph.edges)
        absent = sorted(graph.edges - skeleton)
        raise SkeletonMismatch(
            f"DAG skeleton differs from the graph: extra edges {extra}, missing edges {absent}"
        )

    indeg = {v: len(ps) for v, ps in pm.items()}
    kids = {v: [] for v in pm}
    for v, ps in pm.items():
        for p in ps:
            kids[p].append(v)
    ready = sorted(v for v, d in indeg.items() if d == 0)
    topo = []
    while ready:
        v = ready.pop(0)
        topo.append(v)
        for w in sorted(kids[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(topo) != len(pm):
        stuck = sorted(v for v in pm if v not in topo)
        raise CycleDetected(f"directed cycle among vertices {stuck}")

    for w, ps in pm.items():
        for i, a in enumerate(ps):
            for b in ps[i + 1:]:
                if not graph.adjacent(a, b):
                    raise ImmoralityDetected(
                        f"immorality {a} -> {w} <- {b}: parents {a} and {b} are not adjacent",
                        triple=(a, w, b),
                    )
    return ParentMap(dag_id, graph, dict(sorted(pm.items())), tuple(topo))


def non_descendants(dag: ParentMap, v: int) -> VSet:
    """All vertices other than ``v`` that cannot be reached from ``v``."""
    if v not in dag.parents:
        raise UnknownVertex(f"unknown vertex {v}")
    kids = dag.children
    reach = {v}
    stack = [v]
    while stack:
        for w in kids[stack.pop()]:
            if w not in reach:
                reach.add(w)
                stack.append(w)
    return vset(set(dag.parents) - reach)


@dataclass(frozen=True)
class DagNumbering:
    """Ladder numbering of the residual vertices of each clique.

    ``ladders[l]`` lists the vertices v_{l,s_l+1}, ..., v_{l,c_l} of the
    (0-based) clique position ``l``.
    """

    order: CliqueOrder
    ladders: tuple[tuple[int, ...], ...]

    def vertex(self, l: int, j: int) -> int:
        """v_{l,j} with the 1-based indices used for clique positions and ranks."""
        s = len(self.order.separators[l - 1])
        return self.ladders[l - 1][j - s - 1]

    @property
    def assignment(self) -> dict[tuple[int, int], int]:
        out = {}
        for l, ladder in enumerate(self.ladders, start=1):
            s = len(self.order.separators[l - 1])
            for j, v in enumerate(ladder, start=s + 1):
                out[(l, j)] = v
        return out


def _ladder(dag: ParentMap, clique: VSet, sep: VSet) -> tuple[int, ...] | None:
    residual = set(clique) - set(sep)
    current = sep
    ladder = []
    while residual:
        nxt = [v for v in residual if dag.parents[v] == current]
        if len(nxt) != 1:
            return None
        v = nxt[0]
        ladder.append(v)
        residual.remove(v)
        current = dag.closure(v)
    if current != clique:
        return None
    return tuple(ladder)


def numbering(dag: ParentMap, order: CliqueOrder) -> DagNumbering:
    """Number the vertices of each clique along its parent ladder.

    Raises:
      NotPPerfect: some clique has no ladder from its separator to itself.
    """
    ladders = []
    for l, (sep, clique) in enumerate(order.pairs(), start=1):
        ladder = _ladder(dag, clique, sep)
        if ladder is None:
            raise NotPPerfect(
                f"order is not {dag.id}-perfect: no parent ladder from {fmt(sep)} "
                f"to clique {fmt(clique)} at position {l}"
            )
        ladders.append(ladder)
    return DagNumbering(order, tuple(ladders))


def _p_perfect(graph: UndirectedGraph, dag: ParentMap) -> Iterator[CliqueOrder]:
    cliques = find_cliques(graph)

    def extend(prefix, hist, remaining):
        if not remaining:
            yield _order_from(prefix)
            return
        for c in remaining:
            s = vset(set(c) & hist)
            if prefix and not any(set(s) <= set(p) for p in prefix):
                continue
            if _ladder(dag, c, s) is None:
                continue
            yield from extend(prefix + [c], hist | set(c), [d for d in remaining if d != c])

    yield from extend([], set(), list(cliques))


def find_p_perfect_orders(graph: UndirectedGraph, dag: ParentMap) -> list[CliqueOrder]:
    """All perfect orders of the cliques that admit the ladder numbering of ``dag``."""
    orders = list(_p_perfect(graph, dag))
    if not orders:
        raise NoPerfectOrderFound(f"no {dag.id}-perfect order exists; this indicates a bug")
    return orders


def first_p_perfect_order(graph: UndirectedGraph, dag: ParentMap) -> CliqueOrder:
    for order in _p_perfect(graph, dag):
        return order
    raise NoPerfectOrderFound(f"no {dag.id}-perfect order exists; this indicates a bug")


class ImageSets(NamedTuple):
    q_image: tuple[VSet, ...]
    p_image: Counter
    residual: tuple[VSet, ...]


def image_multisets(dag: ParentMap) -> ImageSets:
    """Closures q(V) (a set), parent sets p(V) (a multiset) and q(V) minus the cliques."""
    q = tuple(sorted({dag.closure(v) for v in dag.parents}))
    p = Counter(dag.parents.values())
    cliques = set(find_cliques(dag.graph))
    return ImageSets(q, p, tuple(a for a in q if a not in cliques))
