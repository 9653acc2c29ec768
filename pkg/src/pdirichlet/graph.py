"""Decomposable undirected graphs: chordality, cliques and perfect orders.

Vertex subsets are represented throughout the package as ascending tuples of
vertex ids (``VSet``).  The ascending order doubles as the axis order of every
table indexed by that subset.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .errors import GraphError, NotDecomposable, NotPerfectOrder, UnknownVertex

VSet = tuple[int, ...]


def vset(vertices: Iterable[int]) -> VSet:
    """Canonical (sorted, duplicate-free) form of a vertex subset."""
    return tuple(sorted(set(vertices)))


def fmt(subset: VSet) -> str:
    return "{" + ",".join(map(str, subset)) + "}"


@dataclass(frozen=True)
class UndirectedGraph:
    """Connected undirected graph with a number of states per vertex.

    Args:
      levels: mapping vertex id -> number of states (at least 2).
      edges: iterable of vertex pairs.
    """

    levels: dict[int, int]
    edges: frozenset[tuple[int, int]]
    vertices: VSet = field(init=False)
    _adj: dict[int, frozenset[int]] = field(init=False, repr=False, compare=False)

    def __init__(self, levels, edges=()):
        if isinstance(levels, dict):
            levels = {int(v): int(n) for v, n in levels.items()}
        else:
            raise GraphError("levels must be a mapping vertex -> number of states")
        norm = set()
        for e in edges:
            e = tuple(e)
            if len(e) != 2:
                raise GraphError(f"edge {e!r} does not have two endpoints")
            a, b = int(e[0]), int(e[1])
            if a == b:
                raise GraphError(f"self-loop at vertex {a}")
            for x in (a, b):
                if x not in levels:
                    raise UnknownVertex(f"edge endpoint {x} is not a declared vertex")
            norm.add((min(a, b), max(a, b)))
        for v, n in levels.items():
            if n < 2:
                raise GraphError(f"vertex {v} has {n} levels; at least 2 are required")
        adj = {v: set() for v in levels}
        for a, b in norm:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "levels", dict(sorted(levels.items())))
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "vertices", tuple(sorted(levels)))
        object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adj.items()})
        if not self.vertices:
            raise GraphError("graph has no vertices")
        if not self._connected():
            raise GraphError(
                "graph is disconnected; analyse each connected component separately"
            )

    def _connected(self) -> bool:
        start = self.vertices[0]
        seen = {start}
        stack = [start]
        while stack:
            for w in self._adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def __hash__(self):
        return hash((tuple(self.levels.items()), self.edges))

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v}") from None

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.neighbors(a)

    def is_complete(self, subset: Iterable[int]) -> bool:
        s = list(subset)
        return all(self.adjacent(a, b) for i, a in enumerate(s) for b in s[i + 1:])

    def check_subset(self, subset: Iterable[int]) -> VSet:
        s = vset(subset)
        for v in s:
            if v not in self.levels:
                raise UnknownVertex(f"unknown vertex {v}")
        return s

    def shape(self, subset: Iterable[int] | None = None) -> tuple[int, ...]:
        """Table shape over ``subset`` (all of V when omitted)."""
        s = self.vertices if subset is None else vset(subset)
        return tuple(self.levels[v] for v in s)

    def ncells(self, subset: Iterable[int] | None = None) -> int:
        n = 1
        for k in self.shape(subset):
            n *= k
        return n

    def axes(self, subset: Iterable[int]) -> tuple[int, ...]:
        """Axis positions of ``subset`` inside a full table over V."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        return tuple(pos[v] for v in vset(subset))


class Decomposability(NamedTuple):
    decomposable: bool
    elimination_order: tuple[int, ...] | None
    cycle: tuple[int, ...] | None


def _mcs(graph: UndirectedGraph) -> list[int]:
    """Maximum cardinality search visit order, ties broken by smallest id."""
    weight = {v: 0 for v in graph.vertices}
    order = []
    while weight:
        v = max(weight, key=lambda u: (weight[u], -u))
        order.append(v)
        del weight[v]
        for w in graph.neighbors(v):
            if w in weight:
                weight[w] += 1
    return order


def _chordless_cycle(graph: UndirectedGraph) -> tuple[int, ...] | None:
    # A shortest u-w path that avoids v and v's other neighbours closes a
    # chordless cycle through v.
    for v in graph.vertices:
        nbrs = sorted(graph.neighbors(v))
        for i, u in enumerate(nbrs):
            for w in nbrs[i + 1:]:
                if graph.adjacent(u, w):
                    continue
                banned = (set(nbrs) | {v}) - {u, w}
                prev = {u: None}
                queue = deque([u])
                while queue and w not in prev:
                    x = queue.popleft()
                    for y in sorted(graph.neighbors(x)):
                        if y not in prev and y not in banned:
                            prev[y] = x
                            queue.append(y)
                if w in prev:
                    path = []
                    x = w
                    while x is not None:
                        path.append(x)
                        x = prev[x]
                    return (v,) + tuple(reversed(path))
    return None


def check_decomposable(graph: UndirectedGraph) -> Decomposability:
    """Test chordality.

    Returns a perfect elimination ordering when the graph is decomposable and
    a chordless cycle of length at least 4 otherwise.
    """
    order = _mcs(graph)
    seen = set()
    for v in order:
        earlier = [w for w in graph.neighbors(v) if w in seen]
        if not graph.is_complete(earlier):
            return Decomposability(False, None, _chordless_cycle(graph))
        seen.add(v)
    return Decomposability(True, tuple(reversed(order)), None)


def find_cliques(graph: UndirectedGraph) -> tuple[VSet, ...]:
    """Maximal cliques of a decomposable graph, sorted lexicographically."""
    if not check_decomposable(graph).decomposable:
        raise NotDecomposable("graph has a chordless cycle of length >= 4")
    seen = set()
    candidates = []
    for v in _mcs(graph):
        candidates.append(frozenset(w for w in graph.neighbors(v) if w in seen) | {v})
        seen.add(v)
    maximal = {c for c in candidates if not any(c < d for d in candidates)}
    return tuple(sorted(vset(c) for c in maximal))


@dataclass(frozen=True)
class CliqueOrder:
    """A perfect order of cliques with its separators, histories and residuals."""

    cliques: tuple[VSet, ...]
    separators: tuple[VSet, ...]
    histories: tuple[VSet, ...]
    residuals: tuple[VSet, ...]

    @property
    def clique_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cliques)

    @property
    def separator_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.separators)

    def __len__(self):
        return len(self.cliques)

    def pairs(self) -> list[tuple[VSet, VSet]]:
        """(separator, clique) pairs, position by position."""
        return list(zip(self.separators, self.cliques))

    def occurrences(self) -> list[tuple[VSet, int]]:
        """(separator, occurrence index) for positions 2..K, in order."""
        counts = Counter()
        out = []
        for s in self.separators[1:]:
            counts[s] += 1
            out.append((s, counts[s]))
        return out


def _order_from(cliques: list[VSet]) -> CliqueOrder:
    seps, hists, ress = [], [], []
    hist: set[int] = set()
    for c in cliques:
        s = vset(set(c) & hist)
        seps.append(s)
        ress.append(vset(set(c) - hist))
        hist |= set(c)
        hists.append(vset(hist))
    return CliqueOrder(tuple(cliques), tuple(seps), tuple(hists), tuple(ress))


def validate_perfect_order(graph: UndirectedGraph, cliques_in_order) -> CliqueOrder:
    """Check that ``cliques_in_order`` is a perfect order of the cliques of ``graph``.

    Raises:
      NotPerfectOrder: the list is not a permutation of the cliques, or the
        running intersection property fails (``index`` is the 1-based position).
    """
    order = [vset(c) for c in cliques_in_order]
    cliques = find_cliques(graph)
    if sorted(order) != list(cliques):
        raise NotPerfectOrder(
            "order must list every clique exactly once; cliques are "
            + ", ".join(fmt(c) for c in cliques)
        )
    result = _order_from(order)
    for l in range(1, len(order)):
        s = set(result.separators[l])
        if not any(s <= set(order[i]) for i in range(l)):
            raise NotPerfectOrder(
                f"running intersection fails at position {l + 1}: separator "
                f"{fmt(result.separators[l])} is not inside an earlier clique",
                index=l + 1,
            )
    return result


def perfect_orders(graph: UndirectedGraph) -> Iterator[CliqueOrder]:
    """Enumerate every perfect order of the cliques (lexicographic DFS)."""
    cliques = find_cliques(graph)

    def extend(prefix, hist, remaining):
        if not remaining:
            yield _order_from(prefix)
            return
        for c in remaining:
            s = set(c) & hist
            if prefix and not any(s <= set(p) for p in prefix):
                continue
            yield from extend(prefix + [c], hist | set(c), [d for d in remaining if d != c])

    yield from extend([], set(), list(cliques))


def canonical_perfect_order(graph: UndirectedGraph) -> CliqueOrder:
    """The first perfect order in lexicographic DFS over the sorted cliques."""
    return next(perfect_orders(graph))


@dataclass(frozen=True)
class SeparatorOccurrence:
    separator: VSet
    occurrence_index: int

    @property
    def label(self) -> str:
        return ",".join(map(str, self.separator)) + f"#{self.occurrence_index}"


def separator_multiset(graph: UndirectedGraph) -> list[SeparatorOccurrence]:
    """Separators S_2..S_K with occurrence indices from the canonical order.

    The empty separator of the first clique is not listed.
    """
    order = canonical_perfect_order(graph)
    return [SeparatorOccurrence(s, k) for s, k in order.occurrences()]
