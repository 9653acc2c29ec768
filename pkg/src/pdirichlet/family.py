"""DAG families, their structure sets, clique chains and hyperparameter constraints.

A family is a list of moral DAGs on one skeleton together with one perfect
order per DAG that admits the DAG's ladder numbering.  From it we derive

* the interior sets: closures shared by all DAGs that are not cliques,
* the numerator sets (cliques plus interior sets), which carry the free
  tables ``nu``,
* the denominator slots (empty slot, separator occurrences, interior sets),
  which carry the derived tables ``mu``,
* one nested chain per (order, clique position), and
* the linear constraints tying ``mu`` slots to marginals of ``nu`` tables.

Separator occurrences are matched across orders by position: the k-th time a
separator appears in an order is identified with its k-th appearance in the
reference (first) order.  This rule is an interpretation; it reproduces both
constraint regimes of the binary tree with a doubled separator.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .dag import ParentMap, first_p_perfect_order, image_multisets, numbering, validate_dag
from .errors import ChainNotNested, FamilyError, InteriorSetInMultipleCliques, UnknownDag, UnknownOrder
from .graph import CliqueOrder, UndirectedGraph, VSet, find_cliques, fmt, separator_multiset, validate_perfect_order


@dataclass(frozen=True, order=True)
class Slot:
    """Key of a denominator table.

    ``occurrence`` is None for interior sets and a 1-based index for
    separators; the empty slot is ``Slot((), 1)``.
    """

    vertices: VSet
    occurrence: int | None = None

    @property
    def kind(self) -> str:
        if not self.vertices:
            return "empty"
        return "interior" if self.occurrence is None else "separator"

    @property
    def label(self) -> str:
        if not self.vertices:
            return "empty"
        base = ",".join(map(str, self.vertices))
        return base if self.occurrence is None else f"{base}#{self.occurrence}"

    @classmethod
    def parse(cls, label: str) -> "Slot":
        if label == "empty":
            return EMPTY
        if "#" in label:
            base, k = label.split("#")
            return cls(tuple(int(x) for x in base.split(",")), int(k))
        return cls(tuple(int(x) for x in label.split(",")), None)

    def __repr__(self):
        return f"Slot({self.label})"


EMPTY = Slot((), 1)


class DagFamily:
    """A family of moral DAGs with one chosen perfect order per DAG.

    The first DAG is the reference for occurrence matching.  The same DAG may
    appear several times under different ids to use several of its orders.
    """

    def __init__(self, graph: UndirectedGraph, dags: Sequence[ParentMap], orders: Mapping[str, CliqueOrder]):
        if not dags:
            raise FamilyError("a family needs at least one DAG")
        ids = [d.id for d in dags]
        if len(set(ids)) != len(ids):
            raise FamilyError(f"duplicate DAG ids in {ids}")
        for d in dags:
            if d.graph != graph:
                raise FamilyError(f"DAG {d.id} has a different skeleton")
            if d.id not in orders:
                raise FamilyError(f"no order given for DAG {d.id}")
        self.graph = graph
        self.dags = tuple(dags)
        self.orders = {d.id: orders[d.id] for d in dags}
        self.numberings = {d.id: numbering(d, self.orders[d.id]) for d in dags}

    @classmethod
    def build(cls, graph: UndirectedGraph, dags, orders=None) -> "DagFamily":
        """Convenience constructor.

        ``dags`` may hold :class:`ParentMap` objects or ``(id, parents)`` pairs;
        ``orders`` maps DAG ids to clique lists.  DAGs without an order get
        their first perfect order in lexicographic search.
        """
        orders = dict(orders or {})
        built = []
        for d in dags:
            if not isinstance(d, ParentMap):
                d = validate_dag(graph, d[1], str(d[0]))
            built.append(d)
        resolved = {}
        for d in built:
            if d.id in orders:
                o = orders[d.id]
                resolved[d.id] = o if isinstance(o, CliqueOrder) else validate_perfect_order(graph, o)
            else:
                resolved[d.id] = first_p_perfect_order(graph, d)
        return cls(graph, built, resolved)

    def __repr__(self):
        return f"DagFamily(dags={[d.id for d in self.dags]})"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.dags)

    def dag(self, dag_id: str) -> ParentMap:
        for d in self.dags:
            if d.id == dag_id:
                return d
        raise UnknownDag(f"no DAG with id {dag_id!r}; family has {list(self.ids)}")

    def order(self, order_id: str) -> CliqueOrder:
        try:
            return self.orders[order_id]
        except KeyError:
            raise UnknownOrder(f"no order with id {order_id!r}; family has {list(self.ids)}") from None

    def pairings(self) -> set[tuple[VSet, VSet]]:
        """All (separator, clique) pairs realised by some order, empty separator included."""
        return {p for o in self.orders.values() for p in o.pairs()}


@dataclass(frozen=True)
class StructureSets:
    cliques: tuple[VSet, ...]
    separators: tuple[Slot, ...]
    interior: tuple[VSet, ...]

    @property
    def numerator(self) -> tuple[VSet, ...]:
        return self.cliques + self.interior

    @property
    def slots(self) -> tuple[Slot, ...]:
        return (EMPTY,) + self.separators + tuple(Slot(b) for b in self.interior)

    @property
    def distinct_separators(self) -> tuple[VSet, ...]:
        return tuple(sorted({s.vertices for s in self.separators}))


def compute_structure_sets(family: DagFamily) -> StructureSets:
    """Numerator sets, interior sets and denominator slots of a family.

    Raises:
      InteriorSetInMultipleCliques: an interior set lies inside two cliques.
    """
    cliques = find_cliques(family.graph)
    interior = None
    for d in family.dags:
        r = set(image_multisets(d).residual)
        interior = r if interior is None else interior & r
    interior = tuple(sorted(interior, key=lambda b: (len(b), b)))
    for b in interior:
        owners = [c for c in cliques if set(b) <= set(c)]
        if len(owners) != 1:
            raise InteriorSetInMultipleCliques(
                f"interior set {fmt(b)} lies in cliques {', '.join(fmt(c) for c in owners)}"
            )
    seps = tuple(Slot(s.separator, s.occurrence_index) for s in separator_multiset(family.graph))
    return StructureSets(cliques, seps, interior)


@dataclass(frozen=True)
class CliqueChain:
    """Nested sets C = Q_0 > Q_1 > ... > Q_j = S for one clique of one order."""

    order_id: str
    position: int
    slot: Slot
    elements: tuple[VSet, ...]

    @property
    def clique(self) -> VSet:
        return self.elements[0]

    @property
    def separator(self) -> VSet:
        return self.elements[-1]

    @property
    def length(self) -> int:
        return len(self.elements) - 1

    def steps(self):
        """(Q_i, Q_{i+1}, Q_i minus Q_{i+1}) for i = 0..length-1."""
        for a, b in zip(self.elements, self.elements[1:]):
            yield a, b, tuple(v for v in a if v not in b)


def compute_chains(family: DagFamily, sets: StructureSets) -> dict[tuple[str, int], CliqueChain]:
    """Chains keyed by (order id, 1-based clique position)."""
    interior = set(sets.interior)
    chains = {}
    for dag in family.dags:
        order = family.orders[dag.id]
        num = family.numberings[dag.id]
        occ = Counter()
        for l, (sep, clique) in enumerate(order.pairs(), start=1):
            if l == 1:
                slot = EMPTY
            else:
                occ[sep] += 1
                slot = Slot(sep, occ[sep])
            prefixes = [dag.closure(v) for v in num.ladders[l - 1]]
            inner = [q for q in prefixes[:-1] if q in interior]
            elements = (clique,) + tuple(reversed(inner)) + (sep,)
            for a, b in zip(elements, elements[1:]):
                if not (set(b) < set(a)):
                    raise ChainNotNested(f"chain for {fmt(clique)} in order {dag.id} is not nested")
            expected = {b for b in interior if set(b) <= set(clique)}
            if set(inner) != expected:
                raise ChainNotNested(
                    f"chain for {fmt(clique)} in order {dag.id} misses interior sets "
                    + ", ".join(fmt(b) for b in sorted(expected - set(inner)))
                )
            chains[(dag.id, l)] = CliqueChain(dag.id, l, slot, elements)
    return chains


@dataclass(frozen=True, order=True)
class Expression:
    """Marginal of the table on ``source`` onto ``target`` (empty target: grand total)."""

    source: VSet
    target: VSet

    def __str__(self):
        out = tuple(v for v in self.source if v not in self.target)
        return f"sum_{fmt(out)} nu{fmt(self.source)}"


@dataclass(frozen=True)
class ConstraintClass:
    slot: Slot
    expressions: tuple[Expression, ...]
    members: tuple[tuple[str, int], ...]

    @property
    def definitional(self) -> bool:
        return len(self.expressions) == 1


@dataclass(frozen=True)
class ConstraintSystem:
    numerator: tuple[VSet, ...]
    classes: tuple[ConstraintClass, ...]

    def __getitem__(self, slot: Slot) -> ConstraintClass:
        for c in self.classes:
            if c.slot == slot:
                return c
        raise KeyError(slot)

    @property
    def slots(self) -> tuple[Slot, ...]:
        return tuple(c.slot for c in self.classes)

    def scalar_constraint_count(self, graph: UndirectedGraph) -> int:
        """Number of scalar equalities among ``nu`` entries (before rank reduction)."""
        return sum((len(c.expressions) - 1) * graph.ncells(c.slot.vertices) for c in self.classes)

    def as_sets(self) -> dict[str, frozenset[Expression]]:
        return {c.slot.label: frozenset(c.expressions) for c in self.classes}

    def implied_totals(self) -> frozenset[str]:
        """Grand totals forced to equal the empty-slot value by the classes.

        Lists the total of every nonempty separator slot and of every
        interior numerator table.
        """
        out = set()
        for c in self.classes:
            if c.slot.kind == "separator":
                out.add(f"sum_{fmt(c.slot.vertices)} mu[{c.slot.label}]")
            elif c.slot.kind == "interior":
                out.add(str(Expression(c.slot.vertices, ())))
        return frozenset(out)

    def describe(self) -> dict[str, list[str]]:
        """Every class as sorted expression strings, plus the implied totals."""
        out = {c.slot.label: sorted(map(str, c.expressions)) for c in self.classes}
        out["implied:empty"] = sorted(self.implied_totals())
        return out

    def linked_groups(self) -> list[tuple[tuple[Slot, ...], frozenset[Expression]]]:
        """Merge classes of one separator that share an expression.

        Each group lists slots whose values are forced to coincide together
        with every expression equal to them.
        """
        groups: list[tuple[set, set]] = []
        for c in self.classes:
            slots, exprs = {c.slot}, set(c.expressions)
            keep = []
            for g in groups:
                same_sep = {s.vertices for s in g[0]} == {c.slot.vertices}
                if same_sep and g[1] & exprs:
                    slots |= g[0]
                    exprs |= g[1]
                else:
                    keep.append(g)
            groups = keep + [(slots, exprs)]
        return sorted(((tuple(sorted(s)), frozenset(e)) for s, e in groups), key=lambda g: g[0])

    def rows(self, graph: UndirectedGraph, include_empty: bool = True) -> list[list[int]]:
        """Integer coefficient rows of the equalities over the stacked ``nu`` entries."""
        layout = variable_layout(self.numerator, graph)
        rows = []
        for c in self.classes:
            if c.slot == EMPTY and not include_empty:
                continue
            if len(c.expressions) < 2:
                continue
            first = expression_rows(c.expressions[0], graph, layout)
            for e in c.expressions[1:]:
                other = expression_rows(e, graph, layout)
                rows.extend((a - b).tolist() for a, b in zip(first, other))
        return rows


def variable_layout(numerator: Sequence[VSet], graph: UndirectedGraph) -> dict[VSet, tuple[int, int]]:
    """Offset and size of each ``nu`` table in the stacked parameter vector."""
    out, off = {}, 0
    for a in numerator:
        n = graph.ncells(a)
        out[a] = (off, n)
        off += n
    return out


def expression_rows(expr: Expression, graph: UndirectedGraph, layout) -> np.ndarray:
    """One coefficient row per target cell: 1 on every source cell projecting onto it."""
    off, n = layout[expr.source]
    total = sum(size for _, size in layout.values())
    shape = graph.shape(expr.source)
    coords = np.unravel_index(np.arange(n), shape)
    keep = [i for i, v in enumerate(expr.source) if v in expr.target]
    if keep:
        target_idx = np.ravel_multi_index(tuple(coords[i] for i in keep), graph.shape(expr.target))
    else:
        target_idx = np.zeros(n, dtype=int)
    rows = np.zeros((graph.ncells(expr.target), total), dtype=np.int64)
    rows[target_idx, off + np.arange(n)] = 1
    return rows


def derive_constraints(family: DagFamily, sets: StructureSets, chains) -> ConstraintSystem:
    """Group chain links into one class per denominator slot.

    Within a chain every step Q_{i-1} -> Q_i contributes the expression
    "marginal of nu on Q_{i-1} onto Q_i" to the class of Q_i's slot; the last
    step lands in the separator occurrence (or empty) slot of the position.
    """
    exprs: dict[Slot, list[Expression]] = {s: [] for s in sets.slots}
    members: dict[Slot, list[tuple[str, int]]] = {s: [] for s in sets.slots}
    for d in family.dags:
        for l in range(1, len(family.orders[d.id]) + 1):
            ch = chains[(d.id, l)]
            el = ch.elements
            for i in range(1, len(el)):
                slot = ch.slot if i == len(el) - 1 else Slot(el[i])
                e = Expression(el[i - 1], el[i])
                if slot not in exprs:
                    raise FamilyError(f"chain produced unknown slot {slot.label}")
                if e not in exprs[slot]:
                    exprs[slot].append(e)
                members[slot].append((d.id, l))
    classes = tuple(ConstraintClass(s, tuple(exprs[s]), tuple(members[s])) for s in sets.slots)
    return ConstraintSystem(sets.numerator, classes)


class SeparatingReport(NamedTuple):
    separating: bool
    uncovered: tuple[int, ...]


def is_separating(family: DagFamily) -> SeparatingReport:
    """Every vertex must get two different parent sets from two DAGs of the family."""
    uncovered = tuple(
        v for v in family.graph.vertices
        if len({d.parents[v] for d in family.dags}) < 2
    )
    return SeparatingReport(not uncovered, uncovered)


class SufficiencyReport(NamedTuple):
    sufficient: bool
    interior: tuple[VSet, ...]
    unpaired: tuple[tuple[VSet, VSet], ...]


def is_hyper_dirichlet_sufficient(family: DagFamily, sets: StructureSets, chains=None) -> SufficiencyReport:
    """No interior sets, and every nonempty separator is paired with every clique containing it."""
    paired = family.pairings()
    unpaired = tuple(
        (s, c)
        for s in sets.distinct_separators
        for c in sets.cliques
        if set(s) <= set(c) and (s, c) not in paired
    )
    return SufficiencyReport(not sets.interior and not unpaired, sets.interior, unpaired)


def analyse(family: DagFamily):
    """Structure sets, chains and constraints in one call."""
    sets = compute_structure_sets(family)
    chains = compute_chains(family, sets)
    return sets, chains, derive_constraints(family, sets, chains)
