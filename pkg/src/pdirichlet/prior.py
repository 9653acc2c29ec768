"""The P-Dirichlet distribution: hyperparameters, moments, local Dirichlets, dimension.

Hyperparameters are stored as dense tables: ``nu[A]`` for every numerator
set A and ``mu[slot]`` for every denominator slot.  The ``mu`` tables are
derived from ``nu`` by default; explicitly supplied ones are checked against
the derivation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import (
    ConstraintViolated,
    MissingTable,
    NegativeExponent,
    NonPositiveParameter,
    PriorError,
)
from .family import (
    EMPTY,
    ConstraintSystem,
    DagFamily,
    Slot,
    StructureSets,
    analyse,
)
from .graph import UndirectedGraph, VSet, fmt, vset
from .linalg import rational_rank
from .tables import full_marginal, log_rising_factorial, marginalize, subset_key

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class PDirichlet:
    family: DagFamily
    sets: StructureSets
    chains: dict = field(repr=False)
    constraints: ConstraintSystem = field(repr=False)
    nu: dict[VSet, np.ndarray] = field(repr=False)
    mu: dict[Slot, np.ndarray] = field(repr=False)
    tolerance: float = DEFAULT_TOLERANCE
    residual: float = 0.0
    deviation: dict[Slot, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def graph(self) -> UndirectedGraph:
        return self.family.graph

    @property
    def total(self) -> float:
        """Equivalent sample size (the empty-slot parameter)."""
        return float(self.mu[EMPTY])

    def log_moment(self, r) -> float:
        return log_moment(self, r)

    def moment(self, r) -> float:
        return moment(self, r)


def _coerce_table(name: str, values, shape) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    n = int(np.prod(shape)) if shape else 1
    if arr.size != n:
        raise PriorError(f"table {name} has {arr.size} entries, expected {n}")
    arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise NonPositiveParameter(f"table {name} has non-positive or non-finite entries")
    return arr


def _expr_values(nu, expr) -> np.ndarray:
    return marginalize(nu[expr.source], expr.source, expr.target)


def constraint_deviations(constraints: ConstraintSystem, nu, mu) -> dict[Slot, np.ndarray]:
    """Cellwise largest |mu - expression| over the expressions of each slot."""
    out = {}
    for c in constraints.classes:
        m = mu[c.slot]
        out[c.slot] = np.max([np.abs(m - _expr_values(nu, e)) for e in c.expressions], axis=0)
    return out


def relative_residuals(deviation: dict, mu) -> dict[Slot, float]:
    return {s: float(np.max(d / mu[s])) for s, d in deviation.items()}


def build_prior(family: DagFamily, nu_tables: Mapping, mu_tables: Mapping | None = None,
                tolerance: float = DEFAULT_TOLERANCE) -> PDirichlet:
    """Validate hyperparameters against the constraint system of ``family``.

    Keys of ``nu_tables`` are vertex tuples or comma-joined strings; keys of
    ``mu_tables`` are :class:`Slot` objects or their labels (``"empty"``,
    ``"3#1"``, ``"3,4"``).  Missing ``mu`` tables are derived.

    Raises:
      MissingTable: a numerator table is absent.
      NonPositiveParameter: some entry is not strictly positive.
      ConstraintViolated: the relative residual exceeds ``tolerance``.
    """
    sets, chains, system = analyse(family)
    graph = family.graph
    given = {}
    for k, v in nu_tables.items():
        key = subset_key(k) if isinstance(k, str) else vset(k)
        given[key] = v
    nu = {}
    for a in sets.numerator:
        if a not in given:
            raise MissingTable(f"missing nu table for {fmt(a)}")
        nu[a] = _coerce_table(f"nu{fmt(a)}", given.pop(a), graph.shape(a))
    if given:
        raise PriorError(f"unexpected nu tables: {', '.join(fmt(k) for k in given)}")

    supplied = {}
    for k, v in (mu_tables or {}).items():
        slot = Slot.parse(k) if isinstance(k, str) else k
        if slot not in system.slots:
            raise PriorError(f"unexpected mu table {slot.label}")
        supplied[slot] = _coerce_table(f"mu[{slot.label}]", v, graph.shape(slot.vertices))
    mu = {}
    for c in system.classes:
        mu[c.slot] = supplied.get(c.slot, _expr_values(nu, c.expressions[0]))

    dev = constraint_deviations(system, nu, mu)
    res = relative_residuals(dev, mu)
    worst = max(res, key=res.get)
    if res[worst] > tolerance:
        raise ConstraintViolated(
            f"constraint for mu[{worst.label}] violated: relative residual {res[worst]:.3e} "
            f"exceeds tolerance {tolerance:.1e}",
            residual=res[worst],
            slot=worst,
        )
    return PDirichlet(family, sets, chains, system, nu, mu, tolerance, res[worst], dev)


def uniform_template(family: DagFamily, alpha: float, tolerance: float = DEFAULT_TOLERANCE) -> PDirichlet:
    """nu tables spread the equivalent sample size ``alpha`` evenly over their cells."""
    if not alpha > 0:
        raise NonPositiveParameter("alpha must be positive")
    sets, _, _ = analyse(family)
    g = family.graph
    nu = {a: np.full(g.shape(a), alpha / g.ncells(a)) for a in sets.numerator}
    return build_prior(family, nu, tolerance=tolerance)


def _check_exponents(prior: PDirichlet, r) -> np.ndarray:
    r = np.asarray(r)
    shape = prior.graph.shape()
    if r.size != int(np.prod(shape)):
        raise PriorError(f"exponent table has {r.size} entries, expected {int(np.prod(shape))}")
    r = r.reshape(shape)
    if not np.issubdtype(r.dtype, np.integer):
        if not np.all(r == np.round(r)):
            raise PriorError("exponents must be integers")
        r = r.astype(np.int64)
    if np.any(r < 0):
        raise NegativeExponent("exponents must be non-negative")
    return r


def log_moment(prior: PDirichlet, r) -> float:
    """log E prod_i p(i)^r(i).

    Numerator: rising factorials of every ``nu`` table at the matching
    marginal of ``r``.  Denominator: one factor per slot of the denominator
    multiset, so a separator occurring twice contributes twice.
    """
    r = _check_exponents(prior, r)
    g = prior.graph
    out = 0.0
    for a, table in prior.nu.items():
        out += float(np.sum(log_rising_factorial(table, full_marginal(r, g, a))))
    for slot, table in prior.mu.items():
        out -= float(np.sum(log_rising_factorial(table, full_marginal(r, g, slot.vertices))))
    return out


def moment(prior: PDirichlet, r) -> float:
    return float(np.exp(log_moment(prior, r)))


class LocalDirichletSet(NamedTuple):
    """Dirichlet parameters of each conditional p(v | parents).

    ``alpha[v]`` is a table over the closure of ``v`` (parents and v, ascending
    axes); the Dirichlet for parent configuration k runs along v's axis.
    ``chain_vertices`` are the vertices whose parameters are a whole
    ``nu`` table rather than a marginal of one.
    """

    dag_id: str
    closures: dict[int, VSet]
    alpha: dict[int, np.ndarray]
    chain_vertices: frozenset[int]

    def alpha_bar(self, v: int) -> np.ndarray:
        """Sums of the parameters of v over its own states: a table over its parents."""
        q = self.closures[v]
        return marginalize(self.alpha[v], q, tuple(w for w in q if w != v))


def extract_local_dirichlets(prior: PDirichlet, dag_id: str) -> LocalDirichletSet:
    """Per-vertex conditional Dirichlet parameters for one DAG of the family.

    A vertex whose closure is a chain element Q_i takes ``nu`` on Q_i as is.
    Any other vertex takes the marginal, onto its closure, of ``nu`` on the
    smallest chain element containing its closure.
    """
    fam = prior.family
    dag = fam.dag(dag_id)
    num = fam.numberings[dag_id]
    alpha, closures, chain_vs = {}, {}, set()
    for l, ladder in enumerate(num.ladders, start=1):
        chain = prior.chains[(dag_id, l)]
        elements = chain.elements[:-1]
        for v in ladder:
            q = dag.closure(v)
            closures[v] = q
            if q in elements:
                alpha[v] = prior.nu[q].copy()
                chain_vs.add(v)
            else:
                host = [e for e in elements if set(q) <= set(e)][-1]
                alpha[v] = marginalize(prior.nu[host], host, q)
    return LocalDirichletSet(dag_id, dict(sorted(closures.items())), dict(sorted(alpha.items())), frozenset(chain_vs))


def local_log_moment(local: LocalDirichletSet, graph: UndirectedGraph, r) -> float:
    """log-moment of the product of independent local Dirichlets."""
    out = 0.0
    for v, q in local.closures.items():
        parents = tuple(w for w in q if w != v)
        out += float(np.sum(log_rising_factorial(local.alpha[v], full_marginal(r, graph, q))))
        out -= float(np.sum(log_rising_factorial(local.alpha_bar(v), full_marginal(r, graph, parents))))
    return out


def p_moment_crosscheck(prior: PDirichlet, dag_id: str, r) -> float:
    """|log ratio| between the local-Dirichlet moment and the family moment formula."""
    r = _check_exponents(prior, r)
    local = extract_local_dirichlets(prior, dag_id)
    return abs(local_log_moment(local, prior.graph, r) - log_moment(prior, r))


def local_identity_residuals(prior: PDirichlet, dag_id: str) -> tuple[float, float]:
    """Largest absolute deviations in the two bookkeeping identities.

    First: a non-chain vertex's parameters equal the parameter sums of the
    next vertex on its ladder.  Second: each denominator table equals the
    parameter sums of the vertex whose parent set is that slot's set.
    """
    fam = prior.family
    dag = fam.dag(dag_id)
    local = extract_local_dirichlets(prior, dag_id)
    go = mius = 0.0
    for l, ladder in enumerate(fam.numberings[dag_id].ladders, start=1):
        for v, w in zip(ladder, ladder[1:]):
            if v not in local.chain_vertices:
                go = max(go, float(np.max(np.abs(local.alpha[v] - local.alpha_bar(w)))))
        chain = prior.chains[(dag_id, l)]
        for i, q in enumerate(chain.elements[1:], start=1):
            slot = chain.slot if i == chain.length else Slot(q)
            v = next(u for u in ladder if dag.parents[u] == q)
            mius = max(mius, float(np.max(np.abs(prior.mu[slot] - local.alpha_bar(v)))))
    return go, mius


class DimensionFormula(NamedTuple):
    np: int
    nhp: int
    paired_counts: dict
    containing_counts: dict


def dimension_formula(family: DagFamily, sets: StructureSets | None = None) -> DimensionFormula:
    """Closed-form parameter counts of the family and of the hyper-Dirichlet.

    N_S counts distinct cliques paired with separator S by some order (for
    the family) or containing S (for the hyper-Dirichlet); the empty
    separator is not counted.
    """
    if sets is None:
        sets = analyse(family)[0]
    g = family.graph
    pairs = family.pairings()
    paired, containing = {}, {}
    for s in sets.distinct_separators:
        paired[s] = len({c for (t, c) in pairs if t == s})
        containing[s] = sum(1 for c in sets.cliques if set(s) <= set(c))
    np_ = sum(g.ncells(q) for q in sets.numerator) - sum(
        (paired[s] - 1) * g.ncells(s) for s in sets.distinct_separators)
    nhp = sum(g.ncells(c) for c in sets.cliques) - sum(
        (containing[s] - 1) * g.ncells(s) for s in sets.distinct_separators)
    if sets.interior and not np_ > nhp:
        raise RuntimeError(f"dimension formula gives {np_} <= {nhp} with interior sets present")
    return DimensionFormula(np_, nhp, paired, containing)


def dimension_rank(source, graph: UndirectedGraph | None = None) -> int:
    """Number of nu entries minus the exact rank of their equality constraints.

    ``source`` is a :class:`PDirichlet`, a :class:`DagFamily` or a
    :class:`ConstraintSystem` (the latter needs ``graph``).
    """
    if isinstance(source, PDirichlet):
        system, graph = source.constraints, source.graph
    elif isinstance(source, DagFamily):
        system, graph = analyse(source)[2], source.graph
    else:
        system = source
        if graph is None:
            raise ValueError("graph is required with a bare constraint system")
    total = sum(graph.ncells(a) for a in system.numerator)
    return total - rational_rank(system.rows(graph))


def equals_hyper_dirichlet(prior: PDirichlet, tolerance: float | None = None) -> bool:
    """True when there are no interior sets and every clique table marginalises,
    onto every separator it contains and onto the empty set, to that slot's values."""
    tol = prior.tolerance if tolerance is None else tolerance
    if prior.sets.interior:
        return False
    for slot, m in prior.mu.items():
        for c in prior.sets.cliques:
            if not set(slot.vertices) <= set(c):
                continue
            e = marginalize(prior.nu[c], c, slot.vertices)
            if np.max(np.abs(e - m) / m) > tol:
                return False
    return True
