"""Contingency tables, conjugate updating, evidence and predictive probabilities."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CellOutOfRange, GraphMismatch, PriorError
from .family import DagFamily
from .graph import UndirectedGraph
from .prior import (
    PDirichlet,
    _check_exponents,
    build_prior,
    constraint_deviations,
    dimension_rank,
    log_moment,
    relative_residuals,
)
from .tables import full_marginal

# dense storage limit for count tables
MAX_CELLS = 10**6


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    graph: UndirectedGraph = field(repr=False)
    counts: np.ndarray

    def __post_init__(self):
        g = self.graph
        n = g.ncells()
        if n > MAX_CELLS:
            raise PriorError(f"{n} cells exceed the dense limit of {MAX_CELLS}; reduce levels or vertices")
        c = np.asarray(self.counts)
        if c.size != n:
            raise PriorError(f"count table has {c.size} entries, expected {n}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(c == np.round(c)):
                raise PriorError("counts must be integers")
        c = c.astype(np.int64).reshape(g.shape())
        if np.any(c < 0):
            raise PriorError("counts must be non-negative")
        object.__setattr__(self, "counts", c)

    @classmethod
    def zeros(cls, graph: UndirectedGraph) -> "ContingencyTable":
        return cls(graph, np.zeros(graph.shape(), dtype=np.int64))

    @classmethod
    def from_cells(cls, graph: UndirectedGraph, cells) -> "ContingencyTable":
        """Build from (cell index tuple, count) pairs; repeated cells add up."""
        c = np.zeros(graph.shape(), dtype=np.int64)
        for idx, n in cells:
            idx = tuple(int(i) for i in idx)
            _check_cell(graph, idx)
            c[idx] += int(n)
        return cls(graph, c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ContingencyTable") -> "ContingencyTable":
        if other.graph != self.graph:
            raise GraphMismatch("tables are on different graphs")
        return ContingencyTable(self.graph, self.counts + other.counts)


def _check_cell(graph: UndirectedGraph, cell) -> tuple[int, ...]:
    cell = tuple(int(i) for i in cell)
    shape = graph.shape()
    if len(cell) != len(shape) or any(not 0 <= i < n for i, n in zip(cell, shape)):
        raise CellOutOfRange(f"cell {cell} is outside the table of shape {shape}")
    return cell


def marginal_counts(table: ContingencyTable, subset) -> np.ndarray:
    """Counts summed down to ``subset`` (a 0-d array holding N for the empty set)."""
    subset = table.graph.check_subset(subset)
    return full_marginal(table.counts, table.graph, subset)


class PosteriorReport(NamedTuple):
    posterior: PDirichlet
    log_evidence: float
    predictive: np.ndarray


def _same_graph(prior: PDirichlet, data: ContingencyTable):
    if data.graph != prior.graph:
        raise GraphMismatch("count table and prior are on different graphs")


def updated_prior(prior: PDirichlet, data: ContingencyTable) -> PDirichlet:
    """Add the matching count marginal to every nu and mu table.

    The float tables are validated as usual.  The reported residual is that
    of the exact hyperparameters prior + counts: counts satisfy every
    constraint exactly, so the prior's absolute deviations carry over
    unchanged and only the denominators grow.  Rounding in the float sums
    is representation error and is not counted.
    """
    _same_graph(prior, data)
    g = prior.graph
    nu = {a: t + full_marginal(data.counts, g, a) for a, t in prior.nu.items()}
    mu = {s: t + full_marginal(data.counts, g, s.vertices) for s, t in prior.mu.items()}
    post = build_prior(prior.family, nu, mu, tolerance=max(prior.tolerance, prior.residual))
    dev = prior.deviation or constraint_deviations(prior.constraints, prior.nu, prior.mu)
    res = relative_residuals(dev, mu)
    return replace(post, residual=max(res.values()), deviation=dev)


def posterior_update(prior: PDirichlet, data: ContingencyTable) -> PosteriorReport:
    """Posterior, evidence and posterior predictive table for ``data``.

    Raises:
      GraphMismatch: the data are on another graph.
    """
    post = updated_prior(prior, data)
    return PosteriorReport(post, log_evidence(prior, data), predictive_table(post))


def log_evidence(prior: PDirichlet, data: ContingencyTable) -> float:
    """log of E prod_i p(i)^n(i), i.e. the prior moment at the counts."""
    _same_graph(prior, data)
    return log_moment(prior, data.counts)


def predictive_table(prior: PDirichlet) -> np.ndarray:
    """E p(i) for every cell, from the product form of the first moment."""
    g = prior.graph
    logp = np.zeros(g.shape())
    for a, t in prior.nu.items():
        logp = logp + _broadcast(np.log(t), a, g)
    for s, t in prior.mu.items():
        logp = logp - _broadcast(np.log(t), s.vertices, g)
    return np.exp(logp)


def _broadcast(values, vertices, graph):
    return np.reshape(values, tuple(graph.levels[v] if v in vertices else 1 for v in graph.vertices))


def predictive_cell(prior: PDirichlet, cell) -> float:
    """E p(cell); raises CellOutOfRange for an invalid index tuple."""
    cell = _check_cell(prior.graph, cell)
    r = np.zeros(prior.graph.shape(), dtype=np.int64)
    r[cell] = 1
    return float(np.exp(log_moment(prior, r)))


class ScoredConfig(NamedTuple):
    index: int
    label: str
    log_evidence: float
    dimension: int


def score_configurations(configs: Sequence) -> list[ScoredConfig]:
    """Rank (family, prior, data[, label]) configurations by log evidence.

    Sorting is stable, so equal scores keep their input order.
    """
    if not configs:
        return []
    ref = None
    scored = []
    for i, cfg in enumerate(configs):
        family, prior, data = cfg[:3]
        label = cfg[3] if len(cfg) > 3 else str(i)
        if not isinstance(family, DagFamily) or prior.family is not family:
            raise PriorError(f"configuration {label}: prior does not belong to the given family")
        levels = prior.graph.levels
        if ref is None:
            ref = levels
        elif levels != ref:
            raise GraphMismatch(f"configuration {label} has a different variable set or levels")
        counts = data.counts if isinstance(data, ContingencyTable) else np.asarray(data)
        scored.append(ScoredConfig(i, label, log_moment(prior, _check_exponents(prior, counts)),
                                   dimension_rank(prior)))
    return sorted(scored, key=lambda s: -s.log_evidence)
