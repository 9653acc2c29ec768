"""The hyper-Dirichlet distribution on a decomposable graph.

It is the special case of the P-Dirichlet with no interior sets and every
separator paired with every clique containing it.  Its moments are ratios
of the normalising constant, which gives an independent check of the
general moment formula.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import InconsistentHyperParameters, NonPositiveParameter, PriorError
from .family import EMPTY, Slot
from .graph import CliqueOrder, UndirectedGraph, VSet, canonical_perfect_order, fmt
from .tables import full_marginal, marginalize

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class HyperDirichlet:
    """Clique tables, separator tables (positions 2..K of ``order``) and the total."""

    graph: UndirectedGraph = field(repr=False)
    order: CliqueOrder
    cliques: dict[VSet, np.ndarray] = field(repr=False)
    separators: tuple[np.ndarray, ...] = field(repr=False)
    alpha: float

    @classmethod
    def from_joint(cls, graph: UndirectedGraph, joint, order: CliqueOrder | None = None) -> "HyperDirichlet":
        """Marginals of a positive pseudo-count table over all cells."""
        joint = np.asarray(joint, dtype=float).reshape(graph.shape())
        if np.any(joint <= 0):
            raise NonPositiveParameter("pseudo-counts must be positive")
        order = order or canonical_perfect_order(graph)
        cl = {c: full_marginal(joint, graph, c) for c in order.cliques}
        seps = tuple(full_marginal(joint, graph, s) for s in order.separators[1:])
        return cls(graph, order, cl, seps, float(joint.sum()))

    @classmethod
    def from_prior(cls, prior) -> "HyperDirichlet":
        """Read clique and separator tables off a P-Dirichlet without interior sets."""
        if prior.sets.interior:
            raise PriorError("prior has interior sets; it is not a hyper-Dirichlet")
        order = canonical_perfect_order(prior.graph)
        seps = tuple(prior.mu[Slot(s, k)] for s, k in order.occurrences())
        cl = {c: prior.nu[c] for c in order.cliques}
        return cls(prior.graph, order, cl, seps, float(prior.mu[EMPTY]))

    def residual(self) -> float:
        """Largest relative violation of the marginal consistency conditions."""
        worst = 0.0
        for c, t in self.cliques.items():
            worst = max(worst, abs(float(t.sum()) - self.alpha) / self.alpha)
        for s, t in zip(self.order.separators[1:], self.separators):
            for c, ct in self.cliques.items():
                if set(s) <= set(c):
                    worst = max(worst, float(np.max(np.abs(marginalize(ct, c, s) - t) / t)))
        return worst

    def check(self, tolerance: float = DEFAULT_TOLERANCE) -> None:
        for t in list(self.cliques.values()) + list(self.separators):
            if np.any(t <= 0):
                raise NonPositiveParameter("hyper-Dirichlet parameters must be positive")
        res = self.residual()
        if res > tolerance:
            raise InconsistentHyperParameters(
                f"clique and separator tables disagree: relative residual {res:.3e}")

    def shifted(self, r) -> "HyperDirichlet":
        """Parameters after adding the marginals of the count table ``r``."""
        g = self.graph
        r = np.asarray(r).reshape(g.shape())
        cl = {c: t + full_marginal(r, g, c) for c, t in self.cliques.items()}
        seps = tuple(t + full_marginal(r, g, s) for s, t in zip(self.order.separators[1:], self.separators))
        return HyperDirichlet(g, self.order, cl, seps, self.alpha + float(r.sum()))

    def log_moment(self, r) -> float:
        """log of Z(alpha + r) / Z(alpha)."""
        return hyper_dirichlet_normalizer(self.shifted(r)) - hyper_dirichlet_normalizer(self)

    def predictive(self) -> np.ndarray:
        """Expected cell probabilities: clique tables over alpha times separator tables."""
        g = self.graph
        logp = np.full(g.shape(), -np.log(self.alpha))
        for c, t in self.cliques.items():
            logp = logp + _expand(np.log(t), c, g)
        for s, t in zip(self.order.separators[1:], self.separators):
            logp = logp - _expand(np.log(t), s, g)
        return np.exp(logp)


def _expand(values, vertices, graph):
    shape = [1] * len(graph.vertices)
    for v, n in zip(vertices, np.shape(values)):
        shape[graph.vertices.index(v)] = n
    return np.reshape(values, shape)


def hyper_dirichlet_normalizer(hd: HyperDirichlet, tolerance: float = DEFAULT_TOLERANCE) -> float:
    """log of the normalising constant.

    Raises:
      InconsistentHyperParameters: clique totals differ from ``alpha`` or
        clique tables do not marginalise onto the separator tables.
    """
    hd.check(tolerance)
    out = -float(gammaln(hd.alpha))
    for t in hd.cliques.values():
        out += float(np.sum(gammaln(t)))
    for t in hd.separators:
        out -= float(np.sum(gammaln(t)))
    return out


def describe(hd: HyperDirichlet) -> str:
    return "HyperDirichlet(" + ", ".join(fmt(c) for c in hd.order.cliques) + f"; alpha={hd.alpha:g})"
