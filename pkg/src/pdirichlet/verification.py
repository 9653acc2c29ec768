"""Independent oracles: Monte-Carlo moments, exact constraint rank, brute-force enumeration."""
from __future__ import annotations

import itertools
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import null_space

from .dag import ParentMap, _p_perfect, validate_dag
from .errors import DagError, PriorError, TooLarge
from .family import ConstraintSystem, DagFamily, analyse
from .graph import CliqueOrder, UndirectedGraph, find_cliques, perfect_orders
from .linalg import rational_rank
from .prior import PDirichlet, _check_exponents, build_prior, log_moment
from .sampling import iter_log_samples, spawn_seeds

Z_LIMIT = 4.0
MIN_DRAWS = 1000
MAX_VERTICES = 5
MAX_CLIQUES = 6


class MomentCheck(NamedTuple):
    analytic: float
    mean: float
    stderr: float
    z: float
    flagged: bool


class MomentCheckReport(NamedTuple):
    order_id: str
    draws: int
    seed: int
    entries: tuple[MomentCheck, ...]

    @property
    def flagged(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.entries) if e.flagged)

    @property
    def ok(self) -> bool:
        return not self.flagged


def _z(analytic: float, mean: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if mean == analytic else float(np.copysign(np.inf, mean - analytic))
    return (mean - analytic) / se


def mc_check_moments(prior: PDirichlet, r_list: Sequence, draws: int, seed: int, order_id: str,
                     analytic: Sequence[float] | None = None, streams: int = 1) -> MomentCheckReport:
    """Compare analytic moments with Monte-Carlo averages of prod_i p(i)^r(i).

    Draws are split over ``streams`` independently seeded streams (children
    of ``seed``); mean and standard error come from the same draws.  Entries
    with |z| > 4 are flagged.  ``analytic`` overrides the moment formula,
    which is useful to test the harness itself.
    """
    if draws < MIN_DRAWS:
        raise PriorError(f"at least {MIN_DRAWS} draws are required")
    rs = [_check_exponents(prior, r).astype(float) for r in r_list]
    if analytic is None:
        analytic = [float(np.exp(log_moment(prior, r))) for r in rs]
    elif len(analytic) != len(rs):
        raise PriorError("one analytic value per exponent table is required")
    k = len(rs)
    count = 0
    mean = np.zeros(k)
    m2 = np.zeros(k)
    sizes = [draws // streams + (1 if s < draws % streams else 0) for s in range(streams)]
    seeds = spawn_seeds(seed, streams) if streams > 1 else [seed]
    for child, n in zip(seeds, sizes):
        for logp in iter_log_samples(prior, order_id, child, n):
            flat = logp.reshape(logp.shape[0], -1)
            vals = np.exp(flat @ np.stack([r.ravel() for r in rs], axis=1)) if k else np.zeros((len(flat), 0))
            nb = vals.shape[0]
            bmean = vals.mean(axis=0)
            bm2 = ((vals - bmean) ** 2).sum(axis=0)
            delta = bmean - mean
            tot = count + nb
            mean = mean + delta * nb / tot
            m2 = m2 + bm2 + delta**2 * count * nb / tot
            count = tot
    entries = []
    for a, m, q in zip(analytic, mean, m2):
        se = float(np.sqrt(q / (count - 1) / count))
        z = _z(float(a), float(m), se)
        entries.append(MomentCheck(float(a), float(m), se, z, abs(z) > Z_LIMIT))
    return MomentCheckReport(order_id, count, int(seed), tuple(entries))


class _Levels:
    """Just enough of a graph for laying out constraint rows."""

    def __init__(self, levels):
        self.levels = {int(v): int(n) for v, n in levels.items()}

    def shape(self, subset=None):
        subset = sorted(self.levels) if subset is None else subset
        return tuple(self.levels[v] for v in subset)

    def ncells(self, subset=None):
        return int(np.prod(self.shape(subset), dtype=np.int64))


def exact_rank(system: ConstraintSystem, levels) -> int:
    """Rank over the rationals of the scalar equalities of ``system``.

    ``levels`` is a graph or a mapping vertex -> number of states.
    """
    g = levels if isinstance(levels, UndirectedGraph) else _Levels(levels)
    return rational_rank(system.rows(g))


def row_space_contains(big: Sequence, small: Sequence) -> bool:
    """True when every row of ``small`` is a rational combination of rows of ``big``."""
    big, small = list(big), list(small)
    if not small:
        return True
    return rational_rank(big) == rational_rank(big + small)


class Enumeration(NamedTuple):
    dags: tuple[ParentMap, ...]
    perfect_orders: tuple[CliqueOrder, ...]
    p_perfect: dict[str, tuple[CliqueOrder, ...]]


def enumerate_small(graph: UndirectedGraph) -> Enumeration:
    """All moral DAGs with skeleton ``graph`` and all perfect orders.

    DAG ids are "d1", "d2", ... in the order orientations are generated.

    Raises:
      TooLarge: more than five vertices or six cliques.
    """
    if len(graph.vertices) > MAX_VERTICES or len(find_cliques(graph)) > MAX_CLIQUES:
        raise TooLarge(f"enumeration is limited to {MAX_VERTICES} vertices and {MAX_CLIQUES} cliques")
    edges = sorted(graph.edges)
    dags = []
    for flips in itertools.product((False, True), repeat=len(edges)):
        parents = {v: [] for v in graph.vertices}
        for (a, b), f in zip(edges, flips):
            if f:
                parents[a].append(b)
            else:
                parents[b].append(a)
        try:
            dags.append(validate_dag(graph, parents, f"d{len(dags) + 1}"))
        except DagError:
            continue
    orders = tuple(perfect_orders(graph))
    pp = {d.id: tuple(_p_perfect(graph, d)) for d in dags}
    return Enumeration(tuple(dags), orders, pp)


def random_prior(family: DagFamily, rng: np.random.Generator, scale: float = 2.0,
                 perturb: bool = True, tolerance: float = 1e-9) -> PDirichlet:
    """A random valid prior.

    Numerator tables start as marginals of a random positive pseudo-count
    table, which satisfies every constraint.  With ``perturb`` a random
    vector from the null space of the constraint matrix is added, moving the
    prior off the hyper-Dirichlet family whenever the constraints allow it.
    """
    g = family.graph
    sets, _, system = analyse(family)
    joint = rng.gamma(2.0, scale / 2.0, size=g.shape()) + 0.05
    nu = {a: np.asarray(joint.sum(axis=tuple(i for i, v in enumerate(g.vertices) if v not in a)), dtype=float)
          for a in sets.numerator}
    if perturb:
        rows = np.array(system.rows(g), dtype=float)
        x = np.concatenate([nu[a].ravel() for a in sets.numerator])
        if rows.size:
            basis = null_space(rows)
        else:
            basis = np.eye(len(x))
        if basis.shape[1]:
            d = basis @ rng.standard_normal(basis.shape[1])
            neg = d < 0
            step = 0.5 * float(np.min(x[neg] / -d[neg])) if neg.any() else 1.0
            x = x + min(step, 1.0) * d
        off = 0
        for a in sets.numerator:
            n = g.ncells(a)
            nu[a] = x[off:off + n].reshape(g.shape(a))
            off += n
    return build_prior(family, nu, tolerance=tolerance)
