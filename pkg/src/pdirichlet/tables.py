"""Dense tables over vertex subsets and rising factorials in log space.

A table over a subset A is an ndarray with one axis per vertex of A in
ascending vertex order, so the flattened (C-order) layout is mixed radix with
the last vertex fastest.  A table over the empty set is a 0-d array.
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .graph import UndirectedGraph, VSet, vset

# exponents up to this value are summed term by term
_SMALL = 16


def marginalize(values: np.ndarray, vertices: VSet, target) -> np.ndarray:
    """Sum a table over ``vertices`` down to the subset ``target``."""
    target = set(target)
    if not target <= set(vertices):
        raise ValueError(f"{sorted(target)} is not a subset of {list(vertices)}")
    drop = tuple(i for i, v in enumerate(vertices) if v not in target)
    return np.asarray(values).sum(axis=drop) if drop else np.asarray(values)


def full_marginal(table: np.ndarray, graph: UndirectedGraph, target) -> np.ndarray:
    return marginalize(table, graph.vertices, target)


def expand(values: np.ndarray, vertices: VSet, graph: UndirectedGraph) -> np.ndarray:
    """View a subset table as broadcastable against the full table over V."""
    shape = [1] * len(graph.vertices)
    for v, n in zip(vertices, np.shape(values)):
        shape[graph.vertices.index(v)] = n
    return np.reshape(values, shape)


def log_rising_factorial(a, r) -> np.ndarray:
    """log of a (a+1) ... (a+r-1) = log Gamma(a+r) - log Gamma(a), elementwise.

    Exact zeros for r == 0 and log(a) for r == 1; small exponents are summed
    term by term, larger ones use log-gamma differences.
    """
    a = np.asarray(a, dtype=float)
    r = np.asarray(r)
    if np.any(r < 0):
        raise ValueError("negative exponent")
    a, r = np.broadcast_arrays(a, r)
    out = np.zeros(a.shape, dtype=float)
    small = r <= _SMALL
    if small.any():
        top = int(r[small].max()) if small.any() else 0
        for j in range(top):
            out += np.where(small & (j < r), np.log(a + j), 0.0)
    big = ~small
    if big.any():
        out[big] = gammaln(a[big] + r[big]) - gammaln(a[big])
    return out


def sum_log_rising(a, r) -> float:
    return float(np.sum(log_rising_factorial(a, r)))


def subset_key(text: str) -> VSet:
    """Parse a comma-joined vertex list such as ``"3,4,5"``."""
    return vset(int(x) for x in text.split(",") if x.strip())


def key_text(subset: VSet) -> str:
    return ",".join(map(str, subset))
