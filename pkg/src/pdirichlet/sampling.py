"""Draw probability tables from a P-Dirichlet prior.

Along a chosen order, every clique is split along its chain into
conditional blocks; each block is a set of independent Dirichlet vectors.

RNG contract: ``numpy.random.Generator(PCG64(seed))``.  Draws are produced
in chunks of ``CHUNK`` tables.  Within a chunk the blocks are visited by
clique position, then by chain step, and for each block two arrays are
drawn in this order: ``standard_gamma(nu + 1)`` and ``random()``, both of
shape (draws, cells of Q_{i+1}, cells of R_i).  A Gamma(a) variate is
formed as G(a+1) * U**(1/a) in log space, which keeps tiny shape
parameters from underflowing to exact zeros.
"""
from __future__ import annotations

from typing import Iterator

import numpy as np
from scipy.special import logsumexp

from .errors import PriorError

CHUNK = 65536


def _block_params(table: np.ndarray, q: tuple, keep: tuple, resid: tuple) -> np.ndarray:
    """Rearrange a table over ``q`` into (cells of keep, cells of resid)."""
    perm = [q.index(v) for v in keep] + [q.index(v) for v in resid]
    t = np.transpose(table, perm)
    n_keep = int(np.prod(t.shape[:len(keep)])) if keep else 1
    return t.reshape(n_keep, -1)


def _log_dirichlet(rng: np.random.Generator, alpha: np.ndarray, n: int) -> np.ndarray:
    """log of n draws of independent Dirichlet rows; ``alpha`` has shape (K, M)."""
    g = rng.standard_gamma(alpha + 1.0, size=(n,) + alpha.shape)
    u = rng.random(size=(n,) + alpha.shape)
    logx = np.log(g) + np.log(u) / alpha
    return logx - logsumexp(logx, axis=-1, keepdims=True)


def iter_log_samples(prior, order_id: str, seed, n_draws: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Yield chunks of log probability tables with shape (draws, *levels)."""
    if n_draws < 0:
        raise PriorError("n_draws must be non-negative")
    fam = prior.family
    order = fam.order(order_id)
    g = prior.graph
    rng = np.random.Generator(np.random.PCG64(seed))
    blocks = []
    for l in range(1, len(order) + 1):
        ch = prior.chains[(order_id, l)]
        for q, nxt, resid in ch.steps():
            alpha = _block_params(prior.nu[q], q, nxt, resid)
            blocks.append((q, nxt, resid, alpha))
    done = 0
    while done < n_draws:
        n = min(chunk, n_draws - done)
        out = np.zeros((n,) + g.shape())
        for q, nxt, resid, alpha in blocks:
            logp = _log_dirichlet(rng, alpha, n)
            shape = (n,) + g.shape(nxt) + g.shape(resid)
            logp = logp.reshape(shape)
            order_axes = nxt + resid
            perm = [0] + [1 + order_axes.index(v) for v in q]
            logp = np.transpose(logp, perm)
            out += logp.reshape((n,) + tuple(g.levels[v] if v in q else 1 for v in g.vertices))
        done += n
        yield out


def sample(prior, order_id: str, seed, n_draws: int, log: bool = False) -> np.ndarray:
    """Independent draws of the full probability table, shape (n_draws, *levels).

    With ``log`` the natural logarithms are returned; use this when the
    parameters are so small that some probabilities fall below the float
    range.

    ``seed`` is an int or a :class:`numpy.random.SeedSequence` (see
    :func:`spawn_seeds` for parallel streams).

    Raises:
      UnknownOrder: ``order_id`` is not an order of the family.
    """
    parts = [x if log else np.exp(x) for x in iter_log_samples(prior, order_id, seed, n_draws)]
    if not parts:
        return np.zeros((0,) + prior.graph.shape())
    return np.concatenate(parts, axis=0)


def spawn_seeds(seed: int, n_streams: int) -> list[np.random.SeedSequence]:
    """Independent child seeds for parallel streams; stream k always gets child k."""
    return np.random.SeedSequence(seed).spawn(n_streams)
