import math

import numpy as np
import pytest

from pdirichlet import catalog
from pdirichlet.errors import InconsistentHyperParameters
from pdirichlet.family import DagFamily
from pdirichlet.graph import UndirectedGraph, canonical_perfect_order
from pdirichlet.hyper import HyperDirichlet, hyper_dirichlet_normalizer
from pdirichlet.prior import build_prior, log_moment, uniform_template
from pdirichlet.tables import marginalize

import oracles


def single_vertex(a, b):
    g = UndirectedGraph({1: 2}, [])
    return HyperDirichlet(g, canonical_perfect_order(g), {(1,): np.array([a, b])}, (), a + b)


def test_beta_normalizers():
    assert hyper_dirichlet_normalizer(single_vertex(1.0, 1.0)) == 0.0
    a, b = 2.5, 0.7
    want = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    assert hyper_dirichlet_normalizer(single_vertex(a, b)) == pytest.approx(want, rel=1e-14)


def test_chain_uniform_normalizer():
    fam = catalog.chain_family(3)
    hd = HyperDirichlet.from_prior(uniform_template(fam, 1.0))
    want = 8 * math.lgamma(0.25) - math.lgamma(1.0) - 2 * math.lgamma(0.5)
    assert hyper_dirichlet_normalizer(hd) == pytest.approx(want, rel=1e-14)


def test_inconsistent_tables_are_rejected():
    fam = catalog.chain_family(3)
    hd = HyperDirichlet.from_prior(uniform_template(fam, 1.0))
    bad = dict(hd.cliques)
    bad[(2, 3)] = bad[(2, 3)] * 1.5
    with pytest.raises(InconsistentHyperParameters):
        hyper_dirichlet_normalizer(HyperDirichlet(hd.graph, hd.order, bad, hd.separators, hd.alpha))


def test_normalizer_matches_oracle_on_random_joint(rng):
    fam = catalog.leaf_rooted_tree_family()
    g = fam.graph
    joint = rng.gamma(1.5, size=g.shape()) + 0.05
    hd = HyperDirichlet.from_joint(g, joint)
    jd = {c: float(joint[c]) for c in np.ndindex(g.shape())}
    want = oracles.hyper_log_normalizer(jd, g.levels, hd.order.cliques)
    assert hyper_dirichlet_normalizer(hd) == pytest.approx(float(want), rel=1e-12)


def test_moments_match_normalizer_ratio(rng):
    fam = catalog.chain_family(4)
    g = fam.graph
    joint = rng.gamma(1.5, size=g.shape()) + 0.05
    hd = HyperDirichlet.from_joint(g, joint)
    nu = {c: marginalize(joint, g.vertices, c) for c in hd.cliques}
    prior = build_prior(fam, nu)
    jd = {c: float(joint[c]) for c in np.ndindex(g.shape())}
    for _ in range(10):
        r = rng.integers(0, 4, size=g.shape())
        want = oracles.hyper_log_normalizer(oracles.shift(jd, r), g.levels, hd.order.cliques) \
            - oracles.hyper_log_normalizer(jd, g.levels, hd.order.cliques)
        assert log_moment(prior, r) == pytest.approx(float(want), abs=1e-10)
        assert hd.log_moment(r) == pytest.approx(float(want), abs=1e-10)


def test_predictive_closed_form(rng):
    fam = catalog.chain_family(3, levels=3)
    g = fam.graph
    joint = rng.gamma(1.0, size=g.shape()) + 0.1
    hd = HyperDirichlet.from_joint(g, joint)
    p = hd.predictive()
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    a12 = joint.sum(axis=2)
    a23 = joint.sum(axis=0)
    a2 = joint.sum(axis=(0, 2))
    want = a12[:, :, None] * a23[None, :, :] / (joint.sum() * a2[None, :, None])
    assert np.allclose(p, want, rtol=1e-12)
