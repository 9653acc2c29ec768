import numpy as np
import pytest

from pdirichlet import catalog
from pdirichlet.errors import ConstraintViolated, MissingTable, NegativeExponent, NonPositiveParameter
from pdirichlet.family import Slot, analyse
from pdirichlet.prior import (
    build_prior,
    dimension_formula,
    dimension_rank,
    equals_hyper_dirichlet,
    extract_local_dirichlets,
    local_identity_residuals,
    log_moment,
    moment,
    p_moment_crosscheck,
    uniform_template,
)
from pdirichlet.tables import log_rising_factorial, marginalize
from pdirichlet.verification import random_prior

from oracles import log_rf


def unit(shape, idx):
    r = np.zeros(shape, dtype=np.int64)
    r[idx] = 1
    return r


def test_rising_factorial_exact_small_exponents():
    a = np.array([0.3, 1.7, 25.0])
    assert np.all(log_rising_factorial(a, 0) == 0.0)
    assert np.array_equal(log_rising_factorial(a, 1), np.log(a))
    for x, r in [(0.3, 5), (1.7, 16), (2.5, 17), (0.01, 300)]:
        assert log_rising_factorial(x, r) == pytest.approx(float(log_rf(x, r)), rel=1e-13, abs=1e-13)
    with pytest.raises(ValueError):
        log_rising_factorial(1.0, -1)


def test_uniform_template_values(bridge):
    u = uniform_template(bridge, 1.0)
    assert np.all(u.nu[(3, 4, 5)] == 1 / 8)
    assert np.all(u.nu[(3, 4)] == 1 / 4)
    assert np.all(u.mu[Slot((3,), 1)] == 1 / 2)
    assert u.total == 1.0 and u.residual == 0.0


@pytest.mark.parametrize("make", [
    catalog.bridge_family, catalog.chain_family, catalog.leaf_rooted_tree_family,
    lambda: catalog.tree_family(2), lambda: catalog.triangles_family("II"),
])
def test_uniform_template_validates_with_zero_residual(make):
    assert uniform_template(make(), 3.0).residual == 0.0


def test_uniform_template_mixed_levels_residual_at_rounding_level():
    fam = catalog.bridge_family({1: 3, 2: 2, 3: 3, 4: 2, 5: 5})
    assert uniform_template(fam, 1.0).residual <= 1e-15


def test_perturbed_table_with_stale_mu_is_rejected(bridge):
    u = uniform_template(bridge, 1.0)
    nu = {k: v.copy() for k, v in u.nu.items()}
    nu[(3, 4, 5)][0, 0, 0] += 0.1
    with pytest.raises(ConstraintViolated) as e:
        build_prior(bridge, nu, {Slot((3, 4)): u.mu[Slot((3, 4))]})
    assert e.value.slot == Slot((3, 4)) and e.value.residual > 0.1


def test_build_prior_input_errors(bridge):
    u = uniform_template(bridge, 1.0)
    nu = dict(u.nu)
    del nu[(3, 4)]
    with pytest.raises(MissingTable):
        build_prior(bridge, nu)
    nu = {k: v.copy() for k, v in u.nu.items()}
    nu[(1, 3)][0, 0] = 0.0
    with pytest.raises(NonPositiveParameter):
        build_prior(bridge, nu)
    with pytest.raises(NonPositiveParameter):
        uniform_template(bridge, 0.0)


def test_string_keys_and_flat_tables_are_accepted(bridge):
    u = uniform_template(bridge, 2.0)
    nu = {",".join(map(str, k)): v.ravel().tolist() for k, v in u.nu.items()}
    p = build_prior(bridge, nu, {"3#1": [1.0, 1.0]})
    assert p.residual == 0.0


def test_moment_basics(bridge, rng):
    u = uniform_template(bridge, 1.0)
    shape = bridge.graph.shape()
    assert log_moment(u, np.zeros(shape, dtype=int)) == 0.0
    assert moment(u, unit(shape, (0, 1, 0, 1, 1))) == pytest.approx(1 / 32, rel=1e-12)
    with pytest.raises(NegativeExponent):
        log_moment(u, -unit(shape, (0, 0, 0, 0, 0)))


def test_alpha_equal_cells_gives_uniform_expectations(bridge):
    u = uniform_template(bridge, 32.0)
    shape = bridge.graph.shape()
    vals = [moment(u, unit(shape, idx)) for idx in np.ndindex(shape)]
    assert np.allclose(vals, 1 / 32, rtol=1e-12)


def test_moment_strictly_decreasing(bridge, rng):
    p = random_prior(bridge, rng)
    shape = bridge.graph.shape()
    for _ in range(20):
        r = rng.integers(0, 3, size=shape)
        idx = tuple(int(rng.integers(0, 2)) for _ in shape)
        assert log_moment(p, r + unit(shape, idx)) < log_moment(p, r)


def test_extraction_triangle_blocks():
    fam = catalog.triangles_family("IV")
    p = random_prior(fam, np.random.default_rng(1))
    loc = extract_local_dirichlets(p, "p")
    parents = {v: tuple(w for w in q if w != v) for v, q in loc.closures.items()}
    assert parents == {1: (2, 5), 2: (), 3: (2, 5), 4: (3, 5), 5: (2,)}


def test_extraction_bridge_vertices(bridge, rng):
    p = random_prior(bridge, rng)
    loc = extract_local_dirichlets(p, "p")
    assert np.array_equal(loc.alpha[4], p.nu[(3, 4)])
    assert 4 in loc.chain_vertices
    assert np.allclose(loc.alpha[1], p.nu[(1, 3)].sum(axis=1), rtol=0, atol=0)


def test_extraction_single_clique_first_vertex_is_full_marginal(rng):
    fam = catalog.complete_family(3)
    p = random_prior(fam, rng)
    loc = extract_local_dirichlets(p, "up")
    assert np.allclose(loc.alpha[1], marginalize(p.nu[(1, 2, 3)], (1, 2, 3), (1,)))


@pytest.mark.parametrize("case", ["I", "II", "III", "IV"])
def test_local_identities_and_crosscheck(case, rng):
    fam = catalog.triangles_family(case)
    p = random_prior(fam, rng)
    for d in fam.ids:
        go, mius = local_identity_residuals(p, d)
        scale = max(float(np.max(t)) for t in p.nu.values())
        assert go <= 1e-12 * scale and mius <= 1e-12 * scale
        assert p_moment_crosscheck(p, d, np.zeros(fam.graph.shape(), int)) == 0.0
        for _ in range(5):
            r = rng.integers(0, 4, size=fam.graph.shape())
            assert p_moment_crosscheck(p, d, r) <= 1e-10


def test_bridge_uniform_crosscheck(bridge, rng):
    u = uniform_template(bridge, 1.0)
    for _ in range(10):
        r = rng.integers(0, 4, size=bridge.graph.shape())
        for d in bridge.ids:
            assert p_moment_crosscheck(u, d, r) <= 1e-10


def test_dimensions():
    f = dimension_formula(catalog.bridge_family())
    assert (f.np, f.nhp) == (16, 12)
    assert dimension_rank(catalog.bridge_family()) == 16
    f = dimension_formula(catalog.complete_family(2))
    assert (f.np, f.nhp) == (4, 4) and dimension_rank(catalog.complete_family(2)) == 4
    fam3 = catalog.chain_family(3)
    assert dimension_formula(fam3)[:2] == (6, 6) and dimension_rank(fam3) == 6
    assert dimension_rank(catalog.tree_family(1)) == 14
    assert dimension_rank(catalog.tree_family(2)) == 12
    for case, want in {"I": 16, "II": 20, "III": 20, "IV": 24}.items():
        fam = catalog.triangles_family(case)
        assert dimension_formula(fam).np == want == dimension_rank(fam)


def test_dimension_rank_matches_float_rank_oracle():
    for fam in [catalog.bridge_family({1: 3, 2: 2, 3: 3, 4: 2, 5: 2}), catalog.tree_family(1),
                catalog.tree_family(2), catalog.leaf_rooted_tree_family(3)]:
        system = analyse(fam)[2]
        rows = np.array(system.rows(fam.graph), dtype=float)
        total = sum(fam.graph.ncells(a) for a in system.numerator)
        assert dimension_rank(fam) == total - np.linalg.matrix_rank(rows)


def test_equals_hyper_dirichlet(rng):
    assert equals_hyper_dirichlet(uniform_template(catalog.chain_family(4), 2.0))
    fam = catalog.triangles_family("I")
    g = fam.graph
    joint = rng.gamma(2.0, size=g.shape())
    nu = {c: marginalize(joint, g.vertices, c) for c in [(1, 2, 5), (2, 3, 5), (3, 4, 5)]}
    assert equals_hyper_dirichlet(build_prior(fam, nu))
    fam = catalog.triangles_family("IV")
    nu = {c: rng.gamma(2.0, size=(2, 2, 2)) + 0.1 for c in [(1, 2, 5), (2, 3, 5), (3, 4, 5)]}
    nu[(1, 2, 5)] *= 2.0
    p = build_prior(fam, nu)
    assert not equals_hyper_dirichlet(p)
    assert not equals_hyper_dirichlet(random_prior(catalog.bridge_family(), rng))
