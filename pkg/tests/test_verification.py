import numpy as np
import pytest

from pdirichlet import catalog
from pdirichlet.errors import PriorError, TooLarge
from pdirichlet.dag import ParentMap
from pdirichlet.family import (
    EMPTY,
    ConstraintClass,
    ConstraintSystem,
    DagFamily,
    Expression,
    Slot,
    analyse,
)
from pdirichlet.graph import UndirectedGraph
from pdirichlet.linalg import rational_rank
from pdirichlet.prior import log_moment, uniform_template
from pdirichlet.verification import (
    enumerate_small,
    exact_rank,
    mc_check_moments,
    random_prior,
    row_space_contains,
)

import oracles


def test_exact_rank_examples(bridge):
    _, _, system = analyse(bridge)
    assert exact_rank(system, bridge.graph) == 4
    assert exact_rank(system, dict(bridge.graph.levels)) == 4
    single = DagFamily.build(bridge.graph, [bridge.dag("p")], {"p": bridge.orders["p"]})
    assert exact_rank(analyse(single)[2], bridge.graph) == 0


def test_duplicate_rows_do_not_change_rank(bridge):
    rows = analyse(bridge)[2].rows(bridge.graph)
    assert rational_rank(rows + rows) == rational_rank(rows)
    assert rational_rank([["1/2", "1/3"], [3, 2]]) == 1
    assert rational_rank([]) == 0


def test_row_space_poset_on_triangles():
    rows = {c: analyse(catalog.triangles_family(c))[2].rows(catalog.triangles_family(c).graph)
            for c in ["I", "II", "III", "IV"]}
    assert row_space_contains(rows["II"], rows["IV"])
    assert row_space_contains(rows["I"], rows["II"]) and row_space_contains(rows["I"], rows["III"])
    assert not row_space_contains(rows["IV"], rows["I"])


def test_enumerate_small_counts():
    k2 = UndirectedGraph({1: 2, 2: 2}, [(1, 2)])
    assert len(enumerate_small(k2).dags) == 2
    path = UndirectedGraph({1: 2, 2: 2, 3: 2}, [(1, 2), (2, 3)])
    assert len(enumerate_small(path).dags) == 3
    assert len(enumerate_small(catalog.tree_family().graph).dags) == 5
    # moral orientations of a complete graph are its linear orders
    assert len(enumerate_small(catalog.complete_family(4).graph).dags) == 24
    big = UndirectedGraph({v: 2 for v in range(1, 7)}, [(i, i + 1) for i in range(1, 6)])
    with pytest.raises(TooLarge):
        enumerate_small(big)


def test_all_dags_family_gives_hyper_dirichlet_constraints(rng):
    """With every moral DAG and enough orders, the constraints match the consistency conditions."""
    for g in [catalog.chain_family(4).graph, catalog.triangles_family().graph,
              catalog.tree_family().graph]:
        en = enumerate_small(g)
        dags, orders = [], {}
        for d in en.dags:
            for k, o in enumerate(en.p_perfect[d.id]):
                pm = ParentMap(f"{d.id}o{k}", d.graph, d.parents, d.topological_order)
                dags.append(pm)
                orders[pm.id] = o
        fam = DagFamily(g, dags, orders)
        sets, _, system = analyse(fam)
        assert sets.interior == ()
        # hyper-Dirichlet consistency: every clique agrees on every separator inside it and on the total
        classes = [ConstraintClass(EMPTY, tuple(Expression(c, ()) for c in sets.cliques), ())]
        for s in sets.distinct_separators:
            ex = tuple(Expression(c, s) for c in sets.cliques if set(s) <= set(c))
            classes.append(ConstraintClass(Slot(s, 1), ex, ()))
        cons = ConstraintSystem(sets.numerator, tuple(classes)).rows(g)
        mine = system.rows(g)
        assert row_space_contains(mine, cons) and row_space_contains(cons, mine)
        # random points of each solution set satisfy the other system
        p = random_prior(fam, rng)
        x = np.concatenate([p.nu[a].ravel() for a in sets.numerator])
        assert np.max(np.abs(np.array(cons, dtype=float) @ x)) <= 1e-9


def test_mc_check_zero_and_corrupted(bridge):
    u = uniform_template(bridge, 2.0)
    shape = bridge.graph.shape()
    zero = np.zeros(shape, dtype=int)
    e0 = np.zeros(shape, dtype=int)
    e0[0, 0, 0, 0, 0] = 1
    rep = mc_check_moments(u, [zero, e0], 20000, 1, "p")
    assert rep.entries[0].mean == 1.0 and rep.entries[0].z == 0.0 and rep.entries[0].analytic == 1.0
    assert rep.ok
    bad = mc_check_moments(u, [e0], 20000, 1, "p", analytic=[1.1 / 32])
    assert bad.flagged == (0,)
    with pytest.raises(PriorError):
        mc_check_moments(u, [e0], 10, 1, "p")


def test_mc_streams_are_deterministic(bridge):
    u = uniform_template(bridge, 2.0)
    e0 = np.zeros(bridge.graph.shape(), dtype=int)
    e0[1, 0, 1, 0, 1] = 1
    a = mc_check_moments(u, [e0], 3000, 5, "p", streams=3)
    b = mc_check_moments(u, [e0], 3000, 5, "p", streams=3)
    assert a == b and a.draws == 3000


def test_complete_pair_is_classical_dirichlet(rng):
    fam = catalog.complete_family(2, levels=3)
    p = random_prior(fam, rng)
    alpha = p.nu[(1, 2)].ravel()
    for _ in range(10):
        r = rng.integers(0, 4, size=fam.graph.shape())
        assert log_moment(p, r) == pytest.approx(float(oracles.dirichlet_log_moment(alpha, r.ravel())), abs=1e-12)


def test_every_moral_dag_admits_a_numbering():
    graphs = [catalog.bridge_family().graph, catalog.triangles_family().graph,
              catalog.tree_family().graph, catalog.complete_family(4).graph]
    for g in graphs:
        en = enumerate_small(g)
        assert all(en.p_perfect[d.id] for d in en.dags)
