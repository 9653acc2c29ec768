import json
from pathlib import Path

import numpy as np
import pytest

from pdirichlet import catalog
from pdirichlet.errors import FamilyError, InteriorSetInMultipleCliques, UnknownDag, UnknownOrder
from pdirichlet.family import (
    EMPTY,
    DagFamily,
    Slot,
    analyse,
    is_hyper_dirichlet_sufficient,
    is_separating,
)
from pdirichlet.graph import UndirectedGraph
from pdirichlet.linalg import rational_rank
from pdirichlet.verification import enumerate_small

FIX = Path(__file__).parent / "fixtures"


def test_slot_labels_round_trip():
    for s in [EMPTY, Slot((3,), 1), Slot((2, 5), 2), Slot((3, 4))]:
        assert Slot.parse(s.label) == s
    assert Slot((3, 4)).kind == "interior" and EMPTY.kind == "empty"


def test_bridge_structure_sets(bridge):
    sets, chains, system = analyse(bridge)
    assert sets.interior == ((3, 4),)
    assert set(sets.numerator) == {(1, 3), (2, 4), (3, 4, 5), (3, 4)}
    assert [s.label for s in sets.slots] == ["empty", "3#1", "4#1", "3,4"]
    assert chains[("p", 2)].elements == ((3, 4, 5), (3, 4), (3,))
    assert chains[("p2", 2)].elements == ((3, 4, 5), (3, 4), (4,))
    assert chains[("p", 1)].length == 1
    assert system[Slot((3, 4))].definitional


def test_tree_and_triangles_have_no_interior_sets(triangles):
    assert analyse(catalog.tree_family(1))[0].interior == ()
    assert analyse(triangles)[0].interior == ()


def test_triangle_constraint_families_match_transcription(triangles):
    want = json.loads((FIX / "triangles_constraints.json").read_text())
    case = next(k for k, v in catalog.TRIANGLES_CASES.items()
                if tuple(triangles.orders["p"].cliques) == tuple(catalog.TRIANGLES_ORDERS["p"][v[0]])
                and tuple(triangles.orders["p2"].cliques) == tuple(catalog.TRIANGLES_ORDERS["p2"][v[1]]))
    got = {k: set(map(str, v)) for k, v in analyse(triangles)[2].as_sets().items()}
    assert got == {k: set(v) for k, v in want[case].items()}


def test_tree_choices_split_and_merge():
    s1 = analyse(catalog.tree_family(1))[2]
    assert {str(e) for e in s1[Slot((2,), 1)].expressions} == {"sum_{1} nu{1,2}", "sum_{3} nu{2,3}"}
    assert [str(e) for e in s1[Slot((2,), 2)].expressions] == ["sum_{4} nu{2,4}"]
    assert all(len(slots) == 1 for slots, _ in s1.linked_groups())
    s2 = analyse(catalog.tree_family(2))[2]
    merged = [g for g in s2.linked_groups() if len(g[0]) > 1]
    assert len(merged) == 1
    slots, exprs = merged[0]
    assert [s.label for s in slots] == ["2#1", "2#2"]
    assert {str(e) for e in exprs} == {"sum_{1} nu{1,2}", "sum_{3} nu{2,3}", "sum_{4} nu{2,4}"}


def test_interior_set_in_two_cliques_is_rejected():
    g = UndirectedGraph({v: 2 for v in range(1, 5)}, [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4)])
    p = {1: [], 2: [1], 3: [1, 2], 4: [1, 2]}
    q = {2: [], 1: [2], 3: [1, 2], 4: [1, 2]}
    fam = DagFamily.build(g, [("p", p), ("q", q)])
    with pytest.raises(InteriorSetInMultipleCliques):
        analyse(fam)


def test_family_lookup_errors(bridge):
    with pytest.raises(UnknownDag):
        bridge.dag("nope")
    with pytest.raises(UnknownOrder):
        bridge.order("nope")
    with pytest.raises(FamilyError):
        DagFamily(bridge.graph, [], {})


def test_separating():
    assert is_separating(catalog.chain_family(5)).separating
    assert is_separating(catalog.leaf_rooted_tree_family()).separating
    rep = is_separating(catalog.triangles_family("I"))
    assert not rep.separating and rep.uncovered[0] == 1
    single = DagFamily.build(catalog.bridge_family().graph, [catalog.bridge_family().dag("p")])
    assert not is_separating(single).separating


def test_hyper_dirichlet_sufficiency():
    fam = catalog.chain_family(5)
    assert is_hyper_dirichlet_sufficient(fam, analyse(fam)[0]).sufficient
    fam = catalog.leaf_rooted_tree_family()
    assert is_hyper_dirichlet_sufficient(fam, analyse(fam)[0]).sufficient
    fam = catalog.triangles_family("IV")
    rep = is_hyper_dirichlet_sufficient(fam, analyse(fam)[0])
    assert not rep.sufficient and ((2, 5), (2, 3, 5)) in rep.unpaired
    fam = catalog.bridge_family()
    assert not is_hyper_dirichlet_sufficient(fam, analyse(fam)[0]).sufficient


def test_singleton_family_only_has_definitional_classes(bridge):
    fam = DagFamily.build(bridge.graph, [bridge.dag("p")], {"p": bridge.orders["p"]})
    _, _, system = analyse(fam)
    assert all(c.definitional for c in system.classes)
    assert system.rows(fam.graph) == []


def test_empty_class_is_implied_on_worked_families():
    fams = [catalog.bridge_family(), catalog.tree_family(1), catalog.tree_family(2)]
    fams += [catalog.triangles_family(c) for c in "I II III IV".split()]
    for fam in fams:
        system = analyse(fam)[2]
        g = fam.graph
        assert rational_rank(system.rows(g)) == rational_rank(system.rows(g, include_empty=False))


def test_no_interior_sets_means_unit_chains():
    rng = np.random.default_rng(11)
    graphs = [
        UndirectedGraph({v: 2 for v in range(1, 5)}, [(1, 2), (2, 3), (3, 4), (1, 3)]),
        UndirectedGraph({v: 2 for v in range(1, 5)}, [(1, 2), (2, 3), (2, 4)]),
        UndirectedGraph({v: 2 for v in range(1, 5)}, [(1, 2), (1, 3), (2, 3), (3, 4)]),
    ]
    checked = 0
    for g in graphs:
        en = enumerate_small(g)
        for _ in range(15):
            k = int(rng.integers(2, len(en.dags) + 1))
            pick = rng.choice(len(en.dags), size=k, replace=False)
            fam = DagFamily.build(g, [en.dags[i] for i in pick])
            try:
                sets, chains, _ = analyse(fam)
            except InteriorSetInMultipleCliques:
                continue
            if not sets.interior:
                checked += 1
                assert set(sets.numerator) == set(sets.cliques)
                assert all(c.length == 1 for c in chains.values())
    assert checked > 10
