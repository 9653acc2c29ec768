"""JSON formats for graphs, families, priors and count tables.

Every document carries ``"spec": 1``.  Tables are flat lists in mixed-radix
order (last vertex fastest) keyed by comma-joined vertex ids; prior values
are written as decimal strings (shortest round-trip form of the float).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import NotDecomposable, PDirichletError
from .family import DagFamily, Slot
from .graph import UndirectedGraph, check_decomposable
from .inference import ContingencyTable
from .prior import DEFAULT_TOLERANCE, PDirichlet, build_prior
from .tables import key_text

SPEC_VERSION = 1


class FormatError(PDirichletError):
    """Malformed input file."""


def read_json(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise FormatError(f"cannot read {p}: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{p} line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError(f"{p}: top level must be an object")
    return doc


def _check_version(doc: dict, where: str):
    v = doc.get("spec", SPEC_VERSION)
    if v != SPEC_VERSION:
        raise FormatError(f"{where}: unsupported spec version {v!r}")


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


def graph_to_json(graph: UndirectedGraph) -> dict:
    return {
        "levels": {str(v): n for v, n in graph.levels.items()},
        "edges": [list(e) for e in sorted(graph.edges)],
    }


def graph_from_json(doc: dict, where: str = "graph") -> UndirectedGraph:
    levels = _need(doc, "levels", where)
    if isinstance(levels, list):
        levels = {i + 1: n for i, n in enumerate(levels)}
    return UndirectedGraph({int(k): int(n) for k, n in levels.items()}, _need(doc, "edges", where))


def family_to_json(family: DagFamily) -> dict:
    return {
        "spec": SPEC_VERSION,
        "graph": graph_to_json(family.graph),
        "dags": [
            {"id": d.id, "parents": {str(v): list(ps) for v, ps in d.parents.items()}}
            for d in family.dags
        ],
        "orders": {d.id: [list(c) for c in family.orders[d.id].cliques] for d in family.dags},
    }


def family_from_json(doc: dict, where: str = "family", base: Path | None = None) -> DagFamily:
    """Validates the graph (decomposable), every DAG and every order.

    ``graph`` is an inline object or a path (relative to ``base``).  Orders
    come from the top-level ``orders`` map or a per-DAG ``order`` field;
    DAGs without one get their first perfect order.
    """
    _check_version(doc, where)
    gdoc = _need(doc, "graph", where)
    if isinstance(gdoc, str):
        gdoc = read_json(_resolve(gdoc, base))
    graph = graph_from_json(gdoc, where)
    dec = check_decomposable(graph)
    if not dec.decomposable:
        raise NotDecomposable(f"graph is not decomposable: chordless cycle {list(dec.cycle)}")
    orders = dict(doc.get("orders", {}))
    dags = []
    for i, d in enumerate(_need(doc, "dags", where)):
        did = str(d.get("id", f"d{i + 1}"))
        parents = {int(k): v for k, v in _need(d, "parents", f"{where} dag {did}").items()}
        dags.append((did, parents))
        if "order" in d:
            orders[did] = d["order"]
    return DagFamily.build(graph, dags, orders)


def _resolve(path, base: Path | None) -> Path:
    p = Path(path)
    return base / p if base is not None and not p.is_absolute() else p


def load_family(path) -> DagFamily:
    return family_from_json(read_json(path), str(path), Path(path).parent)


def _num(x) -> float:
    try:
        return float(x)
    except (TypeError, ValueError):
        raise FormatError(f"not a number: {x!r}") from None


def _table(values) -> np.ndarray:
    if isinstance(values, list):
        return np.array([_num(x) for x in np.ravel(np.array(values, dtype=object))], dtype=float)
    return np.array(_num(values))


def _dec(x: float) -> str:
    return repr(float(x))


def prior_to_json(prior: PDirichlet, family_ref: Any = None) -> dict:
    """Prior document; the family is embedded unless a path is given."""
    return {
        "spec": SPEC_VERSION,
        "family": family_to_json(prior.family) if family_ref is None else str(family_ref),
        "tolerance": _dec(prior.tolerance),
        "nu": {key_text(a): [_dec(x) for x in t.ravel()] for a, t in prior.nu.items()},
        "mu": {
            s.label: (_dec(t) if s.vertices == () else [_dec(x) for x in t.ravel()])
            for s, t in prior.mu.items()
        },
    }


def prior_from_json(doc: dict, base: Path | None = None, where: str = "prior",
                    tolerance: float | None = None) -> PDirichlet:
    _check_version(doc, where)
    fam = _need(doc, "family", where)
    if isinstance(fam, str):
        family = load_family(_resolve(fam, base))
    else:
        family = family_from_json(fam, f"{where} family", base)
    tol = tolerance if tolerance is not None else _num(doc.get("tolerance", DEFAULT_TOLERANCE))
    nu = {k: _table(v) for k, v in _need(doc, "nu", where).items()}
    mu = {Slot.parse(k): _table(v) for k, v in doc.get("mu", {}).items()}
    return build_prior(family, nu, mu, tolerance=tol)


def load_prior(path, tolerance: float | None = None) -> PDirichlet:
    return prior_from_json(read_json(path), Path(path).parent, str(path), tolerance)


def counts_to_json(table: ContingencyTable) -> dict:
    cells = [
        {"i": [int(x) for x in idx], "n": int(n)}
        for idx, n in np.ndenumerate(table.counts) if n
    ]
    return {"spec": SPEC_VERSION, "cells": cells}


def counts_from_json(doc: dict, graph: UndirectedGraph, where: str = "counts") -> ContingencyTable:
    """Sparse ``cells`` list, or a ``dense`` flat list in mixed-radix order."""
    _check_version(doc, where)
    if "dense" in doc:
        return ContingencyTable(graph, np.asarray(doc["dense"]))
    cells = []
    for c in _need(doc, "cells", where):
        cells.append((_need(c, "i", where), c.get("n", 1)))
    return ContingencyTable.from_cells(graph, cells)


def load_counts(path, graph: UndirectedGraph) -> ContingencyTable:
    return counts_from_json(read_json(path), graph, str(path))

