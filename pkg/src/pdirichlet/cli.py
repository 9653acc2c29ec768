"""Command-line front end.

Every subcommand reads JSON files, calls one library operation and prints
JSON (sorted keys; ``--pretty`` indents).  Exit codes: 0 success,
1 validation or input error (reported on stderr as ``ErrorName: message``),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import PDirichletError
from .family import analyse, is_hyper_dirichlet_sufficient, is_separating
from .graph import check_decomposable
from .inference import log_evidence, posterior_update, predictive_table, score_configurations
from .prior import (
    DEFAULT_TOLERANCE,
    dimension_formula,
    dimension_rank,
    equals_hyper_dirichlet,
    extract_local_dirichlets,
    log_moment,
    uniform_template,
)
from .sampling import sample
from .verification import mc_check_moments


def _vs(subset) -> list[int]:
    return [int(v) for v in subset]


def _flat(t) -> list[float]:
    return [float(x) for x in np.ravel(t)]


def cmd_validate(args):
    fam = io.load_family(args.family)
    dec = check_decomposable(fam.graph)
    ids = [args.dag] if args.dag else list(fam.ids)
    dags = []
    for did in ids:
        d = fam.dag(did)
        num = fam.numberings[did]
        dags.append({
            "id": did,
            "order": [_vs(c) for c in fam.orders[did].cliques],
            "numbering": [list(l) for l in num.ladders],
        })
    sep = is_separating(fam)
    return {
        "valid": True,
        "decomposable": dec.decomposable,
        "elimination_order": _vs(dec.elimination_order),
        "dags": dags,
        "separating": sep.separating,
        "not_separated": _vs(sep.uncovered),
    }


def cmd_sets(args):
    fam = io.load_family(args.family)
    sets, chains, _ = analyse(fam)
    suff = is_hyper_dirichlet_sufficient(fam, sets)
    return {
        "cliques": [_vs(c) for c in sets.cliques],
        "separators": [s.label for s in sets.separators],
        "interior": [_vs(b) for b in sets.interior],
        "numerator": [_vs(a) for a in sets.numerator],
        "slots": [s.label for s in sets.slots],
        "hyper_dirichlet_sufficient": suff.sufficient,
    }


def cmd_chains(args):
    fam = io.load_family(args.family)
    _, chains, _ = analyse(fam)
    return {"chains": [
        {"order": k[0], "position": k[1], "slot": c.slot.label, "elements": [_vs(e) for e in c.elements]}
        for k, c in chains.items()
    ]}


def cmd_constraints(args):
    fam = io.load_family(args.family)
    _, _, system = analyse(fam)
    return {
        "classes": system.describe(),
        "linked": [
            {"slots": [s.label for s in slots], "expressions": sorted(map(str, exprs))}
            for slots, exprs in system.linked_groups()
        ],
        "scalar_constraints": system.scalar_constraint_count(fam.graph),
    }


def cmd_dim(args):
    fam = io.load_family(args.family)
    f = dimension_formula(fam)
    return {"formula": {"np": f.np, "nhp": f.nhp}, "rank": dimension_rank(fam)}


def cmd_init_prior(args):
    fam = io.load_family(args.family)
    prior = uniform_template(fam, args.alpha, tolerance=args.tol or DEFAULT_TOLERANCE)
    return io.prior_to_json(prior)


def cmd_check_prior(args):
    prior = io.load_prior(args.prior, args.tol)
    return {
        "valid": True,
        "residual": prior.residual,
        "tolerance": prior.tolerance,
        "hyper_dirichlet": equals_hyper_dirichlet(prior),
    }


def _r_table(path, prior):
    return io.load_counts(path, prior.graph).counts


def cmd_moment(args):
    prior = io.load_prior(args.prior, args.tol)
    return {"log_moment": log_moment(prior, _r_table(args.r, prior))}


def cmd_predictive(args):
    prior = io.load_prior(args.prior, args.tol)
    p = predictive_table(prior)
    return {"shape": list(p.shape), "p": _flat(p)}


def cmd_sample(args):
    prior = io.load_prior(args.prior, args.tol)
    order = args.order or prior.family.ids[0]
    draws = sample(prior, order, args.seed, args.draws)
    return {"order": order, "seed": args.seed, "shape": list(prior.graph.shape()),
            "draws": [_flat(d) for d in draws]}


def cmd_update(args):
    prior = io.load_prior(args.prior, args.tol)
    data = io.load_counts(args.counts, prior.graph)
    return io.prior_to_json(posterior_update(prior, data).posterior)


def cmd_evidence(args):
    prior = io.load_prior(args.prior, args.tol)
    data = io.load_counts(args.counts, prior.graph)
    return {"log_evidence": log_evidence(prior, data), "n": data.total}


def cmd_extract_local(args):
    prior = io.load_prior(args.prior, args.tol)
    did = args.dag or prior.family.ids[0]
    local = extract_local_dirichlets(prior, did)
    out = []
    for v, q in local.closures.items():
        out.append({
            "vertex": v,
            "parents": [w for w in q if w != v],
            "alpha": _flat(local.alpha[v]),
            "alpha_bar": _flat(local.alpha_bar(v)),
            "chain": v in local.chain_vertices,
        })
    return {"dag": did, "vertices": out}


def cmd_mc_verify(args):
    prior = io.load_prior(args.prior, args.tol)
    order = args.order or prior.family.ids[0]
    if args.r:
        rs = [_r_table(p, prior) for p in args.r]
    else:
        n = prior.graph.ncells()
        rs = [np.eye(n, dtype=np.int64)[i].reshape(prior.graph.shape()) for i in range(n)]
    rep = mc_check_moments(prior, rs, args.draws, args.seed, order, streams=args.streams)
    return {
        "order": order, "seed": args.seed, "draws": rep.draws, "ok": rep.ok,
        "flagged": list(rep.flagged),
        "entries": [e._asdict() for e in rep.entries],
    }


def cmd_score(args):
    if len(args.prior) != len(args.counts) and len(args.counts) != 1:
        raise argparse.ArgumentTypeError("give one --counts file or one per --prior")
    counts = args.counts * len(args.prior) if len(args.counts) == 1 else args.counts
    configs = []
    for p, c in zip(args.prior, counts):
        prior = io.load_prior(p, args.tol)
        configs.append((prior.family, prior, io.load_counts(c, prior.graph), str(p)))
    return {"ranking": [s._asdict() for s in score_configurations(configs)]}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pdirichlet", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indented output")
    common.add_argument("--tol", type=float, help="relative constraint tolerance")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_, *flags):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        for f in flags:
            f(p)
        return p

    def family(p):
        p.add_argument("--family", required=True)

    def prior(p):
        p.add_argument("--prior", required=True)

    def counts(p):
        p.add_argument("--counts", required=True)

    def order(p):
        p.add_argument("--order", help="order (DAG) id; defaults to the first")

    def seed(p):
        p.add_argument("--seed", type=int, required=True)

    def dag(p):
        p.add_argument("--dag", help="DAG id")

    add("validate", cmd_validate, "validate a family file", family, dag)
    add("sets", cmd_sets, "cliques, separators and interior sets", family)
    add("chains", cmd_chains, "clique chains of every order", family)
    add("constraints", cmd_constraints, "hyperparameter constraint classes", family)
    add("dim", cmd_dim, "parameter-space dimension", family)
    p = add("init-prior", cmd_init_prior, "uniform prior with equivalent sample size alpha", family)
    p.add_argument("--alpha", type=float, default=1.0)
    add("check-prior", cmd_check_prior, "validate a prior file", prior)
    p = add("moment", cmd_moment, "log moment at an exponent table", prior)
    p.add_argument("--r", required=True, help="exponent table in counts format")
    add("predictive", cmd_predictive, "expected cell probabilities", prior)
    p = add("sample", cmd_sample, "draw probability tables", prior, order, seed)
    p.add_argument("--draws", type=int, default=1)
    add("update", cmd_update, "posterior prior file", prior, counts)
    add("evidence", cmd_evidence, "log marginal likelihood", prior, counts)
    add("extract-local", cmd_extract_local, "local Dirichlet parameters of one DAG", prior, dag)
    p = add("mc-verify", cmd_mc_verify, "Monte-Carlo check of moments", prior, order, seed)
    p.add_argument("--draws", type=int, default=100000)
    p.add_argument("--r", action="append", help="exponent table (repeatable); default: every unit cell")
    p.add_argument("--streams", type=int, default=1)
    p = add("score", cmd_score, "rank priors by log evidence")
    p.add_argument("--prior", action="append", required=True)
    p.add_argument("--counts", action="append", required=True)
    return ap


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        result = args.func(args)
    except argparse.ArgumentTypeError as e:
        print(f"UsageError: {e}", file=stderr)
        return 2
    except PDirichletError as e:
        msg = e.args[0] if e.args else str(e)
        print(f"{type(e).__name__}: {msg}", file=stderr)
        return 1
    text = json.dumps(result, sort_keys=True, indent=2 if args.pretty else None,
                      separators=None if args.pretty else (",", ":"))
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text, file=stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
