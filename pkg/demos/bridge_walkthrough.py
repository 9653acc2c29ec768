"""# A prior shared by two DAGs

The bridge graph is the triangle {3,4,5} with pendant edges 1-3 and 2-4.
Two moral DAGs on it direct the triangle from different sides, so their
local Dirichlet parameters must agree through a few marginal conditions.
This script walks from the graph to a validated prior and back."""

import numpy as np

from pdirichlet import catalog
from pdirichlet.family import analyse
from pdirichlet.prior import dimension_formula, dimension_rank, extract_local_dirichlets, moment, uniform_template
from pdirichlet.sampling import sample

# %%
fam = catalog.bridge_family()
sets, chains, system = analyse(fam)
print("cliques:  ", sets.cliques)
print("interior: ", sets.interior)
for (order, pos), chain in sorted(chains.items()):
    print(f"chain {order}/{pos}: {chain.elements}")

""" Each slot collects the sums that must equal its denominator table. """

for label, exprs in system.describe().items():
    print(f"{label:>14}: {', '.join(exprs)}")

# %%
f = dimension_formula(fam)
print("free parameters (formula):", f.np, "hyper-Dirichlet:", f.nhp, "rank:", dimension_rank(fam))

# %%
prior = uniform_template(fam, alpha=2.0)
print("residual:", prior.residual)
e = np.zeros(fam.graph.shape(), dtype=int)
e[0, 1, 0, 1, 1] = 1
print("E p(01011) =", moment(prior, e), "(1/32 =", 1 / 32, ")")

""" The local Dirichlet parameters of the second DAG, vertex by vertex. """

local = extract_local_dirichlets(prior, "p2")
for v, alpha in local.alpha.items():
    print(v, "| parents", [w for w in local.closures[v] if w != v], "| alpha", alpha.ravel())

# %%
draws = sample(prior, "p2", seed=1, n_draws=5)
print("five draws, first four cells:\n", np.round(draws.reshape(5, -1)[:, :4], 4))
