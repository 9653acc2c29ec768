"""# When the family forces a hyper-Dirichlet

A path directed forward and backward is a separating family: every
separator is reached from both neighbouring cliques.  Any valid prior is then
a hyper-Dirichlet, and its moments are ratios of the hyper-Dirichlet
normalizer."""

import numpy as np

from pdirichlet import catalog
from pdirichlet.family import analyse, is_hyper_dirichlet_sufficient, is_separating
from pdirichlet.hyper import HyperDirichlet, hyper_dirichlet_normalizer
from pdirichlet.prior import equals_hyper_dirichlet, log_moment
from pdirichlet.verification import random_prior

rng = np.random.default_rng(0)
fam = catalog.chain_family(4)
print("separating:", is_separating(fam).separating)
print("sufficient:", is_hyper_dirichlet_sufficient(fam, analyse(fam)[0]).sufficient)

# %%
prior = random_prior(fam, rng)
hd = HyperDirichlet.from_prior(prior)
print("equals hyper-Dirichlet:", equals_hyper_dirichlet(prior))
for _ in range(3):
    r = rng.integers(0, 3, size=fam.graph.shape())
    ratio = hyper_dirichlet_normalizer(hd.shifted(r)) - hyper_dirichlet_normalizer(hd)
    print(f"log moment {log_moment(prior, r): .12f}   normalizer ratio {ratio: .12f}")

""" The three-triangle family is not separating: vertex 1 lies in a single
clique and neither DAG gives it a separator as parent set. """

print(is_separating(catalog.triangles_family("I")))
