"""# Scoring skeletons by marginal likelihood

Data come from a Markov chain on four binary variables.  We compare a
uniform prior on the true path 1-2-3-4 against one on the star centred at
1, which misses the 2-3 and 3-4 dependencies."""

import numpy as np

from pdirichlet import catalog
from pdirichlet.family import DagFamily
from pdirichlet.graph import UndirectedGraph
from pdirichlet.inference import ContingencyTable, posterior_update, score_configurations
from pdirichlet.prior import uniform_template

rng = np.random.default_rng(3)
n = 1000
x = np.zeros((n, 4), dtype=int)
x[:, 0] = rng.random(n) < 0.5
for j in range(1, 4):
    flip = rng.random(n) < 0.15
    x[:, j] = x[:, j - 1] ^ flip

# %%
chain = catalog.chain_family(4)
star_graph = UndirectedGraph({v: 2 for v in range(1, 5)}, [(1, 2), (1, 3), (1, 4)])
# rooted at leaf 2; rooting it at the hub would make {1} an interior set
# shared by three cliques, which is rejected
star = DagFamily.build(star_graph, [("from2", {2: [], 1: [2], 3: [1], 4: [1]})])

configs = []
for label, fam in [("chain", chain), ("star", star)]:
    data = ContingencyTable.from_cells(fam.graph, [(row, 1) for row in x])
    configs.append((fam, uniform_template(fam, 1.0), data, label))

for s in score_configurations(configs):
    print(f"{s.label:>6}: log evidence {s.log_evidence:10.2f}   dimension {s.dimension}")

# %%
report = posterior_update(configs[0][1], configs[0][2])
print("posterior predictive for 0000 and 0101:",
      report.predictive[0, 0, 0, 0].round(4), report.predictive[0, 1, 0, 1].round(4))
