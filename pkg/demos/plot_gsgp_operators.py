"""
Geometric semantic operators
============================

GSGP individuals are stored as semantics plus a lineage record, so
offspring cost one vector operation and never grow a tree.
"""

import numpy as np

from gpensemble import GsgpParams
from gpensemble import gsgp

rng = np.random.default_rng(1)
X = rng.uniform(-1, 1, size=(80, 2))
y = X[:, 0] ** 2 - X[:, 1]

space = gsgp.SemanticSpace(X, X, X[:20])
params = GsgpParams(population_size=30)
pop = gsgp.gsgp_init(params, space, y, rng)

a, b = pop[0], pop[1]
child = gsgp.geometric_crossover(a, b, space, y, rng)
lo = np.minimum(a.semantics.data, b.semantics.data)
hi = np.maximum(a.semantics.data, b.semantics.data)
print('crossover child inside parents:',
      bool(((child.semantics.data >= lo) & (child.semantics.data <= hi)).all()))

mutant = gsgp.geometric_mutation(a, 0.1, space, y, rng)
print('largest mutation step: %.4f' % np.abs(mutant.semantics.data - a.semantics.data).max())

# evolve, then rebuild an individual's test outputs from its lineage alone
for g in range(15):
    pop = gsgp.gsgp_generation(pop, params, space, y, rng)
best = min(pop, key=lambda ind: ind.fitness)
print('best local RMSE after 15 generations: %.4f' % best.fitness)
print('replay error:', np.abs(gsgp.replay(best.lineage, X[:20]) - best.semantics.on_test).max())
print('lineage nodes: %d, as an explicit tree: %d nodes' % (
    len(gsgp.lineage_nodes([best.lineage])), gsgp.expanded_size(best.lineage)))
