"""
Pruning an ensemble
===================

Ten populations (five STGP, five GSGP) on the slump fixture. Similar
populations are merged after every generation and the survivor inherits
the removed population's vote.
"""

import numpy as np

from gpensemble import (EnsembleConfig, GpParams, SplitSpec, ensemble_init,
                        load_benchmark, run_generation, split)

data = load_benchmark('slump')
train, test = split(data, SplitSpec(0.7), np.random.default_rng(0))
cfg = EnsembleConfig(stgp_count=5, gsgp_count=5, gp=GpParams(population_size=30))

for strategy in ('standard', 'correlation', 'entropy'):
    ens = ensemble_init(cfg, strategy, train, test, np.random.SeedSequence(42))
    for _ in range(20):
        rec = run_generation(ens)
    weights = {s.index: s.weight for s in ens.alive}
    print('%-12s alive=%2d  test RMSE=%.3f  weights=%s'
          % (strategy, rec.alive, rec.test_rmse, weights))
