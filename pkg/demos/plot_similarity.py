"""
Comparing two semantics vectors
===============================

Correlation and histogram entropy disagree on non-linear relations.
"""

import numpy as np

from gpensemble import SimilarityConfig, entropy_distance, pearson
from gpensemble.similarity import discretize, similar_correlation, similar_entropy

x = np.linspace(-1, 1, 100)

# a linear copy, a parabola and independent noise
candidates = {
    'linear': 3 * x + 1,
    'parabola': x ** 2,
    'noise': np.random.default_rng(0).normal(size=x.size),
}

cfg = SimilarityConfig()
for name, y in candidates.items():
    print('%-9s rho=%6.3f  D=%5.3f  similar: corr=%s entropy=%s' % (
        name, pearson(x, y), entropy_distance(x, y),
        similar_correlation(x, y, cfg).similar,
        similar_entropy(x, y, cfg).similar))

# sqrt(n) equal-width bins; the maximum lands in the last one
print(discretize(x)[:12], '...', discretize(x)[-3:])
