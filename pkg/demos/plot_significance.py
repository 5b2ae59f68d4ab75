"""
Pairwise significance table
===========================

One-tailed Mann-Whitney tests between every pair of methods. Entry (i, j)
is the p-value for "method i has lower error than method j".
"""

import numpy as np

from gpensemble import pvalue_matrix
from gpensemble.stats import MethodResults

rng = np.random.default_rng(3)
results = [
    MethodResults('standard', rng.gamma(5.0, 1.0, 30)),
    MethodResults('correlation', rng.gamma(5.0, 1.0, 30)),
    MethodResults('entropy', rng.gamma(5.0, 0.7, 30)),
]

matrix = pvalue_matrix(results)
print(matrix.format())
