"""One-tailed Mann-Whitney U tests and all-pairs p-value matrices."""

from collections import namedtuple
from dataclasses import dataclass
import math

import numpy as np

__all__ = ['MannWhitneyResult', 'MethodResults', 'PValueMatrix', 'midranks',
           'mann_whitney_u', 'pvalue_matrix', 'ALPHA']

ALPHA = 0.05
_P_MIN = 1e-300
_P_MAX = 1.0 - 1e-16

MannWhitneyResult = namedtuple('MannWhitneyResult', ['u', 'p'])


@dataclass(frozen=True)
class MethodResults:
    method: str
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError('method %r has no results' % self.method)
        if not all(math.isfinite(v) and v >= 0 for v in vals):
            raise ValueError('method %r has non-finite or negative results'
                             % self.method)
        object.__setattr__(self, 'values', vals)


def midranks(values):
    """1-based ranks with ties sharing the mean of their positions."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind='mergesort')
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    n = values.size
    while i < n:
        j = i + 1
        while j < n and sorted_vals[j] == sorted_vals[i]:
            j += 1
        ranks[order[i:j]] = 0.5 * (i + j + 1)
        i = j
    return ranks


def _norm_cdf(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def mann_whitney_u(a, b):
    """Test whether ``a`` is stochastically smaller than ``b``.

    Returns U for ``a`` and the lower-tail p-value from the normal
    approximation, with tie-corrected variance and a 0.5 continuity
    correction.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise ValueError('both samples must be non-empty')
    ranks = midranks(np.concatenate([a, b]))
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    n = n1 + n2
    _, counts = np.unique(ranks, return_counts=True)
    ties = float(np.sum(counts ** 3 - counts))
    var = n1 * n2 / 12.0 * ((n + 1) - ties / (n * (n - 1))) if n > 1 else 0.0
    mean = n1 * n2 / 2.0
    if var <= 0:
        # every observation tied: no evidence either way
        p = 1.0
    else:
        p = _norm_cdf((u + 0.5 - mean) / math.sqrt(var))
    return MannWhitneyResult(u, min(_P_MAX, max(_P_MIN, p)))


@dataclass(frozen=True)
class PValueMatrix:
    """Entry ``p[i, j]`` tests "method i yields lower values than j"."""

    methods: tuple
    p: np.ndarray
    alpha: float = ALPHA

    def significant(self, i, j):
        return bool(self.p[i, j] < self.alpha)

    def entries(self):
        """(method_i, method_j, p, significant) for every ordered pair."""
        k = len(self.methods)
        return [(self.methods[i], self.methods[j], float(self.p[i, j]),
                 self.significant(i, j))
                for i in range(k) for j in range(k) if i != j]

    def format(self, decimals=3):
        """Plain-text table, significant entries marked with ``*``."""
        width = max(len(m) for m in self.methods) + 2
        cell = decimals + 5
        lines = [' ' * width + ''.join(m[:cell - 1].rjust(cell)
                                       for m in self.methods)]
        for i, mi in enumerate(self.methods):
            row = [mi.ljust(width)]
            for j in range(len(self.methods)):
                if i == j:
                    row.append(' ' * cell)
                else:
                    mark = '*' if self.significant(i, j) else ' '
                    row.append(('%.*f%s' % (decimals, self.p[i, j], mark))
                               .rjust(cell))
            lines.append(''.join(row))
        return '\n'.join(lines)


def pvalue_matrix(results, alpha=ALPHA):
    results = list(results)
    if len(results) < 2:
        raise ValueError('need at least two methods')
    runs = {len(r.values) for r in results}
    if len(runs) != 1:
        raise ValueError('methods have different run counts: %s'
                         % sorted(runs))
    k = len(results)
    p = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(k):
            if i != j:
                p[i, j] = mann_whitney_u(results[i].values,
                                         results[j].values).p
    p.setflags(write=False)
    return PValueMatrix(tuple(r.method for r in results), p, alpha)
