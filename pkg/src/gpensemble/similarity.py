"""Pairwise similarity tests between the best individuals of two
populations.

Two families: Pearson correlation (similar when ``rho > threshold``) and a
normalized variation of information over histogram-discretized semantics
(similar when ``D < threshold``). Each has a probabilistic variant that,
once past the threshold, says "similar" only with probability ``rho`` or
``1 - D`` respectively.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = ['SimilarityConfig', 'SimilarityVerdict', 'pearson',
           'similar_correlation', 'similar_correlation_prob', 'n_bins',
           'discretize', 'entropy_terms', 'entropy_distance',
           'similar_entropy', 'similar_entropy_prob', 'SIMILARITY_TESTS']


@dataclass(frozen=True)
class SimilarityConfig:
    correlation_threshold: float = 0.5
    entropy_threshold: float = 0.5

    def __post_init__(self):
        for name in ('correlation_threshold', 'entropy_threshold'):
            t = getattr(self, name)
            if not 0.0 < t < 1.0:
                raise ValueError('%s must lie in (0, 1), got %r' % (name, t))


@dataclass(frozen=True)
class SimilarityVerdict:
    similar: bool
    score: float


def _pair(x, y, min_len):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError('expected two vectors of equal length, got %s and %s'
                         % (x.shape, y.shape))
    if x.size < min_len:
        raise ValueError('vectors must have length >= %d' % min_len)
    return x, y


def pearson(x, y):
    """Pearson correlation, extended to constant inputs.

    Two constant, elementwise equal vectors give 1. If only one is
    constant, or both are constant with different values, the result is 0.
    """
    x, y = _pair(x, y, 2)
    cx = x.min() == x.max()
    cy = y.min() == y.max()
    if cx or cy:
        return 1.0 if (cx and cy and x[0] == y[0]) else 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    with np.errstate(over='ignore', invalid='ignore'):
        denom = math.sqrt(np.dot(dx, dx)) * math.sqrt(np.dot(dy, dy))
        if denom == 0:
            # spread underflowed: numerically constant
            return 0.0
        r = float(np.dot(dx, dy) / denom)
    if math.isnan(r):
        return 0.0
    return max(-1.0, min(1.0, r))


def similar_correlation(si, sj, cfg, rng=None):
    rho = pearson(si, sj)
    return SimilarityVerdict(rho > cfg.correlation_threshold, rho)


def similar_correlation_prob(si, sj, cfg, rng):
    rho = pearson(si, sj)
    if rho <= cfg.correlation_threshold:
        return SimilarityVerdict(False, rho)
    return SimilarityVerdict(bool(rng.random() < rho), rho)


def n_bins(n):
    return max(1, math.isqrt(n))


def discretize(s):
    """Equal-width histogram labels with ``floor(sqrt(n))`` bins spanning
    ``[min(s), max(s)]``; the maximum lands in the last bin."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError('discretize needs a non-empty vector')
    if not np.isfinite(s).all():
        raise ValueError('cannot discretize non-finite values')
    B = n_bins(s.size)
    lo, hi = s.min(), s.max()
    if lo == hi:
        return np.zeros(s.size, dtype=np.intp)
    labels = np.floor((s - lo) * B / (hi - lo)).astype(np.intp)
    return np.minimum(labels, B - 1)


def _entropy_bits(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log2(p)))


def entropy_terms(si, sj):
    """Marginal entropies, joint entropy and mutual information in bits."""
    x, y = _pair(si, sj, 1)
    lx, ly = discretize(x), discretize(y)
    B = n_bins(x.size)
    n = x.size
    joint = np.bincount(lx * B + ly, minlength=B * B)
    hx = _entropy_bits(np.bincount(lx, minlength=B), n)
    hy = _entropy_bits(np.bincount(ly, minlength=B), n)
    hxy = _entropy_bits(joint, n)
    return hx, hy, hxy, hx + hy - hxy


def entropy_distance(si, sj):
    """Variation of information divided by the joint entropy, in [0, 1].

    0 when both vectors are constant (zero joint entropy).
    """
    _, _, hxy, mi = entropy_terms(si, sj)
    if hxy == 0:
        return 0.0
    return max(0.0, min(1.0, (hxy - mi) / hxy))


def similar_entropy(si, sj, cfg, rng=None):
    d = entropy_distance(si, sj)
    return SimilarityVerdict(d < cfg.entropy_threshold, d)


def similar_entropy_prob(si, sj, cfg, rng):
    d = entropy_distance(si, sj)
    if d >= cfg.entropy_threshold:
        return SimilarityVerdict(False, d)
    return SimilarityVerdict(bool(rng.random() < 1.0 - d), d)


# pruning strategy name -> similarity test
SIMILARITY_TESTS = {
    'correlation': similar_correlation,
    'prob-correlation': similar_correlation_prob,
    'entropy': similar_entropy,
    'prob-entropy': similar_entropy_prob,
}
