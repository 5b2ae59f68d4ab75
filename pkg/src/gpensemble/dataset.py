"""Benchmark data: CSV loading, the global train/test split and bootstrap
local training sets."""

from dataclasses import dataclass
from importlib import resources
import math

import numpy as np

__all__ = ['Dataset', 'SplitSpec', 'DatasetError', 'ParseError',
           'EmptyDatasetError', 'SplitError', 'load_csv', 'split',
           'bootstrap', 'load_benchmark', 'BENCHMARKS']

# name -> (features, instances) of the five benchmark problems
BENCHMARKS = {
    'airfoil': (5, 1502),
    'concrete': (8, 1029),
    'ppb': (626, 131),
    'slump': (9, 102),
    'yacht': (6, 307),
}


class DatasetError(ValueError):
    """Base class for data loading and partitioning errors."""


class ParseError(DatasetError):
    pass


class EmptyDatasetError(DatasetError):
    pass


class SplitError(DatasetError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix (rows are instances) and target vector.

    Arrays are copied to float64 and made read-only so a dataset can be
    shared between populations without defensive copies.
    """

    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.targets, dtype=float)
        if X.ndim != 2 or X.shape[1] < 1:
            raise DatasetError('features must be a 2-d array with at least '
                               'one column, got shape %s' % (X.shape,))
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DatasetError('targets length %d does not match %d rows'
                               % (y.size, X.shape[0]))
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DatasetError('dataset contains non-finite values')
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, 'features', X)
        object.__setattr__(self, 'targets', y)

    def __len__(self):
        return self.targets.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def take(self, rows):
        """Return the dataset restricted to ``rows`` (repeats allowed)."""
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.targets[rows])


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise SplitError('train_fraction must lie strictly between 0 '
                             'and 1, got %r' % self.train_fraction)


def _parse_lines(lines, has_header, source):
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        if has_header and lineno == 1:
            continue
        line = line.strip()
        if not line:
            continue
        fields = line.split(',')
        if width is None:
            width = len(fields)
            if width < 2:
                raise ParseError('%s line %d: need at least one feature and '
                                 'a target column' % (source, lineno))
        elif len(fields) != width:
            raise ParseError('%s line %d: expected %d fields, found %d'
                             % (source, lineno, width, len(fields)))
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            col = next(c for c, f in enumerate(fields, start=1)
                       if not _is_float(f))
            raise ParseError('%s line %d, column %d: non-numeric field %r'
                             % (source, lineno, col, fields[col - 1])) from None
    if not rows:
        raise EmptyDatasetError('%s contains no data rows' % source)
    data = np.array(rows, dtype=float)
    if not np.isfinite(data).all():
        r, c = np.argwhere(~np.isfinite(data))[0]
        raise ParseError('%s: non-finite value at data row %d, column %d'
                         % (source, r + 1, c + 1))
    return Dataset(data[:, :-1], data[:, -1])


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_csv(path, has_header=False):
    """Load a comma-separated file whose last column is the target."""
    with open(path, encoding='utf-8') as fh:
        return _parse_lines(fh, has_header, str(path))


def load_benchmark(name):
    """Load one of the bundled benchmark fixtures by name.

    The fixtures are synthetic stand-ins with the same shape (features and
    instances) as the public benchmarks; see ``README.md``.
    """
    if name not in BENCHMARKS:
        raise KeyError('unknown benchmark %r; choose from %s'
                       % (name, ', '.join(BENCHMARKS)))
    ref = resources.files('gpensemble') / 'data' / ('%s.csv' % name)
    with ref.open('r', encoding='utf-8') as fh:
        return _parse_lines(fh, True, name + '.csv')


def split(ds, spec, rng=None):
    """Shuffle the rows and cut them into a train and a test set.

    The train set receives ``round(train_fraction * len(ds))`` rows, with
    halves rounded up. ``rng`` defaults to a generator seeded from
    ``spec.seed``.
    """
    n = len(ds)
    if n == 0:
        raise SplitError('cannot split an empty dataset')
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    n_train = int(math.floor(spec.train_fraction * n + 0.5))
    if n_train < 1 or n_train > n - 1:
        raise SplitError('a %.3g split of %d rows leaves an empty side'
                         % (spec.train_fraction, n))
    perm = rng.permutation(n)
    return ds.take(perm[:n_train]), ds.take(perm[n_train:])


def bootstrap(train, rng):
    """Resample ``train`` uniformly with replacement, keeping its size."""
    n = len(train)
    if n == 0:
        raise DatasetError('cannot bootstrap an empty dataset')
    return train.take(rng.integers(0, n, size=n))
