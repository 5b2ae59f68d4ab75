"""Experiment protocol: repeated runs of every pruning method on paired
train/test splits, with per-generation and per-run CSV output.

Seeds: every random stream is a ``numpy.random.SeedSequence`` built from
``master_seed`` and a spawn key. The global split of run ``r`` uses
``(r, SPLIT_KEY, ROLE_SPLIT)`` and is therefore shared by all methods in
the run. The ensemble of method ``m`` in run ``r`` uses ``(r, m)`` and
extends it with ``(slot, role)`` per population, so methods see the same
data but evolve independently. No wall-clock or OS entropy is used, and
results do not depend on how many worker processes run the jobs.
"""

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, fields
import io
import os
from pathlib import Path
import tempfile

import numpy as np

from .dataset import SplitSpec, load_csv, split
from .ensemble import (EnsembleConfig, ROLE_SPLIT, Strategy, derive_seed,
                       ensemble_init, run_generation)
from .gp import GpParams
from .similarity import SimilarityConfig
from .stats import MethodResults, pvalue_matrix

__all__ = ['ConfigError', 'ExperimentConfig', 'METHOD_ORDER', 'PRESETS',
           'GENERATIONS_HEADER', 'SUMMARY_HEADER', 'MATRIX_HEADER',
           'parse_config', 'load_config', 'run_job', 'run_experiment',
           'read_summary', 'stats_command', 'read_records', 'summarize_size']

METHOD_ORDER = tuple(s.value for s in Strategy)
SPLIT_KEY = 2**32 - 1

GENERATIONS_HEADER = ['run', 'method', 'generation', 'alive', 'train_rmse',
                      'test_rmse']
SUMMARY_HEADER = ['run', 'method', 'final_test_rmse', 'final_alive',
                  'mean_alive']
MATRIX_HEADER = ['method_i', 'method_j', 'p_value', 'significant']

PRESETS = {
    'desk': {'generations': 100, 'population_size': 50, 'runs': 10},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = ''
    has_header: bool = False
    runs: int = 30
    generations: int = 1000
    population_size: int = 200
    train_fraction: float = 0.7
    stgp_count: int = 10
    gsgp_count: int = 10
    methods: tuple = METHOD_ORDER
    correlation_threshold: float = 0.5
    entropy_threshold: float = 0.5
    mutation_step: float = 0.1
    crossover_prob: float = 0.6
    mutation_prob: float = 0.3
    tournament_size: int = 4
    init_max_depth: int = 6
    random_removal_prob: float = 0.001
    prune_passes: int = 1
    master_seed: int = 0
    out: str = 'results'
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError('runs must be at least 1')
        if self.generations < 1:
            raise ConfigError('generations must be at least 1')
        if self.jobs < 1:
            raise ConfigError('jobs must be at least 1')
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError('master_seed must be an unsigned 64-bit integer')
        methods = tuple(self.methods)
        if not methods:
            raise ConfigError('no methods configured')
        for m in methods:
            if m not in METHOD_ORDER:
                raise ConfigError('unknown method %r; choose from %s'
                                  % (m, ', '.join(METHOD_ORDER)))
        object.__setattr__(self, 'methods', methods)
        try:
            self.ensemble_config()
            SplitSpec(self.train_fraction)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def ensemble_config(self):
        return EnsembleConfig(
            stgp_count=self.stgp_count,
            gsgp_count=self.gsgp_count,
            gp=GpParams(population_size=self.population_size,
                        crossover_prob=self.crossover_prob,
                        mutation_prob=self.mutation_prob,
                        tournament_size=self.tournament_size,
                        init_max_depth=self.init_max_depth),
            mutation_step=self.mutation_step,
            similarity=SimilarityConfig(self.correlation_threshold,
                                        self.entropy_threshold),
            random_removal_prob=self.random_removal_prob,
            prune_passes=self.prune_passes)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(key, text):
    if key not in _FIELDS:
        raise ConfigError('unknown configuration key %r' % key)
    default = _FIELDS[key].default
    text = text.strip()
    try:
        if key == 'methods':
            return tuple(m.strip() for m in text.split(',') if m.strip())
        if isinstance(default, bool):
            if text.lower() in ('1', 'true', 'yes', 'on'):
                return True
            if text.lower() in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError('bad value for %s: %r' % (key, text)) from None
    return text


def parse_config(text, base=None, **overrides):
    """Build a config from ``key = value`` lines (``#`` starts a comment).

    Relative ``dataset`` and ``out`` paths in the text are resolved against
    ``base``. Keyword overrides are applied last; a ``preset`` entry expands
    to its values before the other overrides.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError('line %d: expected key = value' % lineno)
        key, value = (s.strip() for s in line.split('=', 1))
        values[key] = _coerce(key, value)
    for key in ('dataset', 'out'):
        if values.get(key) and base is not None:
            path = Path(values[key])
            if not path.is_absolute():
                values[key] = str(Path(base) / path)
    preset = overrides.pop('preset', None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError('unknown preset %r' % preset)
        values.update(PRESETS[preset])
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise ConfigError('unknown configuration key %r' % key)
        values[key] = _coerce(key, value) if isinstance(value, str) else value
    return ExperimentConfig(**values)


def load_config(path, **overrides):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError('cannot read config %s: %s' % (path, exc)) from None
    return parse_config(text, base=path.parent, **overrides)


def _load(cfg):
    return load_csv(cfg.dataset, has_header=cfg.has_header)


def run_job(cfg, ds, run, method):
    """Evolve one ensemble; return its per-generation rows and summary row."""
    strategy = Strategy(method)
    split_rng = np.random.default_rng(
        derive_seed(cfg.master_seed, run, SPLIT_KEY, ROLE_SPLIT))
    train, test = split(ds, SplitSpec(cfg.train_fraction), split_rng)
    ens = ensemble_init(cfg.ensemble_config(), strategy, train, test,
                        derive_seed(cfg.master_seed, run, strategy.index))
    rows = []
    alive = []
    for _ in range(cfg.generations):
        rec = run_generation(ens)
        alive.append(rec.alive)
        rows.append([run, method, rec.generation, rec.alive,
                     repr(rec.train_rmse), repr(rec.test_rmse)])
    summary = [run, method, repr(rec.test_rmse), rec.alive,
               repr(float(np.mean(alive)))]
    return rows, summary


def _job(args):
    cfg, run, method = args
    return run_job(cfg, _load(cfg), run, method)


def _write_atomic(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix='.' + path.name)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(buf.getvalue())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(cfg):
    """Run every (run, method) pair and write ``generations.csv`` and
    ``summary.csv`` under ``cfg.out``. Returns the two paths."""
    ds = _load(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, r, m) for r in range(cfg.runs) for m in cfg.methods]
    if cfg.jobs == 1 or len(jobs) == 1:
        results = [run_job(cfg, ds, r, m) for _, r, m in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_job, jobs))
    gen_rows = [row for rows, _ in results for row in rows]
    summary_rows = [summary for _, summary in results]
    gen_path = out / 'generations.csv'
    summary_path = out / 'summary.csv'
    _write_atomic(gen_path, GENERATIONS_HEADER, gen_rows)
    _write_atomic(summary_path, SUMMARY_HEADER, summary_rows)
    return gen_path, summary_path


def _read_rows(path, header):
    with open(path, newline='', encoding='utf-8') as fh:
        reader = csv.DictReader(fh)
        missing = set(header) - set(reader.fieldnames or ())
        if missing:
            raise ValueError('%s lacks columns: %s'
                             % (path, ', '.join(sorted(missing))))
        return list(reader)


def read_summary(paths):
    """Final test RMSE per method, methods in canonical table order."""
    by_method = defaultdict(list)
    for path in paths:
        for row in _read_rows(path, SUMMARY_HEADER):
            by_method[row['method']].append(float(row['final_test_rmse']))
    order = [m for m in METHOD_ORDER if m in by_method]
    order += [m for m in by_method if m not in METHOD_ORDER]
    return [MethodResults(m, by_method[m]) for m in order]


def stats_command(summary_paths, out_path):
    """Write the all-pairs p-value CSV; returns the matrix."""
    matrix = pvalue_matrix(read_summary(summary_paths))
    rows = [[mi, mj, repr(p), int(sig)]
            for mi, mj, p, sig in matrix.entries()]
    _write_atomic(out_path, MATRIX_HEADER, rows)
    return matrix


def read_records(path):
    return _read_rows(path, GENERATIONS_HEADER)


def summarize_size(records):
    """Mean live-population count over all generations and runs, per
    method."""
    totals = defaultdict(lambda: [0, 0])
    for row in records:
        t = totals[row['method']]
        t[0] += int(row['alive'])
        t[1] += 1
    if not totals:
        raise ValueError('no run records')
    order = [m for m in METHOD_ORDER if m in totals]
    order += [m for m in totals if m not in METHOD_ORDER]
    return {m: totals[m][0] / totals[m][1] for m in order}
