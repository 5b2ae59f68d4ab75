"""Ensembles of syntax-based and geometric semantic GP populations, pruned
by correlation- or entropy-based similarity of their best individuals."""

from .dataset import Dataset, SplitSpec, bootstrap, load_benchmark, load_csv, split
from .ensemble import (Ensemble, EnsembleConfig, Strategy, ensemble_init,
                       ensemble_semantics, prune, run_generation)
from .experiment import ExperimentConfig, load_config, run_experiment
from .gp import GpParams
from .gsgp import GsgpParams
from .similarity import SimilarityConfig, entropy_distance, pearson
from .stats import mann_whitney_u, pvalue_matrix

__version__ = '0.1.0'
