"""Ensembles of STGP and GSGP populations with pruning.

Every population (a *slot*) evolves on its own bootstrap of the global
training set. After each generation the slots' best individuals are
compared pairwise on the global training inputs; when two are judged
similar, the slot whose best has the higher global-train RMSE is removed
and its weight moves to the survivor. The ensemble prediction is
``sum(w_i * s_i) / n0`` over live slots, and because transfers conserve
``sum(w_i) == n0`` it is always a weighted mean.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .dataset import bootstrap
from .gp import GpParams, StgpEngine, rmse
from .gsgp import GsgpEngine, GsgpParams
from .similarity import SIMILARITY_TESTS, SimilarityConfig

__all__ = ['Strategy', 'EnsembleConfig', 'PopulationSlot', 'RemovalEvent',
           'RunRecord', 'Ensemble', 'derive_seed', 'ensemble_init',
           'best_of', 'prune', 'ensemble_semantics', 'run_generation',
           'ROLE_SPLIT', 'ROLE_BOOTSTRAP', 'ROLE_EVOLVE', 'ROLE_PRUNE']

ROLE_SPLIT, ROLE_BOOTSTRAP, ROLE_EVOLVE, ROLE_PRUNE = range(4)
_PRUNE_SLOT = 2**32 - 1


class Strategy(enum.Enum):
    STANDARD = 'standard'
    RANDOM = 'random'
    HALF = 'half'
    CORRELATION = 'correlation'
    PROB_CORRELATION = 'prob-correlation'
    ENTROPY = 'entropy'
    PROB_ENTROPY = 'prob-entropy'

    @property
    def index(self):
        return list(Strategy).index(self)

    @property
    def uses_similarity(self):
        return self.value in SIMILARITY_TESTS


@dataclass(frozen=True)
class EnsembleConfig:
    stgp_count: int = 10
    gsgp_count: int = 10
    gp: GpParams = field(default_factory=GpParams)
    mutation_step: float = 0.1
    similarity: SimilarityConfig = field(default_factory=SimilarityConfig)
    random_removal_prob: float = 0.001
    prune_passes: int = 1

    def __post_init__(self):
        if self.stgp_count < 0 or self.gsgp_count < 0:
            raise ValueError('population counts must be non-negative')
        if self.stgp_count + self.gsgp_count < 1:
            raise ValueError('an ensemble needs at least one population')
        if not 0.0 <= self.random_removal_prob <= 1.0:
            raise ValueError('random_removal_prob must lie in [0, 1]')
        if self.prune_passes < 1:
            raise ValueError('prune_passes must be at least 1')

    @property
    def gsgp(self):
        return GsgpParams(**vars(self.gp), mutation_step=self.mutation_step)


@dataclass(eq=False)
class PopulationSlot:
    index: int
    engine: object
    local_train: object
    weight: int = 1
    alive: bool = True

    @property
    def kind(self):
        return self.engine.kind


@dataclass(frozen=True)
class RemovalEvent:
    generation: int
    removed: int
    survivor: int
    score: float


@dataclass(frozen=True)
class RunRecord:
    generation: int
    alive: int
    train_rmse: float
    test_rmse: float


def derive_seed(master_seed, *key):
    """Independent stream for ``key`` (e.g. run, method, slot, role)."""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(key))


class Ensemble:

    def __init__(self, slots, strategy, config, global_train, test, prune_rng):
        self.slots = slots
        self.n0 = len(slots)
        self.strategy = Strategy(strategy)
        self.config = config
        self.global_train = global_train
        self.test = test
        self.prune_rng = prune_rng
        self.generation = 0
        self.events = []

    @property
    def alive(self):
        return [s for s in self.slots if s.alive]

    @property
    def total_weight(self):
        return sum(s.weight for s in self.slots if s.alive)

    def global_fitness(self, slot):
        g, _ = slot.engine.best_semantics()
        return rmse(g, self.global_train.targets)


def ensemble_init(config, strategy, global_train, test, seed):
    """Build the slots: ``stgp_count`` STGP then ``gsgp_count`` GSGP.

    ``seed`` is a ``SeedSequence``; slot ``i`` bootstraps and evolves from
    streams keyed ``(i, role)`` under it, and pruning gets its own stream.
    Under the half strategy only the first ``ceil(count / 2)`` slots of each
    kind are built.
    """
    strategy = Strategy(strategy)
    n_stgp, n_gsgp = config.stgp_count, config.gsgp_count
    if strategy is Strategy.HALF:
        n_stgp, n_gsgp = math.ceil(n_stgp / 2), math.ceil(n_gsgp / 2)
    kinds = [StgpEngine] * n_stgp + [GsgpEngine] * n_gsgp
    gsgp_params = config.gsgp

    def child(*key):
        return np.random.default_rng(
            np.random.SeedSequence(seed.entropy,
                                   spawn_key=seed.spawn_key + key))

    slots = []
    for i, engine_cls in enumerate(kinds):
        local = bootstrap(global_train, child(i, ROLE_BOOTSTRAP))
        params = config.gp if engine_cls is StgpEngine else gsgp_params
        engine = engine_cls(params, local, global_train, test,
                            child(i, ROLE_EVOLVE))
        slots.append(PopulationSlot(i, engine, local))
    return Ensemble(slots, strategy, config, global_train, test,
                    child(_PRUNE_SLOT, ROLE_PRUNE))


def best_of(slot):
    return slot.engine.best()


def _remove(ens, loser, survivor, score):
    survivor.weight += loser.weight
    loser.weight = 0
    loser.alive = False
    event = RemovalEvent(ens.generation, loser.index, survivor.index, score)
    ens.events.append(event)
    return event


def prune(ens, rng=None):
    """Apply the ensemble's pruning strategy; return removal events.

    Similarity strategies sweep the live pairs ``prune_passes`` times.
    """
    rng = ens.prune_rng if rng is None else rng
    strategy = ens.strategy
    if strategy in (Strategy.STANDARD, Strategy.HALF):
        return []
    if strategy is Strategy.RANDOM:
        return _prune_random(ens, rng)
    events = []
    # extra passes only matter for the probabilistic tests, which redraw
    for _ in range(ens.config.prune_passes):
        events += _prune_similar(ens, rng, SIMILARITY_TESTS[strategy.value])
    return events


def _prune_random(ens, rng):
    events = []
    p = ens.config.random_removal_prob
    for slot in ens.alive:
        if rng.random() >= p:
            continue
        others = [s for s in ens.slots if s.alive and s is not slot]
        if not others:
            continue
        survivor = others[int(rng.integers(len(others)))]
        events.append(_remove(ens, slot, survivor, p))
    return events


def _prune_similar(ens, rng, test):
    cfg = ens.config.similarity
    snapshot = ens.alive
    sem = {}
    fit = {}
    for s in snapshot:
        sem[s.index] = s.engine.best_semantics()[0]
        fit[s.index] = rmse(sem[s.index], ens.global_train.targets)
    events = []
    for a, si in enumerate(snapshot):
        for sj in snapshot[a + 1:]:
            if not si.alive:
                break
            if not sj.alive:
                continue
            x, y = sem[si.index], sem[sj.index]
            if not (np.isfinite(x).all() and np.isfinite(y).all()):
                continue
            verdict = test(x, y, cfg, rng)
            if not verdict.similar:
                continue
            if len(ens.alive) <= 1:
                return events
            # ties keep the lower index
            if fit[sj.index] < fit[si.index]:
                loser, survivor = si, sj
            else:
                loser, survivor = sj, si
            events.append(_remove(ens, loser, survivor, verdict.score))
    return events


def ensemble_semantics(ens, which='test'):
    """``(1/n0) * sum(w_i * s(best_i))`` over live slots, on the global
    training inputs (``which='global_train'``) or the test inputs."""
    pick = {'global_train': 0, 'global': 0, 'train': 0, 'test': 1}[which]
    total = None
    with np.errstate(all='ignore'):
        for s in ens.alive:
            term = s.weight * s.engine.best_semantics()[pick]
            total = term if total is None else total + term
        return total / ens.n0


def run_generation(ens, rng=None):
    """Step every live slot, prune once, and log the ensemble's errors."""
    ens.generation += 1
    for s in ens.alive:
        s.engine.step()
    prune(ens, rng)
    return RunRecord(
        ens.generation, len(ens.alive),
        rmse(ensemble_semantics(ens, 'global_train'), ens.global_train.targets),
        rmse(ensemble_semantics(ens, 'test'), ens.test.targets))
