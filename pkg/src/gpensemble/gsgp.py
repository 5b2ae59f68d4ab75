"""Geometric semantic GP on a semantics-only representation.

An individual is never materialized as a tree. It carries its output
vectors on the local training, global training and test inputs (one
contiguous buffer, three views) plus a lineage record pointing at its
parents and at the small random trees the operator drew. Ancestor
semantics are dropped as soon as no living individual needs them, so
memory stays at one buffer per individual; the lineage DAG alone is
enough to recompute any individual on new inputs.
"""

from dataclasses import dataclass

import numpy as np

from . import gp
from .gp import GpParams, columns, evaluate_columns, rmse

__all__ = ['GsgpParams', 'SemanticSpace', 'SemanticsTriple', 'GsgpIndividual',
           'Origin', 'Crossover', 'Mutation', 'logistic', 'gsgp_init',
           'geometric_crossover', 'geometric_mutation', 'gsgp_generation',
           'replay', 'lineage_nodes', 'expanded_size', 'GsgpEngine']

# Squash input bound: keeps logistic outputs strictly inside (0, 1) in
# double precision, with ~1e-11 of slack at both ends.
_SQUASH_LIMIT = 25.0


@dataclass(frozen=True)
class GsgpParams(GpParams):
    mutation_step: float = 0.1

    def __post_init__(self):
        super().__post_init__()
        if not self.mutation_step > 0:
            raise ValueError('mutation_step must be positive')


def logistic(x):
    x = np.clip(x, -_SQUASH_LIMIT, _SQUASH_LIMIT)
    return 1.0 / (1.0 + np.exp(-x))


class SemanticSpace:
    """The three input sets an ensemble slot is evaluated on, stacked so a
    random tree is evaluated once for all of them."""

    def __init__(self, local_X, global_X, test_X):
        parts = [np.asarray(a, dtype=float) for a in (local_X, global_X, test_X)]
        widths = {p.shape[1] for p in parts}
        if len(widths) != 1:
            raise ValueError('input sets disagree on the number of variables')
        self.num_vars = widths.pop()
        self.sizes = tuple(p.shape[0] for p in parts)
        self.cols = columns(np.vstack(parts))

    def evaluate(self, tree):
        return SemanticsTriple(evaluate_columns(tree, self.cols), self.sizes)


class SemanticsTriple:
    """Outputs on local-train, global-train and test inputs."""

    __slots__ = ('data', 'sizes')

    def __init__(self, data, sizes):
        data.setflags(write=False)
        self.data = data
        self.sizes = sizes

    @property
    def on_local(self):
        return self.data[:self.sizes[0]]

    @property
    def on_global(self):
        a = self.sizes[0]
        return self.data[a:a + self.sizes[1]]

    @property
    def on_test(self):
        return self.data[self.sizes[0] + self.sizes[1]:]

    def view(self, which):
        return {'local': self.on_local, 'global': self.on_global,
                'test': self.on_test}[which]


@dataclass(frozen=True, eq=False)
class Origin:
    tree: tuple


@dataclass(frozen=True, eq=False)
class Crossover:
    parent_a: object
    parent_b: object
    mask: tuple


@dataclass(frozen=True, eq=False)
class Mutation:
    parent: object
    r1: tuple
    r2: tuple
    ms: float


@dataclass(frozen=True, eq=False)
class GsgpIndividual:
    semantics: SemanticsTriple
    fitness: float
    lineage: object


def _individual(data, sizes, local_targets, lineage):
    sem = SemanticsTriple(data, sizes)
    return GsgpIndividual(sem, rmse(sem.on_local, local_targets), lineage)


def gsgp_init(params, space, local_targets, rng):
    """Ramped half-and-half population; generation-0 trees survive only as
    lineage roots."""
    pop = []
    for tree in gp.ramped_half_and_half(params, space.num_vars, rng):
        data = evaluate_columns(tree, space.cols)
        pop.append(_individual(data, space.sizes, local_targets, Origin(tree)))
    return pop


def _crossover_values(a, b, r):
    # b + r (a - b) == r a + (1 - r) b, but stays inside [min, max]
    # under rounding and returns a exactly when a == b
    with np.errstate(all='ignore'):
        return b + r * (a - b)


def _mutation_values(a, l1, l2, ms):
    with np.errstate(all='ignore'):
        return a + ms * (l1 - l2)


def geometric_crossover(a, b, space, local_targets, rng, mask=None,
                        max_depth=6):
    """Child semantics ``r*s_a + (1-r)*s_b`` with ``r = logistic(R)`` for a
    fresh GROW tree ``R`` (or the given ``mask`` tree)."""
    if mask is None:
        mask = gp.grow_tree(rng, max_depth, space.num_vars)
    r = logistic(evaluate_columns(mask, space.cols))
    data = _crossover_values(a.semantics.data, b.semantics.data, r)
    return _individual(data, space.sizes, local_targets,
                       Crossover(a.lineage, b.lineage, mask))


def geometric_mutation(a, ms, space, local_targets, rng, r1=None, r2=None,
                       max_depth=6):
    """Child semantics ``s_a + ms*(logistic(R1) - logistic(R2))``; every
    component moves by strictly less than ``ms``."""
    if not ms > 0:
        raise ValueError('mutation step must be positive')
    if r1 is None:
        r1 = gp.grow_tree(rng, max_depth, space.num_vars)
    if r2 is None:
        r2 = gp.grow_tree(rng, max_depth, space.num_vars)
    l1 = logistic(evaluate_columns(r1, space.cols))
    l2 = logistic(evaluate_columns(r2, space.cols))
    data = _mutation_values(a.semantics.data, l1, l2, ms)
    return _individual(data, space.sizes, local_targets,
                       Mutation(a.lineage, r1, r2, ms))


def gsgp_generation(pop, params, space, local_targets, rng):
    """Same elitism, tournament and operator schedule as
    :func:`gp.stgp_generation`, with the geometric operators."""
    fitness = np.array([ind.fitness for ind in pop])
    k = params.tournament_size
    cx = params.crossover_prob
    cx_mut = cx + params.mutation_prob
    depth = params.init_max_depth
    new = [pop[gp.best_index(fitness)]]
    for _ in range(len(pop) - 1):
        u = rng.random()
        if u < cx:
            a = pop[gp.tournament_select(fitness, k, rng)]
            b = pop[gp.tournament_select(fitness, k, rng)]
            new.append(geometric_crossover(a, b, space, local_targets, rng,
                                           max_depth=depth))
        elif u < cx_mut:
            a = pop[gp.tournament_select(fitness, k, rng)]
            new.append(geometric_mutation(a, params.mutation_step, space,
                                          local_targets, rng,
                                          max_depth=depth))
        else:
            new.append(pop[gp.tournament_select(fitness, k, rng)])
    return new


def _parents(node):
    if isinstance(node, Crossover):
        return (node.parent_a, node.parent_b)
    if isinstance(node, Mutation):
        return (node.parent,)
    return ()


def replay(lineage, X):
    """Recompute an individual's outputs on ``X`` from its lineage.

    Iterative post-order walk with memoization, so shared ancestors are
    evaluated once and deep lineages do not hit the recursion limit.
    """
    cols = columns(X)
    done = {}
    stack = [lineage]
    while stack:
        node = stack[-1]
        if id(node) in done:
            stack.pop()
            continue
        todo = [p for p in _parents(node) if id(p) not in done]
        if todo:
            stack.extend(todo)
            continue
        stack.pop()
        if isinstance(node, Origin):
            val = evaluate_columns(node.tree, cols)
        elif isinstance(node, Crossover):
            r = logistic(evaluate_columns(node.mask, cols))
            val = _crossover_values(done[id(node.parent_a)][1],
                                    done[id(node.parent_b)][1], r)
        else:
            l1 = logistic(evaluate_columns(node.r1, cols))
            l2 = logistic(evaluate_columns(node.r2, cols))
            val = _mutation_values(done[id(node.parent)][1], l1, l2, node.ms)
        # keep the node alive so its id() cannot be recycled mid-walk
        done[id(node)] = (node, val)
    return done[id(lineage)][1]


def lineage_nodes(lineages):
    """Distinct lineage records reachable from ``lineages``."""
    seen = {}
    stack = list(lineages)
    while stack:
        node = stack.pop()
        if id(node) not in seen:
            seen[id(node)] = node
            stack.extend(_parents(node))
    return list(seen.values())


def expanded_size(lineage):
    """Node count of the tree a tree-based GSGP would have to build.

    Crossover yields ``R*T1 + (1-R)*T2`` and mutation ``T + ms*(R1 - R2)``,
    both wrapped in a logistic node per random tree.
    """
    sizes = {}
    for node in _topological(lineage):
        if isinstance(node, Origin):
            n = len(node.tree)
        elif isinstance(node, Crossover):
            # +, *, *, -, 1, and the logistic mask appearing twice
            m = len(node.mask) + 1
            n = sizes[id(node.parent_a)] + sizes[id(node.parent_b)] + 5 + 2 * m
        else:
            n = sizes[id(node.parent)] + 4 + len(node.r1) + len(node.r2) + 2
        sizes[id(node)] = n
    return sizes[id(lineage)]


def _topological(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        stack.extend((p, False) for p in _parents(node))
    # parents precede children
    return order


class GsgpEngine:
    """A single GSGP population bound to its local training set."""

    kind = 'gsgp'

    def __init__(self, params, local_train, global_train, test, rng):
        self.params = params
        self.local_train = local_train
        self.rng = rng
        self.space = SemanticSpace(local_train.features, global_train.features,
                                   test.features)
        self.population = gsgp_init(params, self.space, local_train.targets,
                                    rng)

    def step(self):
        self.population = gsgp_generation(self.population, self.params,
                                          self.space,
                                          self.local_train.targets, self.rng)

    def best(self):
        fitness = np.array([ind.fitness for ind in self.population])
        return self.population[gp.best_index(fitness)]

    @property
    def best_fitness(self):
        return self.best().fitness

    def best_semantics(self):
        sem = self.best().semantics
        return sem.on_global, sem.on_test
