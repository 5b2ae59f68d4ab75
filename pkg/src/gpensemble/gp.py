"""Standard syntax-based GP (STGP).

Programs are stored as flat prefix tuples of integer opcodes, in the style
of gplearn: codes ``0..3`` are the binary functions ``+ - * /`` and a code
``c >= 4`` is the input variable ``x[c - 4]``. A tuple is immutable and
hashable, so parents can never be modified by the variation operators.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ['ADD', 'SUB', 'MUL', 'DIV', 'N_FUNCTIONS', 'GpParams',
           'StgpIndividual', 'var', 'is_function', 'subtree_end', 'depth',
           'to_string', 'columns', 'evaluate', 'evaluate_columns', 'rmse',
           'full_tree', 'grow_tree', 'ramped_half_and_half',
           'tournament_select', 'subtree_crossover', 'subtree_mutation',
           'make_individual', 'best_index', 'stgp_init', 'stgp_generation',
           'StgpEngine']

ADD, SUB, MUL, DIV = 0, 1, 2, 3
N_FUNCTIONS = 4
_SYMBOLS = ('+', '-', '*', '/')

# leaf probability at interior levels of GROW
P_LEAF = 0.3


@dataclass(frozen=True)
class GpParams:
    population_size: int = 200
    crossover_prob: float = 0.6
    mutation_prob: float = 0.3
    tournament_size: int = 4
    init_max_depth: int = 6

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError('population_size must be positive')
        if self.tournament_size < 1:
            raise ValueError('tournament_size must be positive')
        if self.init_max_depth < 2:
            raise ValueError('init_max_depth must be at least 2')
        for name in ('crossover_prob', 'mutation_prob'):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError('%s must lie in [0, 1], got %r' % (name, p))
        if self.crossover_prob + self.mutation_prob > 1.0:
            raise ValueError('crossover_prob + mutation_prob exceeds 1')


def var(index):
    """Opcode of the input variable ``x[index]``."""
    return N_FUNCTIONS + index


def is_function(code):
    return code < N_FUNCTIONS


def subtree_end(tree, start):
    """Index one past the subtree rooted at ``tree[start]``."""
    need = 1
    i = start
    while need:
        need += 1 if tree[i] < N_FUNCTIONS else -1
        i += 1
    return i


def depth(tree):
    """Number of nodes on the longest root-to-leaf path (a leaf has 1)."""
    best = 0
    stack = []
    for code in reversed(tree):
        if code < N_FUNCTIONS:
            d = 1 + max(stack.pop(), stack.pop())
        else:
            d = 1
        stack.append(d)
        best = max(best, d)
    return best


def to_string(tree):
    out = []
    for code in reversed(tree):
        if code < N_FUNCTIONS:
            a, b = out.pop(), out.pop()
            out.append('(%s %s %s)' % (a, _SYMBOLS[code], b))
        else:
            out.append('x%d' % (code - N_FUNCTIONS))
    return out[0]


def columns(X):
    """Contiguous per-variable columns of ``X``, the fast input layout for
    :func:`evaluate_columns`."""
    return np.ascontiguousarray(np.asarray(X, dtype=float).T)


def evaluate_columns(tree, cols):
    """Evaluate ``tree`` on inputs given column-wise (see :func:`columns`)."""
    stack = []
    push = stack.append
    pop = stack.pop
    with np.errstate(all='ignore'):
        for code in reversed(tree):
            if code >= N_FUNCTIONS:
                push(cols[code - N_FUNCTIONS])
                continue
            a = pop()
            b = pop()
            if code == ADD:
                push(a + b)
            elif code == SUB:
                push(a - b)
            elif code == MUL:
                push(a * b)
            else:
                out = np.ones(np.broadcast(a, b).shape)
                np.divide(a, b, out=out, where=b != 0)
                push(out)
    result = stack[0]
    if len(tree) == 1:
        result = result.copy()
    return result


def evaluate(tree, X):
    """Outputs of ``tree`` on every row of the feature matrix ``X``.

    Division by an exact zero yields 1.0; overflow propagates as inf.
    """
    return evaluate_columns(tree, columns(X))


def rmse(predicted, targets):
    predicted = np.asarray(predicted, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predicted.shape != targets.shape or predicted.size == 0:
        raise ValueError('rmse needs two non-empty vectors of equal length, '
                         'got %s and %s' % (predicted.shape, targets.shape))
    if not (np.isfinite(predicted).all() and np.isfinite(targets).all()):
        return np.inf
    with np.errstate(over='ignore'):
        return float(np.sqrt(np.mean((predicted - targets) ** 2)))


def full_tree(rng, max_depth, num_vars):
    """A tree in which every root-to-leaf path has ``max_depth`` nodes."""
    return tuple(_build(rng, max_depth, num_vars, full=True))


def grow_tree(rng, max_depth, num_vars, p_leaf=P_LEAF):
    """A tree of depth at most ``max_depth``; below the depth limit each
    node becomes a leaf with probability ``p_leaf``."""
    return tuple(_build(rng, max_depth, num_vars, full=False, p_leaf=p_leaf))


def _build(rng, max_depth, num_vars, full, p_leaf=P_LEAF):
    out = []
    # pending entries are remaining depth budgets, root first
    pending = [max_depth]
    while pending:
        budget = pending.pop()
        leaf = budget <= 1 or (not full and rng.random() < p_leaf)
        if leaf:
            out.append(var(int(rng.integers(num_vars))))
        else:
            out.append(int(rng.integers(N_FUNCTIONS)))
            pending.append(budget - 1)
            pending.append(budget - 1)
    return out


def ramped_half_and_half(params, num_vars, rng):
    """Initial trees: depths cycle over ``2..init_max_depth``, alternating
    FULL and GROW blocks so each depth gets both methods evenly."""
    if num_vars < 1:
        raise ValueError('num_vars must be at least 1')
    depths = range(2, params.init_max_depth + 1)
    trees = []
    for i in range(params.population_size):
        d = depths[i % len(depths)]
        if (i // len(depths)) % 2 == 0:
            trees.append(full_tree(rng, d, num_vars))
        else:
            trees.append(grow_tree(rng, d, num_vars))
    return trees


@dataclass(frozen=True, eq=False)
class StgpIndividual:
    tree: tuple
    semantics_local: np.ndarray
    fitness: float


def make_individual(tree, cols, targets):
    sem = evaluate_columns(tree, cols)
    sem.setflags(write=False)
    return StgpIndividual(tree, sem, rmse(sem, targets))


def best_index(fitness):
    """Index of the minimal fitness; ties go to the lowest index."""
    return int(np.argmin(fitness))


def tournament_select(fitness, k, rng):
    """Index of the winner of a size-``k`` tournament drawn with
    replacement. Among tied contestants the lowest index wins."""
    fitness = np.asarray(fitness)
    contenders = rng.integers(0, fitness.shape[0], size=k)
    f = fitness[contenders]
    return int(contenders[f == f.min()].min())


def subtree_crossover(p1, p2, rng):
    """Replace a random subtree of ``p1`` with a random subtree of ``p2``."""
    i = int(rng.integers(len(p1)))
    j = int(rng.integers(len(p2)))
    return p1[:i] + p2[j:subtree_end(p2, j)] + p1[subtree_end(p1, i):]


def subtree_mutation(p, rng, num_vars, max_depth=6):
    """Replace a random subtree of ``p`` with a fresh GROW tree."""
    i = int(rng.integers(len(p)))
    return p[:i] + grow_tree(rng, max_depth, num_vars) + p[subtree_end(p, i):]


def stgp_init(params, num_vars, local_train, rng):
    cols = columns(local_train.features)
    return [make_individual(t, cols, local_train.targets)
            for t in ramped_half_and_half(params, num_vars, rng)]


def stgp_generation(pop, params, local_train, rng, cols=None):
    """One generational step with elitism in slot 0.

    Each remaining offspring draws ``u ~ U[0, 1)``: crossover below
    ``crossover_prob``, mutation below ``crossover_prob + mutation_prob``,
    otherwise reproduction of a tournament winner.
    """
    if cols is None:
        cols = columns(local_train.features)
    num_vars = cols.shape[0]
    y = local_train.targets
    fitness = np.array([ind.fitness for ind in pop])
    k = params.tournament_size
    cx = params.crossover_prob
    cx_mut = cx + params.mutation_prob
    new = [pop[best_index(fitness)]]
    for _ in range(len(pop) - 1):
        u = rng.random()
        if u < cx:
            a = pop[tournament_select(fitness, k, rng)].tree
            b = pop[tournament_select(fitness, k, rng)].tree
            new.append(make_individual(subtree_crossover(a, b, rng), cols, y))
        elif u < cx_mut:
            a = pop[tournament_select(fitness, k, rng)].tree
            child = subtree_mutation(a, rng, num_vars, params.init_max_depth)
            new.append(make_individual(child, cols, y))
        else:
            new.append(pop[tournament_select(fitness, k, rng)])
    return new


class StgpEngine:
    """A single STGP population bound to its local training set.

    The best individual's outputs on the global training and test inputs
    are computed lazily and cached per individual.
    """

    kind = 'stgp'

    def __init__(self, params, local_train, global_train, test, rng):
        self.params = params
        self.local_train = local_train
        self.rng = rng
        self._cols = columns(local_train.features)
        self._global_cols = columns(global_train.features)
        self._test_cols = columns(test.features)
        self.population = [
            make_individual(t, self._cols, local_train.targets)
            for t in ramped_half_and_half(params, local_train.n_features, rng)]
        self._cache = (None, None, None)

    def step(self):
        self.population = stgp_generation(self.population, self.params,
                                          self.local_train, self.rng,
                                          self._cols)

    def best(self):
        fitness = np.array([ind.fitness for ind in self.population])
        return self.population[best_index(fitness)]

    @property
    def best_fitness(self):
        return self.best().fitness

    def best_semantics(self):
        """(global-train outputs, test outputs) of the current best."""
        ind = self.best()
        if self._cache[0] is not ind:
            g = evaluate_columns(ind.tree, self._global_cols)
            t = evaluate_columns(ind.tree, self._test_cols)
            self._cache = (ind, g, t)
        return self._cache[1], self._cache[2]
