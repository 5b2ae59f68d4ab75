import copy
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpensemble import gp
from gpensemble.gp import ADD, DIV, MUL, SUB, GpParams, var


def test_evaluate_arithmetic():
    tree = (MUL, ADD, var(0), var(1), var(0))
    assert gp.evaluate(tree, np.array([[2.0, 3.0]]))[0] == 10


def test_protected_division_by_zero():
    out = gp.evaluate((DIV, var(0), var(1)), np.array([[5.0, 0.0], [6.0, 3.0]]))
    np.testing.assert_array_equal(out, [1.0, 2.0])


def test_leaf_identity_returns_copy():
    X = np.array([[7.0], [-1.0]])
    out = gp.evaluate((var(0),), X)
    np.testing.assert_array_equal(out, [7, -1])
    out[0] = 0
    assert X[0, 0] == 7


def test_to_string_and_depth():
    tree = (SUB, var(1), MUL, var(0), var(0))
    assert gp.to_string(tree) == '(x1 - (x0 * x0))'
    assert gp.depth(tree) == 3
    assert gp.depth((var(0),)) == 1


def rmse_oracle(p, t):
    diffs = [(a - b) ** 2 for a, b in zip(p, t)]
    return math.sqrt(math.fsum(diffs) / len(diffs))


def test_rmse_examples():
    assert gp.rmse([1, 2, 3], [1, 2, 3]) == 0
    assert gp.rmse([0, 0], [3, 4]) == pytest.approx(3.5355339, abs=1e-7)


def test_rmse_matches_oracle(rng):
    for _ in range(50):
        p, t = rng.normal(size=100), rng.normal(size=100)
        assert gp.rmse(p, t) == pytest.approx(rmse_oracle(p, t), rel=1e-12)


def test_rmse_non_finite_and_mismatch():
    assert gp.rmse([np.inf, 0], [0, 0]) == np.inf
    assert gp.rmse([np.nan], [0]) == np.inf
    with pytest.raises(ValueError):
        gp.rmse([1, 2], [1])


def paths(tree):
    """Lengths (in nodes) of every root-to-leaf path."""
    out = []

    def walk(i, d):
        if gp.is_function(tree[i]):
            j = walk(i + 1, d + 1)
            return walk(j, d + 1)
        out.append(d)
        return i + 1

    walk(0, 1)
    return out


def test_full_tree_paths(rng):
    for d in range(1, 7):
        tree = gp.full_tree(rng, d, 3)
        assert set(paths(tree)) == {d}


def test_grow_tree_depth_bound(rng):
    for _ in range(500):
        assert gp.depth(gp.grow_tree(rng, 6, 2)) <= 6


def test_ramped_half_and_half(rng):
    params = GpParams()
    trees = gp.ramped_half_and_half(params, 5, rng)
    assert len(trees) == 200
    depths = [gp.depth(t) for t in trees]
    assert all(1 <= d <= 6 for d in depths)
    # FULL trees sit at the cycled depths 2..6
    full = [t for i, t in enumerate(trees) if (i // 5) % 2 == 0]
    assert sorted({gp.depth(t) for t in full}) == [2, 3, 4, 5, 6]
    assert all(c < gp.N_FUNCTIONS + 5 for t in trees for c in t)


def test_ramped_half_and_half_deterministic():
    a = gp.ramped_half_and_half(GpParams(), 3, np.random.default_rng(1))
    b = gp.ramped_half_and_half(GpParams(), 3, np.random.default_rng(1))
    assert a == b


def test_tournament_forced_and_minimal(rng):
    assert gp.tournament_select([3.0], 4, rng) == 0
    # with k=2 on two individuals, both are drawn whenever they differ
    wins = [gp.tournament_select([1.0, 2.0], 2, rng) for _ in range(2000)]
    assert wins.count(0) / 2000 == pytest.approx(0.75, abs=0.03)


def test_tournament_ties_lowest_index(rng):
    fitness = [2.0, 1.0, 1.0, 1.0, 3.0]
    for _ in range(200):
        twin = copy.deepcopy(rng)
        drawn = twin.integers(0, 5, size=3)
        tied = [i for i in drawn if fitness[i] == min(fitness[j] for j in drawn)]
        assert gp.tournament_select(fitness, 3, rng) == min(tied)


def test_tournament_pressure(rng):
    fitness = np.arange(10, dtype=float)
    n = 20000
    wins = sum(gp.tournament_select(fitness, 10, rng) == 0 for _ in range(n))
    # P(best drawn at least once in 10 draws with replacement)
    expected = 1 - 0.9 ** 10
    assert wins / n == pytest.approx(expected, abs=0.015)
    assert wins / n > 3 / 10


def test_crossover_single_leaf_parent(rng):
    p2 = (ADD, MUL, var(0), var(1), var(2))
    subtrees = {p2[j:gp.subtree_end(p2, j)] for j in range(len(p2))}
    for _ in range(100):
        assert gp.subtree_crossover((var(3),), p2, rng) in subtrees


def test_crossover_immutable_and_node_subset(rng):
    p1 = gp.full_tree(rng, 4, 3)
    p2 = gp.grow_tree(rng, 5, 3)
    h1, h2 = hash(p1), hash(p2)
    allowed = set(p1) | set(p2)
    for _ in range(1000):
        child = gp.subtree_crossover(p1, p2, rng)
        assert set(child) <= allowed
    assert (hash(p1), hash(p2)) == (h1, h2)


def test_mutation(rng):
    leaf = (var(0),)
    changed = 0
    for _ in range(1000):
        child = gp.subtree_mutation(leaf, rng, 3)
        assert gp.depth(child) <= 6
        changed += child != leaf
    assert changed > 0
    assert leaf == (var(0),)


def test_mutation_inserted_depth(rng):
    p = gp.full_tree(rng, 3, 2)
    for _ in range(1000):
        child = gp.subtree_mutation(p, rng, 2)
        assert gp.depth(child) <= 3 + 6


def test_stgp_generation_elitism_and_size(small_data, rng):
    params = GpParams(population_size=30)
    pop = gp.stgp_init(params, 2, small_data, rng)
    best = min(ind.fitness for ind in pop)
    for _ in range(15):
        pop = gp.stgp_generation(pop, params, small_data, rng)
        assert len(pop) == 30
        now = min(ind.fitness for ind in pop)
        assert now <= best
        best = now


def test_stgp_generation_keeps_exact_elite(small_data, rng):
    params = GpParams(population_size=20)
    pop = gp.stgp_init(params, 2, small_data, rng)
    elite = pop[gp.best_index([i.fitness for i in pop])]
    new = gp.stgp_generation(pop, params, small_data, rng)
    assert new[0] is elite


def test_reproduction_only_converges(small_data, rng):
    params = GpParams(population_size=20, crossover_prob=0.0, mutation_prob=0.0)
    pop = gp.stgp_init(params, 2, small_data, rng)
    originals = {ind.tree for ind in pop}
    for _ in range(60):
        pop = gp.stgp_generation(pop, params, small_data, rng)
    trees = {ind.tree for ind in pop}
    assert trees <= originals
    assert len(trees) == 1


def test_individual_fitness_in_sync(small_data, rng):
    pop = gp.stgp_init(GpParams(population_size=20), 2, small_data, rng)
    for ind in pop:
        assert len(ind.semantics_local) == len(small_data)
        assert ind.fitness == gp.rmse(gp.evaluate(ind.tree, small_data.features),
                                      small_data.targets)


tree_strategy = st.integers(0, 2**32 - 1).map(
    lambda s: gp.grow_tree(np.random.default_rng(s), 6, 3))


@settings(max_examples=100, deadline=None)
@given(tree_strategy, st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_evaluate_total_and_transparent(tree, row):
    X = np.array([row, row[::-1]])
    a = gp.evaluate(tree, X)
    b = gp.evaluate(tree, X)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (2,)


@settings(max_examples=100, deadline=None)
@given(tree_strategy)
def test_rmse_zero_iff_exact(tree):
    X = np.random.default_rng(0).uniform(-3, 3, size=(20, 3))
    sem = gp.evaluate(tree, X)
    assert gp.rmse(sem, sem) == 0
    assert gp.rmse(sem, sem + 1e-3) > 0
