import gc
import weakref

import numpy as np
import pytest

from gpensemble import gp, gsgp
from gpensemble.dataset import Dataset, bootstrap
from gpensemble.gp import ADD, MUL, var
from gpensemble.gsgp import GsgpParams, SemanticSpace


@pytest.fixture
def setup(small_data, rng):
    local = bootstrap(small_data, rng)
    test = Dataset(rng.uniform(-2, 2, size=(25, 2)), np.zeros(25))
    space = SemanticSpace(local.features, small_data.features, test.features)
    return local, small_data, test, space


def test_init_shapes_and_fitness(setup, rng):
    local, train, test, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=20), space, local.targets, rng)
    assert len(pop) == 20
    for ind in pop:
        sem = ind.semantics
        assert sem.on_local.shape == (len(local),)
        assert sem.on_global.shape == (len(train),)
        assert sem.on_test.shape == (len(test),)
        assert ind.fitness == gp.rmse(sem.on_local, local.targets)
        assert isinstance(ind.lineage, gsgp.Origin)
        np.testing.assert_array_equal(
            sem.on_global, gp.evaluate(ind.lineage.tree, train.features))


def test_init_deterministic(setup):
    local, _, _, space = setup
    params = GsgpParams(population_size=10)
    a = gsgp.gsgp_init(params, space, local.targets, np.random.default_rng(4))
    b = gsgp.gsgp_init(params, space, local.targets, np.random.default_rng(4))
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.semantics.data, y.semantics.data)


def test_logistic_open_interval():
    x = np.array([-1e300, -40.0, 0.0, 40.0, 1e300, np.inf, -np.inf])
    out = gsgp.logistic(x)
    assert (out > 0).all() and (out < 1).all()
    assert out[2] == 0.5


def test_crossover_equal_parents_fixed_point(setup, rng):
    local, _, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=5), space, local.targets, rng)
    child = gsgp.geometric_crossover(pop[0], pop[0], space, local.targets, rng)
    np.testing.assert_array_equal(child.semantics.data, pop[0].semantics.data)


def test_crossover_convexity(setup, rng):
    local, _, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=30), space, local.targets, rng)
    for _ in range(300):
        a, b = pop[rng.integers(30)], pop[rng.integers(30)]
        c = gsgp.geometric_crossover(a, b, space, local.targets, rng)
        lo = np.minimum(a.semantics.data, b.semantics.data)
        hi = np.maximum(a.semantics.data, b.semantics.data)
        assert ((c.semantics.data >= lo) & (c.semantics.data <= hi)).all()


def test_crossover_mask_replay(setup, rng):
    local, train, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=5), space, local.targets, rng)
    mask = (MUL, var(0), ADD, var(1), var(0))
    c = gsgp.geometric_crossover(pop[1], pop[2], space, local.targets, rng,
                                 mask=mask)
    r = gsgp.logistic(gp.evaluate(mask, train.features))
    expected = r * pop[1].semantics.on_global + (1 - r) * pop[2].semantics.on_global
    np.testing.assert_allclose(c.semantics.on_global, expected, rtol=0, atol=1e-12)


def test_mutation_cancels_with_equal_trees(setup, rng):
    local, _, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=5), space, local.targets, rng)
    t = gp.grow_tree(rng, 6, 2)
    child = gsgp.geometric_mutation(pop[0], 0.1, space, local.targets, rng,
                                    r1=t, r2=t)
    np.testing.assert_array_equal(child.semantics.data, pop[0].semantics.data)


def test_mutation_bounded(setup, rng):
    local, _, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=30), space, local.targets, rng)
    tame = [p for p in pop if np.abs(p.semantics.data).max() < 1e3]
    for _ in range(1000):
        a = tame[rng.integers(len(tame))]
        c = gsgp.geometric_mutation(a, 0.1, space, local.targets, rng)
        assert np.abs(c.semantics.data - a.semantics.data).max() < 0.1


def test_mutation_rejects_bad_step(setup, rng):
    local, _, _, space = setup
    pop = gsgp.gsgp_init(GsgpParams(population_size=2), space, local.targets, rng)
    with pytest.raises(ValueError):
        gsgp.geometric_mutation(pop[0], 0.0, space, local.targets, rng)
    with pytest.raises(ValueError):
        GsgpParams(mutation_step=-1)


def evolve(setup, rng, generations, size=30):
    local, _, _, space = setup
    params = GsgpParams(population_size=size)
    pop = gsgp.gsgp_init(params, space, local.targets, rng)
    history = [pop]
    for _ in range(generations):
        pop = gsgp.gsgp_generation(pop, params, space, local.targets, rng)
        history.append(pop)
    return history


def test_generation_elitism_and_size(setup, rng):
    history = evolve(setup, rng, 20)
    best = [min(i.fitness for i in pop) for pop in history]
    assert all(len(pop) == 30 for pop in history)
    assert all(b2 <= b1 for b1, b2 in zip(best, best[1:]))


def test_lineage_replay_all_views(setup, rng):
    local, train, test, _ = setup
    pop = evolve(setup, rng, 15)[-1]
    for ind in pop:
        for X, view in ((local.features, ind.semantics.on_local),
                        (train.features, ind.semantics.on_global),
                        (test.features, ind.semantics.on_test)):
            np.testing.assert_allclose(gsgp.replay(ind.lineage, X), view,
                                       rtol=0, atol=1e-9)


def test_lineage_is_acyclic_dag(setup, rng):
    pop = evolve(setup, rng, 10)[-1]
    nodes = gsgp.lineage_nodes([i.lineage for i in pop])
    # a topological order exists: every parent is listed before its child
    for ind in pop:
        order = gsgp._topological(ind.lineage)
        pos = {id(n): k for k, n in enumerate(order)}
        for n in order:
            for p in gsgp._parents(n):
                assert pos[id(p)] < pos[id(n)]
    assert len(nodes) <= 30 * 11


def test_memory_linear_not_exponential(setup, rng):
    local, _, _, space = setup
    params = GsgpParams(population_size=30)
    pop = gsgp.gsgp_init(params, space, local.targets, rng)
    refs = [weakref.ref(ind.semantics.data) for ind in pop]
    tree_nodes = []
    for g in range(1, 11):
        pop = gsgp.gsgp_generation(pop, params, space, local.targets, rng)
        gc.collect()
        # resident semantics: at most one buffer per individual
        assert len({id(i.semantics.data) for i in pop}) <= 30
        assert len(gsgp.lineage_nodes([i.lineage for i in pop])) <= 30 * (g + 1)
        # oracle: what a tree-based GSGP population would hold
        tree_nodes.append(sum(gsgp.expanded_size(i.lineage) for i in pop))
    # generation-0 buffers not held by the current population were freed
    alive0 = sum(r() is not None for r in refs)
    assert alive0 <= len({id(i.lineage) for i in pop
                          if isinstance(i.lineage, gsgp.Origin)})
    assert tree_nodes[-1] > 3 * tree_nodes[0]
