import random

import pytest

from djp.generators import CUBIC_GRAPHS, gen_coloring_r2, gen_grid_gap
from djp.graph import Graph, Instance, normalize_instance, verify_routing
from djp.oracles import GuardExceeded, core_size, exact_opt, exact_opt_fixed_subset
from helpers import naive_opt, random_raw_instance


def test_forest_distinct_trees():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    inst = Instance(g, ((0, 2), (3, 5)))
    assert exact_opt(inst).value == 2


@pytest.mark.parametrize("k", [2, 3])
def test_grid_gap_opt_one(k):
    assert exact_opt(gen_grid_gap(k)).value == 1


def test_k4_coloring():
    res = exact_opt(gen_coloring_r2(CUBIC_GRAPHS["k4"]))
    assert res.value == 6


def test_fixed_subset_cases():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(g, ((0, 2), (0, 1)))
    ok, r = exact_opt_fixed_subset(inst, [])
    assert ok and len(r) == 0
    ok, r = exact_opt_fixed_subset(inst, [0])
    assert ok and verify_routing(inst, r).feasible
    assert not exact_opt_fixed_subset(inst, [0, 1])[0]


def test_guard():
    inst = gen_grid_gap(5)
    assert core_size(inst) > 14
    with pytest.raises(GuardExceeded):
        exact_opt(inst)


@pytest.mark.parametrize("seed", range(150))
def test_matches_naive_enumeration(seed):
    raw = random_raw_instance(seed)
    res = exact_opt(raw)
    assert res.value == naive_opt(raw)
    assert len(res.routing) == res.value
    assert verify_routing(raw, res.routing).feasible
    norm = normalize_instance(raw)
    assert exact_opt(norm).value == naive_opt(norm) == res.value


@pytest.mark.parametrize("seed", range(30))
def test_relabel_invariance(seed):
    raw = random_raw_instance(seed)
    rng = random.Random(seed)
    perm = list(range(raw.graph.node_count))
    rng.shuffle(perm)
    g = Graph.from_edges(len(perm), [(perm[a], perm[b]) for a, b in raw.graph.edges])
    moved = Instance(g, tuple((perm[s], perm[t]) for s, t in raw.pairs), raw.mode)
    assert exact_opt(moved).value == exact_opt(raw).value
