import pytest

from djp.fvs import fvs_exact
from djp.generators import (CUBIC_GRAPHS, canonical_grid_path_nodes, coloring_hubs,
                            gen_coloring_r1, gen_coloring_r2, gen_grid_gap, gen_multicolored_clique,
                            gen_random_fvs, random_hubs)
from djp.formats import format_instance
from djp.graph import Mode
from djp.mcf import lp_value
from djp.oracles import exact_opt, exact_opt_fixed_subset
from helpers import clique_cases, has_multicolored_clique


@pytest.mark.parametrize("k", [2, 3, 4])
def test_grid_properties(k):
    inst = gen_grid_gap(k)
    assert inst.is_normalized()
    assert exact_opt(inst, force=True).value == 1
    assert lp_value(inst) >= k / 2 - 1e-6


def test_grid_canonical_paths_cross():
    k = 4
    paths = [set(canonical_grid_path_nodes(k, i)) for i in range(1, k + 1)]
    for i in range(k):
        for j in range(i + 1, k):
            assert paths[i] & paths[j]


def test_grid_rejects_small_k():
    with pytest.raises(ValueError):
        gen_grid_gap(1)


def test_coloring_r2_shape():
    inst = gen_coloring_r2(CUBIC_GRAPHS["k4"])
    assert inst.k == 6 and inst.is_normalized()
    hubs = coloring_hubs(inst, 4)
    assert len(hubs) == 3
    assert inst.graph.is_forest(hubs[:2])


def test_coloring_r1_shape():
    inst = gen_coloring_r1(CUBIC_GRAPHS["k4"])
    hubs = coloring_hubs(inst, 4)
    assert len(hubs) == 2
    assert inst.graph.is_forest(hubs[:1])


def test_coloring_rejects_non_cubic():
    with pytest.raises(ValueError):
        gen_coloring_r2([(0, 1), (1, 2), (2, 0)])


@pytest.mark.parametrize("name", ["k4", "k33", "prism"])
def test_class_one_graphs_route_everything(name):
    inst = gen_coloring_r2(CUBIC_GRAPHS[name])
    ok, _ = exact_opt_fixed_subset(inst, range(inst.k), force=True)
    assert ok


def test_r1_k4_optimum():
    assert exact_opt(gen_coloring_r1(CUBIC_GRAPHS["k4"]), force=True).value == 4


def test_clique_small_yes_no():
    part = [[0, 1], [2, 3]]
    yes = gen_multicolored_clique([(0, 2)], 2, part)
    no = gen_multicolored_clique([], 2, part)
    assert yes.target == 3
    assert exact_opt(yes.instance).value == 3
    assert exact_opt(no.instance).value < 3
    assert yes.instance.mode is Mode.NODE


@pytest.mark.parametrize("case", clique_cases(), ids=lambda c: f"k{c[0]}n{c[1]}e{len(c[2])}")
def test_clique_fvs_witness(case):
    k, n, edges, part = case
    red = gen_multicolored_clique(edges, k, part)
    assert red.instance.graph.is_forest(red.fvs)
    assert red.target == k * (n - 1) + k * (k - 1) // 2


def test_clique_rejects_bad_partition():
    with pytest.raises(ValueError):
        gen_multicolored_clique([], 2, [[0, 1], [2]])
    with pytest.raises(ValueError):
        gen_multicolored_clique([(0, 9)], 2, [[0, 1], [2, 3]])


def test_clique_ground_truth_helper():
    assert has_multicolored_clique([(0, 2)], 2, [[0, 1], [2, 3]])
    assert not has_multicolored_clique([(0, 1)], 2, [[0, 1], [2, 3]])


def test_random_forest_when_r_zero():
    inst = gen_random_fvs(12, 0, 5, 3, 7)
    assert inst.graph.is_forest()


@pytest.mark.parametrize("seed", range(15))
def test_random_hubs_are_fvs(seed):
    inst = gen_random_fvs(10, 3, 12, 4, seed)
    assert inst.is_normalized()
    assert inst.graph.is_forest(random_hubs(10, 3))
    assert len(fvs_exact(inst.graph)) <= 3


def test_random_deterministic():
    a = format_instance(gen_random_fvs(10, 2, 8, 3, 42, Mode.NODE))
    b = format_instance(gen_random_fvs(10, 2, 8, 3, 42, Mode.NODE))
    assert a == b
    assert a != format_instance(gen_random_fvs(10, 2, 8, 3, 43, Mode.NODE))
