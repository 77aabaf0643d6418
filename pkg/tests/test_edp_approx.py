import math

import pytest

from djp import edp_approx as ea
from djp.edp_approx import (approx_edp, greedy_bound, greedy_select_short, lift_routing,
                            reduce_irreducible, redundant_edges, route_through_node)
from djp.generators import gen_grid_gap, gen_random_fvs
from djp.graph import Graph, Instance, PathSeq, verify_routing
from djp.mcf import FractionalSolution
from helpers import random_forest_routing


def star_example(c):
    """A path of length c-1 with c-1 leaves hanging off its far end."""
    path_nodes = list(range(c))           # 0 .. c-1, end point is c-1
    leaves = list(range(c, 2 * c - 1))
    edges = [(j, j + 1) for j in range(c - 1)] + [(c - 1, x) for x in leaves]
    g = Graph.from_edges(2 * c - 1, edges)
    paths = [PathSeq.from_nodes(g, path_nodes + [x]) for x in leaves]
    paths += [PathSeq.from_nodes(g, [j, j + 1]) for j in range(c - 1)]
    paths += [PathSeq.from_nodes(g, [c - 1, x]) for x in leaves]
    return g, paths


@pytest.mark.parametrize("c", [3, 4, 5, 6])
def test_star_example_is_irreducible(c):
    g, paths = star_example(c)
    assert len(paths) == 3 * c - 3
    state = reduce_irreducible(g, paths, c)
    assert not state.history
    assert state.average_length() == pytest.approx((c + 2) / 3)


def test_star_example_c4_average_two():
    g, paths = star_example(4)
    assert reduce_irreducible(g, paths, 4).average_length() == pytest.approx(2.0)


def test_lone_path_contracts_to_one_edge():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    state = reduce_irreducible(g, [PathSeq.from_nodes(g, [0, 1, 2, 3])], 1)
    assert len(state.paths[0]) == 1
    assert state.graph.edge_count == 1


def test_protected_edges_survive():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    state = reduce_irreducible(g, [PathSeq.from_nodes(g, [0, 1, 2, 3])], 1, protected={1})
    assert len(state.paths[0]) == 2


def test_congestion_checked():
    g = Graph.from_edges(2, [(0, 1)])
    p = PathSeq.from_nodes(g, [0, 1])
    with pytest.raises(ValueError):
        reduce_irreducible(g, [p, p], 1)


@pytest.mark.parametrize("seed", range(60))
@pytest.mark.parametrize("c", [1, 2, 3])
def test_forest_routings(seed, c):
    g, paths = random_forest_routing(seed, c)
    state = reduce_irreducible(g, paths, c)
    assert state.average_length() <= 2 * c + 1e-9
    assert not redundant_edges(state.graph, state.paths, state.protected)
    # one path per input, each still a walk in the minor
    assert len(state.paths) == len(paths)
    for p in state.paths:
        for e, a, b in zip(p.edges, p.nodes, p.nodes[1:]):
            assert {a, b} == set(state.graph.edges[e])


@pytest.mark.parametrize("seed", range(20))
def test_reduction_preserves_disjointness(seed):
    # disjointness of reduced paths equals disjointness of the originals
    g, paths = random_forest_routing(500 + seed, 2)
    state = reduce_irreducible(g, paths, 2)
    for a in range(len(paths)):
        for b in range(a + 1, len(paths)):
            orig = not set(paths[a].edges) & set(paths[b].edges)
            red = not set(state.paths[a].edges) & set(state.paths[b].edges)
            assert orig == red


def test_lift_routing():
    g, paths = random_forest_routing(3, 2)
    state = reduce_irreducible(g, paths, 2)
    assert len(lift_routing(state, [])) == 0
    assert lift_routing(state, [0]).path_for(0) == paths[0]
    clash = next(((a, b) for a in range(len(paths)) for b in range(a + 1, len(paths))
                  if set(state.paths[a].edges) & set(state.paths[b].edges)), None)
    if clash:
        with pytest.raises(ValueError):
            lift_routing(state, clash)


def test_greedy_disjoint_takes_short_half():
    g = Graph.from_edges(8, [(0, 1), (2, 3), (4, 5), (6, 7)])
    paths = [PathSeq.from_nodes(g, [2 * j, 2 * j + 1]) for j in range(4)]
    state = reduce_irreducible(g, paths, 1)
    assert greedy_select_short(state, 1, 1) == [0, 1]


def test_greedy_shared_edge_picks_one():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (1, 3), (1, 4)])
    paths = [PathSeq.from_nodes(g, [0, 1, x]) for x in (2, 3, 4)]
    state = ea.IrreducibleState(g, paths, paths, 3, frozenset())
    assert len(greedy_select_short(state, 1, 3, check=False)) == 1


def test_greedy_bound_formula():
    assert greedy_bound(100, 2, 3) == pytest.approx(100 / (4 * 3 * (3 * 3 + 2)))


def _through(inst, v, routes, weight=1.0):
    k = inst.k
    frac = FractionalSolution([weight if any(i == j for j, _ in routes) else 0 for i in range(k)],
                              [(i, PathSeq.from_nodes(inst.graph, n), weight) for i, n in routes])
    return route_through_node(inst, frac, v)


def test_route_one_pair():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(g, ((0, 2),))
    res = _through(inst, 1, [(0, [0, 1, 2])])
    assert len(res.routing) == 1


def test_route_star_centre():
    k = 4
    edges = [(0, 1 + j) for j in range(2 * k)]
    g = Graph.from_edges(2 * k + 1, edges)
    inst = Instance(g, tuple((1 + 2 * j, 2 + 2 * j) for j in range(k)))
    res = _through(inst, 0, [(j, [1 + 2 * j, 0, 2 + 2 * j]) for j in range(k)])
    assert len(res.routing) == k
    assert verify_routing(inst, res.routing).feasible


def test_route_missing_node():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(g, ((0, 1),))
    with pytest.raises(ValueError):
        _through(inst, 2, [(0, [0, 1])])


def test_forest_all_routed():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    inst = Instance(g, ((0, 2), (3, 5)))
    res = approx_edp(inst)
    assert len(res.routing) == 2 and res.case_used == "forest"


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_grid_returns_one(k):
    res = approx_edp(gen_grid_gap(k))
    assert len(res.routing) == 1
    assert verify_routing(gen_grid_gap(k), res.routing).feasible


def test_rejects_node_mode():
    from djp.graph import Mode
    with pytest.raises(ValueError):
        approx_edp(gen_random_fvs(5, 1, 3, 2, 0, Mode.NODE))


@pytest.mark.parametrize("seed", range(60))
def test_case_two_and_feasibility(seed, monkeypatch):
    calls = []
    orig = ea.route_through_node

    def spy(inst, frac, v):
        out = orig(inst, frac, v)
        calls.append((out, frac, inst))
        return out

    monkeypatch.setattr(ea, "route_through_node", spy)
    inst = gen_random_fvs(5 + seed % 20, 1 + seed % 5, 10 + seed % 30, 1 + seed % 8, seed)
    res = approx_edp(inst, 2.0, seed)
    assert verify_routing(inst, res.routing, 1).feasible
    for out, frac, norm in calls:
        assert len(out.routing) >= math.ceil(sum(frac.marginals) / 12 - 1e-9)
        assert verify_routing(norm, out.routing, 1).feasible
    if res.case2_flow:
        # the heaviest node sees at least a ceil(r')/r share of the high paths
        assert res.case2_inflow >= res.case2_flow * math.ceil(res.r_prime) / res.r - 1e-9
