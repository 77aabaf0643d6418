import random

import pytest
from hypothesis import given, settings, strategies as st

from djp.graph import (Graph, Instance, Mode, PathSeq, Routing, contract_edge, denormalize_routing,
                       normalize_instance, verify_routing)
from djp.oracles import exact_opt
from helpers import random_raw_instance

TRIANGLE = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_normalize_triangle():
    inst = normalize_instance(Instance(TRIANGLE, ((0, 1),)))
    assert inst.graph.node_count == 5
    assert inst.pairs == ((3, 4),)
    assert inst.graph.neighbors(3) == [0] and inst.graph.neighbors(4) == [1]
    assert inst.is_normalized()
    assert inst.origin[3] == 0 and inst.origin[4] == 1


def test_normalize_copies_per_occurrence():
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = normalize_instance(Instance(path, ((0, 2), (0, 1))))
    assert inst.graph.node_count == 7
    assert sorted(inst.origin[3:]) == [0, 0, 1, 2]
    assert inst.is_normalized()


def test_normalize_rejects_loop_pair():
    with pytest.raises(ValueError):
        normalize_instance(Instance(TRIANGLE, ((1, 1),)))


def test_normalize_preserves_optimum():
    for seed in range(20):
        raw = random_raw_instance(seed)
        assert exact_opt(raw).value == exact_opt(normalize_instance(raw)).value


def test_denormalize_round_trip():
    raw = Instance(TRIANGLE, ((0, 1),))
    norm = normalize_instance(raw)
    p = PathSeq.from_nodes(norm.graph, [3, 0, 2, 1, 4])
    back = denormalize_routing(norm, raw, Routing(((0, p),)))
    assert back.path_for(0).nodes == (0, 2, 1)
    assert verify_routing(raw, back).feasible


def test_verify_disjoint_paths():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    for mode in Mode:
        inst = Instance(g, ((0, 2), (3, 5)), mode)
        r = Routing(((0, PathSeq.from_nodes(g, [0, 1, 2])), (1, PathSeq.from_nodes(g, [3, 4, 5]))))
        assert verify_routing(inst, r).feasible


def test_verify_shared_edge():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    inst = Instance(g, ((0, 3), (1, 2)))
    r = Routing(((0, PathSeq.from_nodes(g, [0, 1, 2, 3])), (1, PathSeq.from_nodes(g, [1, 2]))))
    rep = verify_routing(inst, r)
    assert not rep.feasible and rep.max_edge_congestion == 2
    assert verify_routing(inst, r, 2).feasible


def test_verify_node_mode_counts_endpoints():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(g, ((0, 1), (1, 2)), Mode.NODE)
    r = Routing(((0, PathSeq.from_nodes(g, [0, 1])), (1, PathSeq.from_nodes(g, [1, 2]))))
    rep = verify_routing(inst, r)
    assert not rep.feasible and rep.max_node_congestion == 2


def test_verify_reports_malformed_path():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    inst = Instance(g, ((0, 2),))
    bad = PathSeq((0, 2), (0,))
    rep = verify_routing(inst, Routing(((0, bad),)))
    assert not rep.feasible and rep.violations
    assert verify_routing(inst, Routing(((0, bad),))) == rep


def test_verify_rejects_non_simple():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 1), (1, 3)])
    inst = Instance(g, ((0, 3),))
    walk = PathSeq((0, 1, 2, 1, 3), (0, 1, 2, 3))
    assert not verify_routing(inst, Routing(((0, walk),)), 5).feasible


def test_contract_triangle():
    g, node_map, edge_map = contract_edge(TRIANGLE, 0)
    assert g.node_count == 2
    assert g.edge_count == 2
    assert edge_map[0] is None
    assert {g.edges[edge_map[1]][0], g.edges[edge_map[1]][1]} == {0, 1}


def test_contract_path():
    g, _, _ = contract_edge(Graph.from_edges(3, [(0, 1), (1, 2)]), 0)
    assert g.node_count == 2 and g.edge_count == 1


def test_contract_rejects_dead_edge():
    g = Graph(3, ((0, 1), (1, 2)), frozenset({0}))
    with pytest.raises(ValueError):
        contract_edge(g, 0)


def _spanning_tree(g, rng):
    parent = list(range(g.node_count))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    tree = []
    for e in rng.sample(g.live_edges(), g.edge_count):
        a, b = g.edges[e]
        if find(a) != find(b):
            parent[find(a)] = find(b)
            tree.append(e)
    return tree


@pytest.mark.parametrize("seed", range(10))
def test_contract_spanning_tree(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    edges = [(v, rng.randrange(v)) for v in range(1, n)]
    edges += [tuple(rng.sample(range(n), 2)) for _ in range(rng.randint(0, 8))]
    g = Graph.from_edges(n, edges)
    tree = _spanning_tree(g, rng)
    ids = {e: e for e in g.live_edges()}
    cur = g
    for e in tree:
        if ids[e] is None:
            continue
        cur, _, emap = contract_edge(cur, ids[e])
        ids = {k: (None if v is None else emap[v]) for k, v in ids.items()}
    assert cur.node_count == 1
    # every non-tree edge became a loop at some point and was removed
    assert cur.edge_count == 0
    assert sum(v is None for v in ids.values()) == g.edge_count


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=1,
                                     max_size=14), st.data())
def test_contract_edge_map_is_bijection(n, raw_edges, data):
    edges = [(a % n, b % n) for a, b in raw_edges if a % n != b % n]
    if not edges:
        return
    g = Graph.from_edges(n, edges)
    e = data.draw(st.sampled_from(g.live_edges()))
    h, node_map, emap = contract_edge(g, e)
    survivors = [emap[f] for f in g.live_edges() if emap[f] is not None]
    assert len(survivors) == len(set(survivors)) == h.edge_count
    a, b = g.edges[e]
    assert node_map[a] == node_map[b]
    for f in g.live_edges():
        if emap[f] is not None:
            x, y = g.edges[f]
            assert {node_map[x], node_map[y]} == set(h.edges[emap[f]])


def test_graph_rejects_bad_endpoint():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(0, 5)])


def test_loop_erasure():
    walk = PathSeq((0, 1, 2, 1, 3), (0, 1, 2, 3))
    assert walk.loop_erased().nodes == (0, 1, 3)
    assert walk.loop_erased().edges == (0, 3)
