"""Instance generators: integrality-gap staircase grid, the edge-colouring and
multicoloured-clique reductions, and random instances with a planted small FVS."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb

from .graph import Graph, Instance, Mode, normalize_instance


def gen_grid_gap(k: int) -> Instance:
    """Staircase of degree-3 crossing gadgets where every two canonical paths cross.

    Gadget ``(row, col)`` exists for ``col <= row`` (rows counted from the bottom) and
    is a pair of nodes ``a - b``; ``a`` takes the left and lower neighbours, ``b`` the
    right and upper ones.  ``s_i`` hangs off ``(i, 1).a`` and ``t_i`` off ``(k, i).b``,
    so pair ``i``'s canonical path runs along row ``i`` and then up column ``i``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    ids: dict[tuple[int, int, str], int] = {}
    for r in range(1, k + 1):
        for c in range(1, r + 1):
            ids[(r, c, "a")] = len(ids)
            ids[(r, c, "b")] = len(ids)
    edges = []
    for r in range(1, k + 1):
        for c in range(1, r + 1):
            edges.append((ids[(r, c, "a")], ids[(r, c, "b")]))
            if c + 1 <= r:
                edges.append((ids[(r, c, "b")], ids[(r, c + 1, "a")]))
            if r + 1 <= k:
                edges.append((ids[(r, c, "b")], ids[(r + 1, c, "a")]))
    n = len(ids)
    pairs = []
    for i in range(1, k + 1):
        s, t = n, n + 1
        n += 2
        edges.append((ids[(i, 1, "a")], s))
        edges.append((ids[(k, i, "b")], t))
        pairs.append((s, t))
    return Instance(Graph.from_edges(n, edges), tuple(pairs), Mode.EDGE)


def canonical_grid_path_nodes(k: int, i: int) -> list[tuple[int, int, str]]:
    """Gadget coordinates visited by pair ``i``'s canonical path (1-indexed ``i``)."""
    seq = []
    for c in range(1, i + 1):
        seq += [(i, c, "a"), (i, c, "b")]
    for r in range(i + 1, k + 1):
        seq += [(r, i, "a"), (r, i, "b")]
    return seq


# ---------------------------------------------------------------- cubic graphs

CUBIC_GRAPHS: dict[str, list[tuple[int, int]]] = {
    "k4": [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    "k33": [(a, b) for a in range(3) for b in range(3, 6)],
    "prism": [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
    "petersen": [(i, (i + 1) % 5) for i in range(5)]
    + [(i, i + 5) for i in range(5)]
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)],
}


def _check_cubic(h_edges: list[tuple[int, int]]) -> int:
    nodes = sorted({v for e in h_edges for v in e})
    if nodes != list(range(len(nodes))):
        raise ValueError("cubic graph nodes must be 0..n-1")
    if len({frozenset(e) for e in h_edges}) != len(h_edges) or any(a == b for a, b in h_edges):
        raise ValueError("graph must be simple")
    deg = [0] * len(nodes)
    for a, b in h_edges:
        deg[a] += 1
        deg[b] += 1
    if any(d != 3 for d in deg):
        raise ValueError("graph is not cubic")
    return len(nodes)


def _coloring_instance(h_edges: list[tuple[int, int]], hubs: int) -> Instance:
    n = _check_cubic(h_edges)
    # H's nodes keep ids 0..n-1, hubs follow
    edges = [(v, n + j) for j in range(hubs) for v in range(n)]
    raw = Instance(Graph.from_edges(n + hubs, edges), tuple(h_edges), Mode.EDGE)
    return normalize_instance(raw)


def gen_coloring_r2(h_edges: list[tuple[int, int]]) -> Instance:
    """K_{3,|V(H)|}; all |E(H)| pairs routable iff H is 3-edge-colourable."""
    return _coloring_instance(h_edges, 3)


def gen_coloring_r1(h_edges: list[tuple[int, int]]) -> Instance:
    """K_{2,|V(H)|}; |V(H)| pairs routable iff H is 3-edge-colourable."""
    return _coloring_instance(h_edges, 2)


def coloring_hubs(inst: Instance, h_nodes: int) -> list[int]:
    hubs = []
    v = h_nodes
    while v < inst.graph.node_count and inst.origin[v] == v and inst.graph.degree(v) == h_nodes:
        hubs.append(v)
        v += 1
    return hubs


# ---------------------------------------------------------------- multicoloured clique

@dataclass(frozen=True)
class CliqueReduction:
    instance: Instance          # raw node-disjoint instance (terminals are not leaves)
    target: int                 # k(n-1) + C(k,2)
    fvs: frozenset[int]         # P plus the end nodes of every X_{u^i}
    names: tuple[str, ...]      # readable node names, for debugging


def gen_multicolored_clique(g_edges: list[tuple[int, int]], k: int,
                            partition: list[list[int]]) -> CliqueReduction:
    """Build the node-disjoint paths instance for a multicoloured clique query.

    ``partition[i]`` lists the vertices of colour class ``i``; all classes must have
    the same size ``n >= 2``, and ``k >= 2``.  The first vertex of each class acts as
    the selected vertex ``u^i``.
    """
    if k < 2 or len(partition) != k:
        raise ValueError("need k >= 2 classes")
    n = len(partition[0])
    if n < 2 or any(len(p) != n for p in partition):
        raise ValueError("classes must be padded to a common size n >= 2")
    cls = {}
    for i, part in enumerate(partition):
        for v in part:
            if v in cls:
                raise ValueError(f"vertex {v} appears in two classes")
            cls[v] = i
    for a, b in g_edges:
        if a not in cls or b not in cls:
            raise ValueError(f"edge ({a},{b}) uses a vertex outside the partition")

    names: list[str] = []
    index: dict[tuple, int] = {}

    def node(key, name):
        if key not in index:
            index[key] = len(names)
            names.append(name)
        return index[key]

    edges: list[tuple[int, int]] = []
    m_st: list[tuple[int, int]] = []
    for i in range(k):
        js = [j for j in range(k) if j != i]
        u = partition[i][0]
        for v in partition[i]:
            path = [node(("x", i, v, j), f"x[{i + 1}]_{v},{j + 1}") for j in js]
            edges.extend(zip(path, path[1:]))
        first, last = js[0], js[-1]
        for v in partition[i][1:]:
            s = node(("s", i, v), f"s[{i + 1}]_{v}")
            t = node(("t", i, v), f"t[{i + 1}]_{v}")
            edges += [(s, index[("x", i, v, first)]), (s, index[("x", i, u, first)])]
            edges += [(t, index[("x", i, v, last)]), (t, index[("x", i, u, last)])]
            m_st.append((s, t))
    m_x: list[tuple[int, int]] = []
    p_nodes = []
    for i, j in itertools.combinations(range(k), 2):
        p = node(("p", i, j), f"p{i + 1},{j + 1}")
        p_nodes.append(p)
        edges += [(p, index[("x", i, v, j)]) for v in partition[i]]
        edges += [(p, index[("x", j, w, i)]) for w in partition[j]]
    for a, b in g_edges:
        i, j = cls[a], cls[b]
        if i == j:
            continue
        if i > j:
            a, b, i, j = b, a, j, i
        m_x.append((index[("x", i, a, j)], index[("x", j, b, i)]))
    fvs = set(p_nodes)
    for i in range(k):
        js = [j for j in range(k) if j != i]
        u = partition[i][0]
        fvs.add(index[("x", i, u, js[0])])
        fvs.add(index[("x", i, u, js[-1])])
    inst = Instance(Graph.from_edges(len(names), edges), tuple(m_st + m_x), Mode.NODE)
    return CliqueReduction(inst, k * (n - 1) + comb(k, 2), frozenset(fvs), tuple(names))


# ---------------------------------------------------------------- random instances

def gen_random_fvs(n_forest: int, r: int, extra_edges: int, k: int, seed: int,
                   mode: Mode = Mode.EDGE) -> Instance:
    """Random forest plus ``r`` hub nodes wired to it, with ``k`` leaf-normalized pairs.

    Hubs are nodes ``n_forest .. n_forest + r - 1`` and always form a feedback vertex set.
    """
    if min(n_forest, r, extra_edges, k) < 0:
        raise ValueError("parameters must be nonnegative")
    rng = random.Random(seed)
    edges = set()
    for v in range(1, n_forest):
        # attach to an earlier node, occasionally start a new tree
        if rng.random() < 0.85:
            edges.add((rng.randrange(v), v))
    hubs = list(range(n_forest, n_forest + r))
    if n_forest:
        candidates = [(h, v) for h in hubs for v in range(n_forest)]
        rng.shuffle(candidates)
        edges.update(candidates[:extra_edges])
    n = n_forest + r
    pairs = []
    if n >= 2:
        for _ in range(k):
            s, t = rng.sample(range(n), 2)
            pairs.append((s, t))
    raw = Instance(Graph.from_edges(n, sorted(edges)), tuple(pairs), mode)
    return normalize_instance(raw)


def random_hubs(n_forest: int, r: int) -> frozenset[int]:
    return frozenset(range(n_forest, n_forest + r))
