"""Independent reference code used only by the tests."""
import itertools
import random

from djp.generators import gen_random_fvs
from djp.graph import Graph, Instance, Mode


def simple_paths(g, s, t):
    out = []

    def rec(v, nodes, edges):
        if v == t:
            out.append((tuple(nodes), tuple(edges)))
            return
        for w, e in g.incidence[v]:
            if w in nodes:
                continue
            nodes.append(w)
            edges.append(e)
            rec(w, nodes, edges)
            nodes.pop()
            edges.pop()

    rec(s, [s], [])
    return out


def naive_opt(inst):
    """Enumerate every simple path per pair and try all compatible combinations."""
    cands = [simple_paths(inst.graph, s, t) for s, t in inst.pairs]
    best = 0

    def rec(i, used_e, used_n, cnt):
        nonlocal best
        if cnt + (inst.k - i) <= best:
            return
        if i == inst.k:
            best = max(best, cnt)
            return
        rec(i + 1, used_e, used_n, cnt)
        for nodes, edges in cands[i]:
            if inst.mode is Mode.EDGE:
                if used_e & set(edges):
                    continue
                rec(i + 1, used_e | set(edges), used_n, cnt + 1)
            else:
                if used_n & set(nodes):
                    continue
                rec(i + 1, used_e, used_n | set(nodes), cnt + 1)

    rec(0, frozenset(), frozenset(), 0)
    return best


def naive_fvs_size(g):
    for size in range(g.node_count + 1):
        for sub in itertools.combinations(range(g.node_count), size):
            if g.is_forest(sub):
                return size
    return g.node_count


def random_raw_instance(seed, mode=None, n_range=(3, 8), k_range=(1, 4)):
    rng = random.Random(seed)
    n = rng.randint(*n_range)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(n - 1, 2 * n))]
    edges = [e for e in edges if e[0] != e[1]]
    pairs = [tuple(rng.sample(range(n), 2)) for _ in range(rng.randint(*k_range))]
    if mode is None:
        mode = Mode.EDGE if seed % 2 else Mode.NODE
    return Instance(Graph.from_edges(n, edges), tuple(pairs), mode)


def rounding_suite(count=100):
    """Seeded bounded-FVS instances with n <= 40, r <= 4, k <= 8."""
    out = []
    for seed in range(count):
        rng = random.Random(1000 + seed)
        r = rng.randint(0, 4)
        nf = rng.randint(5, 40 - r)
        k = rng.randint(1, 8)
        out.append(gen_random_fvs(nf, r, rng.randint(0, 3 * nf // 2 + r), k, seed))
    return out


def oracle_suite(count=100):
    """Edge-mode instances small enough for the brute-force oracle."""
    out = []
    for seed in range(count):
        rng = random.Random(5000 + seed)
        r = rng.randint(0, 3)
        nf = rng.randint(3, 12 - r)
        k = rng.randint(1, 6)
        out.append(gen_random_fvs(nf, r, rng.randint(0, 2 * nf), k, seed))
    return out


def ndp_suite(count=200):
    """Node-mode instances with n <= 12, r <= 3, k <= 4."""
    out = []
    for seed in range(count):
        rng = random.Random(9000 + seed)
        r = rng.randint(0, 3)
        nf = rng.randint(3, 12 - r)
        k = rng.randint(1, 4)
        out.append(gen_random_fvs(nf, r, rng.randint(0, 2 * nf), k, seed, Mode.NODE))
    return out


def random_forest_routing(seed, c):
    """A random tree with random paths on it, at most ``c`` per edge."""
    rng = random.Random(seed)
    n = rng.randint(4, 25)
    edges = [(v, rng.randrange(v)) for v in range(1, n)]
    g = Graph.from_edges(n, edges)
    parent = {v: p for v, p in edges}

    def tree_path(a, b):
        up_a = [a]
        while up_a[-1] != 0:
            up_a.append(parent[up_a[-1]])
        up_b = [b]
        while up_b[-1] != 0:
            up_b.append(parent[up_b[-1]])
        common = set(up_a) & set(up_b)
        top = next(v for v in up_a if v in common)
        left = up_a[:up_a.index(top) + 1]
        right = up_b[:up_b.index(top)]
        return left + right[::-1]

    from djp.graph import PathSeq, edge_loads
    paths = []
    for _ in range(rng.randint(1, 3 * n)):
        a, b = rng.sample(range(n), 2)
        p = PathSeq.from_nodes(g, tree_path(a, b))
        loads = edge_loads(paths + [p])
        if max(loads.values()) <= c:
            paths.append(p)
    return g, paths


def clique_cases():
    """Curated multicoloured-clique inputs: (k, n, edges) with classes of consecutive ids."""
    cases = []
    for k, n in ((2, 2), (2, 3), (3, 2), (3, 3)):
        cls = [list(range(i * n, (i + 1) * n)) for i in range(k)]
        if k == 2:
            inputs = [[(cls[0][0], cls[1][0])], [(cls[0][-1], cls[1][-1])], []]
        else:
            a, b, c = (x[0] for x in cls)
            a2, b2, c2 = (x[-1] for x in cls)
            inputs = [
                [(a, b), (b, c), (a, c)],
                [(a2, b2), (b2, c2), (a2, c2)],
                [(a, b), (b, c), (c, a2)],
                [(a, b), (b, c)],
                [(a, b), (b, c), (c, a2), (a2, b2), (b2, c)],
            ]
        for edges in inputs:
            cases.append((k, n, edges, cls))
    return cases


def has_multicolored_clique(edges, k, partition):
    adj = {frozenset(e) for e in edges}
    for pick in itertools.product(*partition):
        if all(frozenset((x, y)) in adj for x, y in itertools.combinations(pick, 2)):
            return True
    return False


def fractional_instances():
    """Five fixed instances whose LP marginals are genuinely fractional."""
    suite = rounding_suite(100)
    return [suite[42], suite[96], gen_random_fvs(15, 3, 25, 6, 60), gen_random_fvs(15, 3, 25, 6, 66),
            gen_random_fvs(20, 4, 40, 8, 237)]
