"""Approximation for MaxEDP without congestion: irreducible routings, the
short-path greedy, and rerouting through a single feedback-vertex node."""
from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

from .graph import (Graph, Instance, Mode, PathSeq, Routing, contract_edge, denormalize_routing,
                    edge_loads, normalize_instance)
from .mcf import EPS, FractionalSolution
from .rounding import round_with_retries


# ---------------------------------------------------------------- irreducible routings

@dataclass
class IrreducibleState:
    graph: Graph                       # the minor G'
    paths: list[PathSeq]               # P', index-aligned with the input paths
    original: list[PathSeq]
    congestion: int
    protected: frozenset[int]          # protected node ids in G' numbering
    history: list[tuple] = field(default_factory=list)

    def coverage(self) -> dict[int, int]:
        return _coverage(self.graph, self.paths)

    def average_length(self) -> float:
        return sum(len(p) for p in self.paths) / len(self.paths) if self.paths else 0.0


def _coverage(g: Graph, paths: list[PathSeq]) -> dict[int, int]:
    cov = {e: 0 for e in g.live_edges()}
    for j, p in enumerate(paths):
        for e in set(p.edges):
            cov[e] |= 1 << j
    return cov


def redundant_edges(g: Graph, paths: list[PathSeq], protected) -> list[tuple[int, int | None]]:
    """All ``(e, e')`` with ``e`` unprotected and cov(e) a subset of cov(e'); e' is None when
    ``e`` is covered by nothing."""
    protected = set(protected)
    cov = _coverage(g, paths)
    out = []
    for e, ce in cov.items():
        a, b = g.edges[e]
        if a in protected or b in protected:
            continue
        if ce == 0:
            out.append((e, None))
            continue
        for f, cf in cov.items():
            if f != e and ce & ~cf == 0:
                out.append((e, f))
                break
    return out


def _contract_walk(p: PathSeq, e: int, node_map: list[int]) -> PathSeq:
    nodes = [node_map[p.nodes[0]]]
    edges = []
    for f, w in zip(p.edges, p.nodes[1:]):
        if f == e:
            continue
        edges.append(f)
        nodes.append(node_map[w])
    return PathSeq(tuple(nodes), tuple(edges))


def reduce_irreducible(g: Graph, paths, c: int, protected=()) -> IrreducibleState:
    """Apply the reduction rule until no unprotected edge is redundant.

    Uncovered edges are deleted rather than contracted (they touch no path, so this is
    the same minor for every question asked about the paths).  An edge whose superset
    edge is a parallel copy is deleted and its paths moved onto the copy.  Contraction
    is skipped if it would turn a covered parallel edge into a loop.
    """
    paths = [p for p in paths]
    original = list(paths)
    loads = edge_loads(paths)
    if loads and max(loads.values()) > c:
        raise ValueError(f"paths have congestion {max(loads.values())} > {c}")
    protected = set(protected)
    history: list[tuple] = []
    while True:
        cov = _coverage(g, paths)
        step = None
        for e in sorted(cov):
            a, b = g.edges[e]
            if a in protected or b in protected:
                continue
            ce = cov[e]
            if ce == 0:
                step = ("delete", e, None)
                break
            supersets = [f for f in sorted(cov) if f != e and ce & ~cov[f] == 0]
            if not supersets:
                continue
            parallel = [f for f in supersets if {*g.edges[f]} == {a, b}]
            if parallel:
                step = ("merge", e, parallel[0])
                break
            loops = [f for f in sorted(cov) if f != e and {*g.edges[f]} == {a, b} and cov[f]]
            if loops:
                continue
            step = ("contract", e, supersets[0])
            break
        if step is None:
            break
        kind, e, f = step
        history.append(step)
        if kind == "delete":
            g = Graph(g.node_count, g.edges, g.deleted | {e})
        elif kind == "merge":
            g = Graph(g.node_count, g.edges, g.deleted | {e})
            paths = [PathSeq(p.nodes, tuple(f if x == e else x for x in p.edges)) for p in paths]
        else:
            g, node_map, _ = contract_edge(g, e)
            paths = [_contract_walk(p, e, node_map) if e in p.edges
                     else PathSeq(tuple(node_map[v] for v in p.nodes), p.edges) for p in paths]
            protected = {node_map[v] for v in protected}
    return IrreducibleState(g, paths, original, c, frozenset(protected), history)


def lift_routing(state: IrreducibleState, selected, pairs: list[int] | None = None) -> Routing:
    """Original paths behind an edge-disjoint selection of reduced paths."""
    selected = sorted(set(selected))
    used: set[int] = set()
    for j in selected:
        es = set(state.paths[j].edges)
        if es & used:
            raise ValueError(f"selected paths are not edge-disjoint in the reduced graph (path {j})")
        used |= es
    pairs = pairs if pairs is not None else list(range(len(state.original)))
    return Routing(tuple((pairs[j], state.original[j]) for j in selected))


def greedy_bound(n_short: int, r_prime: float, c: int) -> float:
    """Guaranteed greedy output size for ``n_short`` candidate paths.

    A path with at most r' feedback-node visits splits into at most r'+1 forest
    pieces (average length at most 2c) plus at most 2r' edges at feedback nodes, so
    the short half has length at most 4(c(r'+1) + r'); each pick removes at most c
    paths per edge.
    """
    return n_short / (4 * c * (c * (r_prime + 1) + r_prime))


def greedy_select_short(state: IrreducibleState, r_prime: float, c: int,
                        check: bool = True) -> list[int]:
    n = len(state.paths)
    if n == 0:
        return []
    by_len = sorted(range(n), key=lambda j: (len(state.paths[j]), j))
    short = sorted(by_len[:math.ceil(n / 2)])
    chosen = []
    used: set[int] = set()
    for j in short:
        es = set(state.paths[j].edges)
        if es & used:
            continue
        chosen.append(j)
        used |= es
    if check:
        bound = greedy_bound(len(short), r_prime, c)
        if len(chosen) < bound - 1e-9:
            raise AssertionError(f"greedy picked {len(chosen)} < {bound:.3f} paths")
    return chosen


# ---------------------------------------------------------------- single-node rerouting

def _augmenting_flow(n_nodes: int, arcs: list[list], source: int, sink: int) -> None:
    """Unit-ish integral max flow by BFS augmentation; ``arcs`` entries are
    ``[tail, head, cap, flow, rev_index, payload]`` and are updated in place."""
    out: list[list[int]] = [[] for _ in range(n_nodes)]
    for idx, arc in enumerate(arcs):
        out[arc[0]].append(idx)
    while True:
        via = {source: -1}
        queue = deque([source])
        while queue and sink not in via:
            v = queue.popleft()
            for idx in out[v]:
                arc = arcs[idx]
                if arc[2] - arc[3] > 0 and arc[1] not in via:
                    via[arc[1]] = idx
                    queue.append(arc[1])
        if sink not in via:
            return
        v = sink
        while v != source:
            idx = via[v]
            arcs[idx][3] += 1
            arcs[arcs[idx][4]][3] -= 1
            v = arcs[idx][0]


def _legs(inst: Instance, v: int, candidates: list[int]) -> dict[int, list[PathSeq]]:
    """Max flow from ``v`` into the pair gadgets; returns the v-rooted legs per pair."""
    g = inst.graph
    n = g.node_count
    gadget = {i: n + j for j, i in enumerate(candidates)}
    sink = n + len(candidates)
    arcs: list[list] = []

    def add(a, b, cap, payload):
        arcs.append([a, b, cap, 0, len(arcs) + 1, payload])
        arcs.append([b, a, 0, 0, len(arcs) - 1, None])

    for e in g.live_edges():
        a, b = g.edges[e]
        if a != b:
            add(a, b, 1, e)
            add(b, a, 1, e)
    for i in candidates:
        s, t = inst.pairs[i]
        add(s, gadget[i], 1, None)
        add(t, gadget[i], 1, None)
        add(gadget[i], sink, 2, None)
    _augmenting_flow(sink + 1, arcs, v, sink)
    # net flow per undirected edge; opposite units cancel
    net: dict[tuple[int, int, int], int] = Counter()
    for arc in arcs:
        if arc[5] is not None and arc[3] > 0:
            net[(arc[5], arc[0], arc[1])] += arc[3]
    for (e, a, b) in list(net):
        if net.get((e, a, b), 0) and net.get((e, b, a), 0):
            m = min(net[(e, a, b)], net[(e, b, a)])
            net[(e, a, b)] -= m
            net[(e, b, a)] -= m
    outs: dict[int, list[tuple[int, int]]] = {}
    for (e, a, b), f in sorted(net.items()):
        for _ in range(f):
            outs.setdefault(a, []).append((e, b))
    ends = {}
    for i in candidates:
        s, t = inst.pairs[i]
        for arc in arcs:
            if arc[1] == gadget[i] and arc[3] > 0 and arc[2] > 0:
                ends.setdefault(i, []).append(arc[0])
    # peel v-rooted walks out of the net flow, one per unit entering a gadget
    legs: dict[int, list[PathSeq]] = {}
    remaining = {a: list(lst) for a, lst in outs.items()}
    want = Counter(x for lst in ends.values() for x in lst)
    owner = {x: i for i, lst in ends.items() for x in lst}
    while True:
        nodes, edges = [v], []
        cur = v
        while want.get(cur, 0) == 0 or cur == v:
            nxt = remaining.get(cur)
            if not nxt:
                break
            e, b = nxt.pop()
            edges.append(e)
            nodes.append(b)
            cur = b
        if len(nodes) == 1 or want.get(cur, 0) == 0:
            break
        want[cur] -= 1
        legs.setdefault(owner[cur], []).append(PathSeq(tuple(nodes), tuple(edges)).loop_erased())
    return legs


def _splice(leg_s: PathSeq, leg_t: PathSeq) -> PathSeq:
    joined = PathSeq(leg_s.reversed().nodes + leg_t.nodes[1:], leg_s.reversed().edges + leg_t.edges)
    return joined.loop_erased()


@dataclass
class NodeRouting:
    routing: Routing
    target: int
    iterations: int
    used_fallback: bool


def route_through_node(inst: Instance, frac: FractionalSolution, v: int) -> NodeRouting:
    """Integral edge-disjoint routing from a flow whose paths all visit ``v``."""
    for i, p, w in frac.weighted_paths:
        if v not in p.nodes:
            raise ValueError(f"path of pair {i} does not visit node {v}")
    total = sum(frac.marginals)
    target = math.ceil(total / 12 - EPS)
    candidates = sorted({i for i, _, w in frac.weighted_paths if w > EPS})
    best: list[tuple[int, PathSeq]] = []
    rounds = 0
    while candidates:
        rounds += 1
        legs = _legs(inst, v, candidates)
        full = [i for i in candidates if len(legs.get(i, [])) == 2]
        routed = []
        for i in full:
            s, t = inst.pairs[i]
            a, b = legs[i]
            leg_s, leg_t = (a, b) if a.nodes[-1] == s else (b, a)
            routed.append((i, _splice(leg_s, leg_t)))
        if len(routed) > len(best):
            best = routed
        if len(full) == len(candidates):
            break
        candidates = full
    used_fallback = False
    if len(best) < target:
        used_fallback = True
        best = _exhaustive(inst, frac)
    return NodeRouting(Routing(tuple(best)), target, rounds, used_fallback)


def _exhaustive(inst: Instance, frac: FractionalSolution) -> list[tuple[int, PathSeq]]:
    from .oracles import exact_opt
    weight = Counter()
    for i, _, w in frac.weighted_paths:
        weight[i] += w
    top = sorted(weight, key=lambda i: (-weight[i], i))[:12]
    sub = inst.with_pairs([inst.pairs[i] for i in top])
    res = exact_opt(sub, force=True)
    return [(top[j], p) for j, p in res.routing.entries]


# ---------------------------------------------------------------- driver

@dataclass
class ApproxResult:
    routing: Routing
    case_used: str          # "1", "2", "both", "forest" or "none"
    r: int
    r_prime: float
    congestion: int
    rounded: int
    case1: int
    case2: int
    case2_target: int
    case2_inflow: float
    case2_flow: float


def _r_visits(p: PathSeq, R) -> int:
    return sum(1 for x in set(p.nodes) if x in R)


def approx_edp(inst: Instance, c_const: float = 2.0, seed: int = 0, max_trials: int = 20,
               R=None) -> ApproxResult:
    if inst.mode is not Mode.EDGE:
        raise ValueError("approx_edp needs an edge-disjoint instance")
    norm = inst if inst.is_normalized() else normalize_instance(inst)
    rr = round_with_retries(norm, max_trials, c_const, seed, R=R)
    R = frozenset(rr.state.r_plus - norm.terminals)
    r = len(R)
    entries = list(rr.rounded.routing.entries)
    c = max(1, rr.rounded.congestion)
    g = norm.graph
    if r == 0:
        by_len = sorted(entries, key=lambda x: (len(x[1]), x[0]))
        used: set[int] = set()
        chosen = []
        for i, p in by_len:
            if used & set(p.edges):
                continue
            chosen.append((i, p))
            used |= set(p.edges)
        out = Routing(tuple(chosen))
        result = ApproxResult(out, "forest", 0, 0.0, c, len(entries), len(chosen), 0, 0, 0.0, 0.0)
    else:
        r_prime = max(1.0, math.sqrt(r / c))
        low = [(i, p) for i, p in entries if _r_visits(p, R) <= r_prime]
        high = [(i, p) for i, p in entries if _r_visits(p, R) >= r_prime]
        case1 = Routing()
        if low:
            state = reduce_irreducible(g, [p for _, p in low], c, protected=R)
            picked = greedy_select_short(state, r_prime, c)
            case1 = lift_routing(state, picked, [i for i, _ in low])
        case2 = Routing()
        target2 = 0
        inflow = flow = 0.0
        if high:
            count = Counter(x for _, p in high for x in set(p.nodes) if x in R)
            v = min(count, key=lambda x: (-count[x], x))
            inflow = count[v] / c
            flow = len(high) / c
            sub = [(i, p) for i, p in high if v in p.nodes]
            frac = FractionalSolution([1.0 / c if any(j == i for j, _ in sub) else 0.0
                                       for i in range(norm.k)],
                                      [(i, p, 1.0 / c) for i, p in sub])
            nr = route_through_node(norm, frac, v)
            case2, target2 = nr.routing, nr.target
            if len(case2) < target2:
                raise AssertionError(f"single-node routing {len(case2)} < {target2}")
        if low and high:
            used_case = "both"
        else:
            used_case = "1" if low else "2" if high else "none"
        out = case1 if len(case1) >= len(case2) else case2
        result = ApproxResult(out, used_case, r, r_prime, c, len(entries), len(case1), len(case2),
                              target2, inflow, flow)
    if norm is not inst:
        result.routing = denormalize_routing(norm, inst, result.routing)
    return result
