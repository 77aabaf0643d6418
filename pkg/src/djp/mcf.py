"""Multi-commodity flow relaxation in arc form, plus flow decomposition into weighted paths."""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import simplex
from .graph import Instance, Mode, PathSeq

EPS = simplex.FEAS_TOL

# an arc is (edge_id, tail, head)
Arc = tuple[int, int, int]


class DecompositionError(ValueError):
    pass


@dataclass
class ArcFlow:
    instance: Instance
    flows: list[dict[Arc, float]]
    marginals: list[float]
    objective: float
    status: str = "optimal"


@dataclass
class FractionalSolution:
    marginals: list[float]
    weighted_paths: list[tuple[int, PathSeq, float]]
    congestion_limit: float = 1.0

    @property
    def objective(self) -> float:
        return float(sum(self.marginals))

    def paths_of(self, i: int) -> list[tuple[PathSeq, float]]:
        return [(p, w) for j, p, w in self.weighted_paths if j == i]

    def edge_loads(self) -> dict[int, float]:
        load: dict[int, float] = defaultdict(float)
        for _, p, w in self.weighted_paths:
            for e in p.edges:
                load[e] += w
        return dict(load)

    def node_loads(self) -> dict[int, float]:
        load: dict[int, float] = defaultdict(float)
        for _, p, w in self.weighted_paths:
            for v in set(p.nodes):
                load[v] += w
        return dict(load)


def _pair_arcs(inst: Instance, i: int) -> list[Arc]:
    g = inst.graph
    s, t = inst.pairs[i]
    others = inst.terminals - {s, t}
    arcs = []
    for e in g.live_edges():
        a, b = g.edges[e]
        if a == b or a in others or b in others:
            continue
        for u, v in ((a, b), (b, a)):
            if v == s or u == t:
                continue
            arcs.append((e, u, v))
    return arcs


def build_lp(inst: Instance):
    """Assemble ``(c, A, b, ub, columns)``; ``columns`` names each variable."""
    g = inst.graph
    k = inst.k
    columns: list[tuple] = []
    pair_arcs = [_pair_arcs(inst, i) for i in range(k)]
    for i in range(k):
        columns.extend(("arc", i, a) for a in pair_arcs[i])
    columns.extend(("x", i) for i in range(k))
    live = g.live_edges()
    if inst.mode is Mode.EDGE:
        cap_rows = {e: r for r, e in enumerate(live)}
    else:
        cap_rows = {v: r for r, v in enumerate(range(g.node_count))}
    n_cons = 0
    cons_rows: dict[tuple[int, int], int] = {}
    for i in range(k):
        nodes = {inst.pairs[i][0], inst.pairs[i][1]}
        for _, u, v in pair_arcs[i]:
            nodes.update((u, v))
        for w in sorted(nodes):
            cons_rows[(i, w)] = n_cons
            n_cons += 1
    n_cap = len(cap_rows)
    n_struct = len(columns)
    # capacity slacks follow the structural columns
    n_var = n_struct + n_cap
    A = np.zeros((n_cons + n_cap, n_var))
    b = np.zeros(n_cons + n_cap)
    ub = np.ones(n_var)
    ub[n_struct:] = np.inf
    c = np.zeros(n_var)
    for col, name in enumerate(columns):
        if name[0] == "arc":
            _, i, (e, u, v) = name
            A[cons_rows[(i, u)], col] += 1.0
            A[cons_rows[(i, v)], col] -= 1.0
            if inst.mode is Mode.EDGE:
                A[n_cons + cap_rows[e], col] = 1.0
            else:
                A[n_cons + cap_rows[v], col] = 1.0
        else:
            _, i = name
            s, t = inst.pairs[i]
            c[col] = 1.0
            A[cons_rows[(i, s)], col] -= 1.0
            A[cons_rows[(i, t)], col] += 1.0
            if inst.mode is Mode.NODE:
                # throughput of the source node: the split-node internal arc for s
                A[n_cons + cap_rows[s], col] = 1.0
    for r in range(n_cap):
        A[n_cons + r, n_struct + r] = 1.0
        b[n_cons + r] = 1.0
    return c, A, b, ub, columns


def solve_lp(inst: Instance, max_iter: int | None = None) -> ArcFlow:
    """Optimal arc flow for the relaxation; returned flows carry no circulations."""
    if inst.k == 0:
        return ArcFlow(inst, [], [], 0.0)
    c, A, b, ub, columns = build_lp(inst)
    res = simplex.solve(c, A, b, ub, max_iter=max_iter)
    flows: list[dict[Arc, float]] = [dict() for _ in range(inst.k)]
    marginals = [0.0] * inst.k
    for col, name in enumerate(columns):
        val = float(res.x[col])
        if val < EPS:
            continue
        if name[0] == "arc":
            flows[name[1]][name[2]] = val
        else:
            marginals[name[1]] = min(val, 1.0)
    for i in range(inst.k):
        _cancel_cycles(flows[i])
    return ArcFlow(inst, flows, marginals, float(sum(marginals)), res.status)


def lp_value(inst: Instance) -> float:
    return solve_lp(inst).objective


def _find_cycle(flow: dict[Arc, float]) -> list[Arc] | None:
    out: dict[int, list[Arc]] = defaultdict(list)
    for arc in sorted(flow):
        out[arc[1]].append(arc)
    color: dict[int, int] = {}
    for root in sorted(out):
        if root in color:
            continue
        stack = [(root, iter(out[root]))]
        on_path: list[Arc] = []
        color[root] = 1
        while stack:
            v, it = stack[-1]
            arc = next(it, None)
            if arc is None:
                color[v] = 2
                stack.pop()
                if on_path:
                    on_path.pop()
                continue
            w = arc[2]
            if color.get(w) == 1:
                # back edge closes a cycle
                cyc = [arc]
                for a in reversed(on_path):
                    cyc.append(a)
                    if a[1] == w:
                        break
                return cyc
            if w not in color:
                color[w] = 1
                on_path.append(arc)
                stack.append((w, iter(out.get(w, []))))
    return None


def _cancel_cycles(flow: dict[Arc, float]) -> None:
    while True:
        cyc = _find_cycle(flow)
        if cyc is None:
            return
        delta = min(flow[a] for a in cyc)
        for a in cyc:
            flow[a] -= delta
            if flow[a] < EPS:
                del flow[a]


def _widest_path(flow: dict[Arc, float], s: int, t: int) -> list[Arc] | None:
    out: dict[int, list[Arc]] = defaultdict(list)
    for arc in sorted(flow):
        out[arc[1]].append(arc)
    best = {s: float("inf")}
    via: dict[int, Arc] = {}
    heap = [(-float("inf"), s)]
    done = set()
    while heap:
        negw, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == t:
            break
        for arc in out.get(v, []):
            w = arc[2]
            width = min(-negw, flow[arc])
            if w not in done and width > best.get(w, 0.0):
                best[w] = width
                via[w] = arc
                heapq.heappush(heap, (-width, w))
    if t not in done:
        return None
    path = []
    v = t
    while v != s:
        arc = via[v]
        path.append(arc)
        v = arc[1]
    return path[::-1]


def decompose_paths(af: ArcFlow) -> FractionalSolution:
    """Split each pair's flow into s-t paths by repeatedly taking a widest path."""
    inst = af.instance
    weighted: list[tuple[int, PathSeq, float]] = []
    marginals = []
    for i, (s, t) in enumerate(inst.pairs):
        flow = {a: f for a, f in af.flows[i].items() if f >= EPS}
        _check_conservation(flow, s, t, af.marginals[i], i)
        total = 0.0
        while True:
            arcs = _widest_path(flow, s, t)
            if arcs is None:
                break
            w = min(flow[a] for a in arcs)
            if w < EPS:
                break
            nodes = (s,) + tuple(a[2] for a in arcs)
            weighted.append((i, PathSeq(nodes, tuple(a[0] for a in arcs)), w))
            total += w
            for a in arcs:
                flow[a] -= w
                if flow[a] < EPS:
                    del flow[a]
        # whatever is left is circulation; dropping it keeps every constraint satisfied
        marginals.append(total)
    return FractionalSolution(marginals, weighted)


def _check_conservation(flow: dict[Arc, float], s: int, t: int, value: float, i: int) -> None:
    net: dict[int, float] = defaultdict(float)
    for (_, u, v), f in flow.items():
        net[u] += f
        net[v] -= f
    tol = EPS * max(10, len(flow))
    for v, x in net.items():
        want = value if v == s else -value if v == t else 0.0
        if abs(x - want) > tol:
            raise DecompositionError(
                f"pair {i}: conservation violated at node {v} (net {x:.3g}, expected {want:.3g})")


def recompose(sol: FractionalSolution, inst: Instance) -> list[dict[Arc, float]]:
    """Arc flows implied by a path decomposition (inverse of ``decompose_paths``)."""
    flows: list[dict[Arc, float]] = [defaultdict(float) for _ in range(inst.k)]
    for i, p, w in sol.weighted_paths:
        for e, u, v in zip(p.edges, p.nodes, p.nodes[1:]):
            flows[i][(e, u, v)] += w
    return [dict(f) for f in flows]


def fractional_lp(inst: Instance) -> FractionalSolution:
    return decompose_paths(solve_lp(inst))
