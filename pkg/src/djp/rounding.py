"""Bi-criteria rounding for MaxEDP: hot-spot flow aggregation followed by
randomized rounding, plus the bookkeeping the congestion analysis talks about."""
from __future__ import annotations

import math
import random
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field

from .fvs import fvs_auto
from .graph import (Graph, Instance, Mode, PathSeq, Routing, denormalize_routing, edge_loads,
                    normalize_instance)
from .mcf import EPS, FractionalSolution, fractional_lp


def augment_fvs_with_terminals(inst: Instance, R) -> frozenset[int]:
    return frozenset(R) | frozenset(inst.terminals)


# ---------------------------------------------------------------- subpaths

@dataclass(frozen=True)
class Subpath:
    path: int       # index into the weighted path list
    start: int      # position of the first R+ node in the walk
    end: int        # position of the next R+ node
    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    weight: float

    @property
    def interior(self) -> tuple[int, ...]:
        return self.nodes[1:-1]

    @property
    def ends(self) -> frozenset[int]:
        return frozenset((self.nodes[0], self.nodes[-1]))

    @property
    def key(self) -> tuple:
        """Direction-free identity: a subpath and its reverse are the same subpath."""
        fwd = (self.nodes, self.edges)
        rev = (self.nodes[::-1], self.edges[::-1])
        return min(fwd, rev)


@dataclass
class SubpathIndex:
    r_plus: frozenset[int]
    paths: list[tuple[int, PathSeq, float]]
    visits: list[list[int]]          # per path, positions of its R+ visits
    subpaths: list[Subpath]

    def of_path(self, p: int) -> list[Subpath]:
        return [sp for sp in self.subpaths if sp.path == p]


def build_subpath_index(sol: FractionalSolution, r_plus) -> SubpathIndex:
    r_plus = frozenset(r_plus)
    paths = list(sol.weighted_paths)
    visits = []
    subs = []
    for idx, (_, p, w) in enumerate(paths):
        if p.nodes[0] not in r_plus or p.nodes[-1] not in r_plus:
            raise ValueError(f"path {idx} does not start and end in R+")
        pos = [j for j, v in enumerate(p.nodes) if v in r_plus]
        visits.append(pos)
        for a, b in zip(pos, pos[1:]):
            subs.append(Subpath(idx, a, b, p.nodes[a:b + 1], p.edges[a:b], w))
    return SubpathIndex(r_plus, paths, visits, subs)


# ---------------------------------------------------------------- aggregation

@dataclass
class Forest:
    """F = G - R+ with one root per tree (its smallest node) and BFS depths."""
    label: list[int]
    depth: dict[int, int]
    roots: list[int]


def _forest(g: Graph, r_plus) -> Forest:
    label = g.components(ignore=r_plus)
    roots = sorted({x for x in label if x >= 0})
    depth: dict[int, int] = {}
    for root in roots:
        depth[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, _ in g.incidence[v]:
                if label[w] == root and w not in depth:
                    depth[w] = depth[v] + 1
                    queue.append(w)
    return Forest(label, depth, roots)


@dataclass
class Reroute:
    pivot: tuple[int, ...]      # node sequence of the subpath receiving flow
    donor: int                  # donor path index (before re-indexing)
    new_path: int               # index of P'' after the operation
    amount: float


@dataclass
class HotSpotState:
    instance: Instance
    r_plus: frozenset[int]
    forest: Forest
    hot_spots: list[int]
    # unordered endpoint pair of the subpath that defined each hot spot
    hot_spot_ends: list[frozenset[int]]
    solution: FractionalSolution
    audit: list[Reroute] = field(default_factory=list)

    def index(self) -> SubpathIndex:
        return build_subpath_index(self.solution, self.r_plus)


class AggregationError(AssertionError):
    pass


def _highest(sp: Subpath, forest: Forest) -> int:
    return min(sp.interior, key=lambda v: (forest.depth[v], v))


def aggregate_flow(inst: Instance, sol: FractionalSolution, r_plus) -> HotSpotState:
    """Reroute flow onto pivot subpaths tree by tree until every subpath holds a hot spot."""
    r_plus = frozenset(r_plus)
    g = inst.graph
    if not g.is_forest(r_plus):
        raise ValueError("R+ is not a feedback vertex set")
    forest = _forest(g, r_plus)
    paths = [[i, p, w] for i, p, w in sol.weighted_paths if w > 0]
    H: set[int] = set()
    order: list[int] = []
    ends_log: list[frozenset[int]] = []
    audit: list[Reroute] = []

    def index() -> list[Subpath]:
        cur = FractionalSolution(sol.marginals, [tuple(x) for x in paths])
        return build_subpath_index(cur, r_plus).subpaths

    def clean(sp: Subpath) -> bool:
        return not any(v in H for v in sp.interior)

    for root in forest.roots:
        while True:
            subs = index()
            cands = [sp for sp in subs
                     if sp.interior and forest.label[sp.interior[0]] == root and clean(sp)]
            if not cands:
                break
            pivot = min(cands, key=lambda sp: (-forest.depth[_highest(sp, forest)], sp.key))
            key = pivot.key
            u, v = pivot.nodes[0], pivot.nodes[-1]
            while True:
                fJ = sum(sp.weight for sp in subs if sp.key == key)
                if fJ > 1 + EPS:
                    raise AggregationError(f"identical subpaths carry {fJ:.9f} > 1")
                if fJ >= 1 - EPS:
                    break
                donors = [sp for sp in subs
                          if sp.ends == pivot.ends and sp.key != key and clean(sp)]
                if not donors:
                    break
                donor = min(donors, key=lambda sp: (sp.path, sp.start))
                audit.append(_reroute(paths, donor, pivot, fJ))
                subs = index()
            h = _highest(pivot, forest)
            H.add(h)
            order.append(h)
            ends_log.append(frozenset((u, v)))
    out = FractionalSolution(list(sol.marginals), [tuple(x) for x in paths], congestion_limit=2.0)
    return HotSpotState(inst, r_plus, forest, order, ends_log, out, audit)


def _reroute(paths: list[list], donor: Subpath, pivot: Subpath, fJ: float) -> Reroute:
    pair, walk, weight = paths[donor.path]
    if walk.nodes[donor.start] == pivot.nodes[0]:
        seg = PathSeq(pivot.nodes, pivot.edges)
    else:
        seg = PathSeq(pivot.nodes[::-1], pivot.edges[::-1])
    nodes = walk.nodes[:donor.start] + seg.nodes + walk.nodes[donor.end + 1:]
    edges = walk.edges[:donor.start] + seg.edges + walk.edges[donor.end:]
    new_walk = PathSeq(nodes, edges)
    moved = min(weight, 1.0 - fJ)
    if weight - moved < EPS:
        moved = weight
    paths[donor.path][2] = weight - moved
    target = None
    for j, (q, w2, _) in enumerate(paths):
        if q == pair and w2 == new_walk:
            target = j
            break
    if target is None:
        paths.append([pair, new_walk, moved])
        target = len(paths) - 1
    else:
        paths[target][2] += moved
    record = Reroute(pivot.nodes, donor.path, target, moved)
    # drop emptied paths; indices shift, so the next index() call rebuilds everything
    if paths[donor.path][2] <= 0:
        del paths[donor.path]
        if target > donor.path:
            record.new_path = target - 1
    return record


def fractional_edge_congestion(sol: FractionalSolution) -> dict[int, float]:
    """Per-edge load counting every traversal of a walk."""
    return sol.edge_loads()


def uncovered_subpaths(state: HotSpotState) -> list[Subpath]:
    """Subpaths with a forest interior but no hot spot (empty after a correct run).

    Subpaths with no interior join two R+ nodes directly and cannot hold a forest node.
    """
    H = set(state.hot_spots)
    return [sp for sp in state.index().subpaths
            if sp.interior and not any(v in H for v in sp.interior)]


def extend_hotspots_for_analysis(state: HotSpotState, r_plus=None) -> set[int]:
    """Add branching nodes of the forest spanned by hot spots, then R+."""
    r_plus = state.r_plus if r_plus is None else frozenset(r_plus)
    g = state.instance.graph
    H = set(state.hot_spots)
    # F' = union of tree paths between hot spots = each tree pruned down to its hot spots
    adj: dict[int, set[int]] = defaultdict(set)
    for e in g.live_edges():
        a, b = g.edges[e]
        if a in r_plus or b in r_plus or a == b:
            continue
        adj[a].add(b)
        adj[b].add(a)
    alive = set(adj) | H
    deg = {v: len(adj[v]) for v in alive}
    stack = [v for v in alive if deg[v] <= 1 and v not in H]
    while stack:
        v = stack.pop()
        if v not in alive:
            continue
        alive.discard(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] <= 1 and w not in H:
                    stack.append(w)
    branching = {v for v in alive if deg[v] >= 3}
    return H | branching | set(r_plus)


# ---------------------------------------------------------------- rounding

def congestion_bound(k: int, r: int, c_const: float) -> int:
    if k < 0 or r < 0 or c_const <= 0:
        raise ValueError("need k, r >= 0 and c_const > 0")
    kappa = max(k * max(r, 1), 4)
    lk = math.log(kappa)
    return max(2, math.ceil(c_const * lk / math.log(max(math.e, lk))))


@dataclass
class RoundedRouting:
    routing: Routing            # loop-erased, simple paths
    walks: list[tuple[int, PathSeq]]
    congestion: int             # max edge load of ``routing``
    walk_loads: Counter         # per-edge load of the sampled walks

    def __len__(self):
        return len(self.routing)


def randomized_round(state: HotSpotState, seed: int) -> RoundedRouting:
    """Route pair i with probability x_i, then pick one of its paths with probability f(P)/x_i."""
    rng = random.Random(seed)
    by_pair: dict[int, list[tuple[PathSeq, float]]] = defaultdict(list)
    for i, p, w in state.solution.weighted_paths:
        by_pair[i].append((p, w))
    walks = []
    for i, x in enumerate(state.solution.marginals):
        u = rng.random()
        if u >= x or not by_pair[i]:
            continue
        options = by_pair[i]
        total = sum(w for _, w in options)
        pick = rng.random() * total
        acc = 0.0
        chosen = options[-1][0]
        for p, w in options:
            acc += w
            if pick < acc:
                chosen = p
                break
        walks.append((i, chosen))
    routing = Routing(tuple((i, p.loop_erased()) for i, p in walks))
    loads = edge_loads(p for _, p in routing.entries)
    return RoundedRouting(routing, walks, max(loads.values(), default=0),
                          edge_loads(p for _, p in walks))


def hotspots_good(state_ext: set[int], g: Graph, walk_loads: Counter, bound: int) -> bool:
    for v in state_ext:
        for _, e in g.incidence[v]:
            if walk_loads.get(e, 0) > bound:
                return False
    return True


@dataclass
class RoundResult:
    status: str                  # "ok" or "failed"
    rounded: RoundedRouting      # the successful trial, or the best one seen
    routing: Routing             # in the caller's instance numbering
    trials_used: int
    congestion_cap: int
    target: int
    r: int
    lp_value: float
    state: HotSpotState


def round_with_retries(inst: Instance, max_trials: int = 20, c_const: float = 2.0,
                       seed: int = 0, R=None) -> RoundResult:
    """FVS, LP, decomposition, aggregation, then rounding trials seeded seed, seed+1, ..."""
    if inst.mode is not Mode.EDGE:
        raise ValueError("rounding targets edge-disjoint instances")
    if max_trials < 1:
        raise ValueError("max_trials must be positive")
    norm = inst if inst.is_normalized() else normalize_instance(inst)
    if R is None:
        R = fvs_auto(norm.graph).nodes
    R = frozenset(R) - norm.terminals
    r = len(R)
    sol = fractional_lp(norm)
    state = aggregate_flow(norm, sol, augment_fvs_with_terminals(norm, R))
    lp = sol.objective
    target = math.ceil(lp / 2 - EPS)
    cap = 2 * congestion_bound(norm.k, r, c_const)
    best = None
    best_key = None
    used = 0
    status = "failed"
    for t in range(max_trials):
        used = t + 1
        rr = randomized_round(state, seed + t)
        ok = len(rr) >= target and rr.congestion <= cap
        key = (rr.congestion <= cap, len(rr), -rr.congestion)
        if best_key is None or key > best_key:
            best, best_key = rr, key
        if ok:
            best = rr
            status = "ok"
            break
    routing = best.routing
    if norm is not inst:
        routing = denormalize_routing(norm, inst, routing)
    return RoundResult(status, best, routing, used, cap, target, r, lp, state)
