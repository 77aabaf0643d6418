"""Feedback vertex sets: exact branch-and-reduce and a local-ratio 2-approximation."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph


@dataclass(frozen=True)
class FeedbackVertexSet:
    nodes: frozenset[int]
    is_exact: bool

    def __len__(self) -> int:
        return len(self.nodes)

    def is_valid(self, g: Graph) -> bool:
        return g.is_forest(self.nodes)


class BudgetExceeded(Exception):
    """The minimum feedback vertex set is larger than the allowed budget."""


# adjacency: node -> Counter(neighbor -> multiplicity); a self-loop is stored as adj[v][v]
Adj = dict[int, Counter]


def _adjacency(g: Graph) -> Adj:
    adj: Adj = {v: Counter() for v in range(g.node_count)}
    for e in g.live_edges():
        a, b = g.edges[e]
        adj[a][b] += 1
        if a != b:
            adj[b][a] += 1
    return adj


def _degree(adj: Adj, v: int) -> int:
    return sum(adj[v].values()) + adj[v][v]


def _remove(adj: Adj, v: int) -> None:
    for w in adj.pop(v):
        if w != v:
            del adj[w][v]


def _copy(adj: Adj) -> Adj:
    return {v: Counter(nb) for v, nb in adj.items()}


def _reduce(adj: Adj, forced: list[int]) -> None:
    """Apply the safe rules until none fires; nodes that must be taken go to ``forced``."""
    changed = True
    while changed:
        changed = False
        for v in sorted(adj):
            if v not in adj:
                continue
            nb = adj[v]
            if nb[v] > 0:
                forced.append(v)
                _remove(adj, v)
                changed = True
                continue
            deg = _degree(adj, v)
            if deg <= 1:
                _remove(adj, v)
                changed = True
            elif deg == 2:
                ends = sorted(nb.elements())
                _remove(adj, v)
                a, b = ends
                if a == b:
                    adj[a][a] += 1
                else:
                    adj[a][b] = min(adj[a][b] + 1, 2)
                    adj[b][a] = adj[a][b]
                changed = True


def _shortest_cycle(adj: Adj) -> list[int]:
    for v in sorted(adj):
        for w, m in sorted(adj[v].items()):
            if m >= 2:
                return [v, w]
    best: list[int] | None = None
    for root in sorted(adj):
        parent = {root: None}
        depth = {root: 0}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            if best is not None and 2 * depth[v] + 1 >= len(best):
                break
            for w in sorted(adj[v]):
                if w == parent[v]:
                    continue
                if w in depth:
                    # cycle through the lowest common ancestor of v and w
                    pv, pw = [v], [w]
                    while pv[-1] != pw[-1]:
                        if depth[pv[-1]] >= depth[pw[-1]]:
                            pv.append(parent[pv[-1]])
                        else:
                            pw.append(parent[pw[-1]])
                    cyc = pv + pw[-2::-1]
                    if best is None or len(cyc) < len(best):
                        best = cyc
                else:
                    parent[w] = v
                    depth[w] = depth[v] + 1
                    queue.append(w)
    if best is None:
        raise ValueError("graph is acyclic")
    return best


def _solve(adj: Adj, budget: int) -> list[int] | None:
    forced: list[int] = []
    _reduce(adj, forced)
    budget -= len(forced)
    if budget < 0:
        return None
    if not adj:
        return forced
    if budget == 0:
        return None
    for v in sorted(_shortest_cycle(adj)):
        sub = _copy(adj)
        _remove(sub, v)
        rest = _solve(sub, budget - 1)
        if rest is not None:
            return forced + [v] + rest
    return None


def fvs_exact(g: Graph, budget: int | None = None) -> FeedbackVertexSet:
    """Minimum feedback vertex set; raises BudgetExceeded if it is larger than ``budget``."""
    if budget is None:
        budget = g.node_count
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    adj = _adjacency(g)
    for b in range(budget + 1):
        sol = _solve(_copy(adj), b)
        if sol is not None:
            return FeedbackVertexSet(frozenset(sol), True)
    raise BudgetExceeded(f"no feedback vertex set of size <= {budget}")


def _cleanup(adj: Adj) -> None:
    stack = [v for v in adj if _degree(adj, v) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj or _degree(adj, v) > 1:
            continue
        nbs = [w for w in adj[v] if w != v]
        _remove(adj, v)
        stack.extend(w for w in nbs if _degree(adj, w) <= 1)


def _semidisjoint_cycle(adj: Adj) -> list[int] | None:
    """A cycle in which at most one node has degree above two (graph has min degree 2)."""
    for v in sorted(adj):
        if adj[v][v]:
            return [v]
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen or _degree(adj, start) != 2:
            continue
        # walk the maximal run of degree-2 nodes containing start
        run = [start]
        seen.add(start)
        ends = []
        for first in sorted(adj[start].elements()):
            prev, cur = start, first
            while cur not in seen and _degree(adj, cur) == 2:
                seen.add(cur)
                run.append(cur)
                nxt = [w for w in adj[cur].elements() if w != prev]
                prev, cur = cur, (nxt[0] if nxt else prev)
            ends.append(cur)
        if all(_degree(adj, x) == 2 for x in ends):
            return sorted(run)
        hubs = {x for x in ends if _degree(adj, x) != 2}
        if len(hubs) == 1:
            return sorted(run) + sorted(hubs)
    return None


def fvs_approx2(g: Graph) -> FeedbackVertexSet:
    """Local-ratio 2-approximation (semidisjoint-cycle / degree-weighted decomposition)."""
    adj = _adjacency(g)
    _cleanup(adj)
    weight = {v: Fraction(1) for v in adj}
    stack: list[int] = []
    while adj:
        cyc = _semidisjoint_cycle(adj)
        if cyc is not None:
            gamma = min(weight[v] for v in cyc)
            for v in cyc:
                weight[v] -= gamma
        else:
            gamma = min(weight[v] / (_degree(adj, v) - 1) for v in adj)
            for v in adj:
                weight[v] -= gamma * (_degree(adj, v) - 1)
        for v in sorted(adj):
            if weight[v] == 0:
                stack.append(v)
                _remove(adj, v)
        _cleanup(adj)
    chosen = set(stack)
    for v in reversed(stack):
        if g.is_forest(chosen - {v}):
            chosen.discard(v)
    return FeedbackVertexSet(frozenset(chosen), False)


def fvs_auto(g: Graph, exact_limit: int = 12) -> FeedbackVertexSet:
    """Exact solution when the optimum is at most ``exact_limit``, otherwise the 2-approximation."""
    try:
        return fvs_exact(g, exact_limit)
    except BudgetExceeded:
        return fvs_approx2(g)
