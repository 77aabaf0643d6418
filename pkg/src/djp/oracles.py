"""Brute-force ground truth for small instances.

Both entry points work on the leaf-normalized form of the instance (normalizing
preserves the optimum) and translate the witness back.  The search is plain
backtracking over simple paths, kept deliberately simple; the prunes only
discard branches that provably cannot complete.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .graph import Instance, Mode, PathSeq, Routing, denormalize_routing, normalize_instance

MAX_CORE_NODES = 14
MAX_PAIRS = 6


class GuardExceeded(RuntimeError):
    """Instance too large for exhaustive search without ``force``."""


@dataclass
class OracleResult:
    value: int
    routing: Routing


def core_size(inst: Instance) -> int:
    """Node count ignoring terminal leaves (they never branch the search)."""
    leaves = {v for v in inst.terminals if inst.graph.degree(v) == 1}
    return inst.graph.node_count - len(leaves)


def _check_guard(inst: Instance, pairs: int, force: bool, max_nodes: int, max_pairs: int) -> None:
    if force:
        return
    n = core_size(inst)
    if n > max_nodes or pairs > max_pairs:
        raise GuardExceeded(
            f"instance has {n} core nodes and {pairs} pairs; guard is {max_nodes}/{max_pairs} "
            "(pass force=True to override)")


def _prepare(inst: Instance) -> tuple[Instance, bool]:
    if inst.is_normalized():
        return inst, False
    return normalize_instance(inst), True


class _Search:
    def __init__(self, inst: Instance):
        self.inst = inst
        self.g = inst.graph
        self.edge_mode = inst.mode is Mode.EDGE
        self.used_edges: set[int] = set()
        self.used_nodes: set[int] = set()
        # for a terminal leaf, the node it hangs from
        self.anchor = {}
        for v in inst.terminals:
            (w, _), = self.g.incidence[v]
            self.anchor[v] = w
        self.pending: set[int] = set()

    # ---- pruning helpers

    def _demand(self, w: int) -> int:
        """Core edges at ``w`` still owed to unrouted pairs hanging from ``w``."""
        d = 0
        for i in self.pending:
            s, t = self.inst.pairs[i]
            a, b = self.anchor[s], self.anchor[t]
            if a == b:
                continue
            d += (a == w) + (b == w)
        return d

    def _free_core(self, w: int) -> int:
        return sum(1 for x, e in self.g.incidence[w]
                   if e not in self.used_edges and x not in self.anchor)

    def _can_pass(self, v: int, w: int, t: int) -> bool:
        if self.edge_mode:
            spent = (v not in self.anchor) + (self.anchor[t] != w)
            return self._free_core(w) - spent >= self._demand(w)
        return not any(w in (self.anchor[self.inst.pairs[i][0]], self.anchor[self.inst.pairs[i][1]])
                       for i in self.pending)

    def _reachable(self, s: int, t: int) -> bool:
        seen = {s}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if v == t:
                return True
            for w, e in self.g.incidence[v]:
                if w in seen:
                    continue
                if self.edge_mode and e in self.used_edges:
                    continue
                if not self.edge_mode and w in self.used_nodes:
                    continue
                seen.add(w)
                queue.append(w)
        return False

    def _consistent(self) -> bool:
        for i in self.pending:
            s, t = self.inst.pairs[i]
            if not self._reachable(s, t):
                return False
        if self.edge_mode:
            touched = {self.anchor[v] for i in self.pending for v in self.inst.pairs[i]}
            return all(self._free_core(w) >= self._demand(w) for w in touched)
        return True

    # ---- backtracking

    def route_all(self, order: list[int]) -> list[tuple[int, PathSeq]] | None:
        self.pending = set(order)
        if not self._consistent():
            return None
        return self._route(order, 0, [])

    def _route(self, order, pos, acc):
        if pos == len(order):
            return list(acc)
        i = order[pos]
        s, t = self.inst.pairs[i]
        self.pending.discard(i)
        for path in self._paths(s, t):
            acc.append((i, path))
            if self._consistent():
                found = self._route(order, pos + 1, acc)
                if found is not None:
                    self._release(path)
                    self.pending.add(i)
                    return found
            acc.pop()
            self._release(path)
        self.pending.add(i)
        return None

    def _release(self, path: PathSeq) -> None:
        self.used_edges.difference_update(path.edges)
        self.used_nodes.difference_update(path.nodes)

    def _paths(self, s: int, t: int):
        """Yield simple s-t paths in the residual graph; the yielded path stays claimed
        until the caller releases it."""
        nodes = [s]
        edges: list[int] = []
        on_path = {s}
        self.used_nodes.add(s)

        def extend(v):
            for w, e in self.g.incidence[v]:
                if w in on_path or e in self.used_edges:
                    continue
                if not self.edge_mode and w in self.used_nodes:
                    continue
                if w in self.anchor and w != t:
                    continue
                if w != t and not self._can_pass(v, w, t):
                    continue
                nodes.append(w)
                edges.append(e)
                on_path.add(w)
                self.used_edges.add(e)
                self.used_nodes.add(w)
                if w == t:
                    yield PathSeq(tuple(nodes), tuple(edges))
                    # the caller released everything; reclaim the prefix we still stand on
                    self.used_edges.update(edges)
                    self.used_nodes.update(nodes)
                else:
                    yield from extend(w)
                nodes.pop()
                edges.pop()
                on_path.discard(w)
                self.used_edges.discard(e)
                self.used_nodes.discard(w)

        yield from extend(s)
        self.used_nodes.discard(s)


def _order(inst: Instance, subset) -> list[int]:
    # pairs whose endpoints hang from low-degree nodes first: they have the fewest options
    def key(i):
        s, t = inst.pairs[i]
        (a, _), = inst.graph.incidence[s]
        (b, _), = inst.graph.incidence[t]
        return (min(inst.graph.degree(a), inst.graph.degree(b)), i)
    return sorted(subset, key=key)


def exact_opt_fixed_subset(inst: Instance, subset, force: bool = False,
                           max_nodes: int = MAX_CORE_NODES,
                           max_pairs: int = MAX_PAIRS) -> tuple[bool, Routing | None]:
    """Can exactly the pairs in ``subset`` be routed disjointly?  Returns the witness too."""
    subset = sorted(set(subset))
    for i in subset:
        if not 0 <= i < inst.k:
            raise IndexError(f"pair index {i} out of range")
    _check_guard(inst, len(subset), force, max_nodes, max_pairs)
    norm, changed = _prepare(inst)
    found = _Search(norm).route_all(_order(norm, subset))
    if found is None:
        return False, None
    routing = Routing(tuple(found))
    if changed:
        routing = denormalize_routing(norm, inst, routing)
    return True, routing


def exact_opt(inst: Instance, force: bool = False, max_nodes: int = MAX_CORE_NODES,
              max_pairs: int = MAX_PAIRS) -> OracleResult:
    """Maximum number of simultaneously routable pairs, with a witness routing."""
    _check_guard(inst, inst.k, force, max_nodes, max_pairs)
    norm, changed = _prepare(inst)
    for size in range(norm.k, 0, -1):
        for subset in itertools.combinations(range(norm.k), size):
            found = _Search(norm).route_all(_order(norm, subset))
            if found is not None:
                routing = Routing(tuple(found))
                if changed:
                    routing = denormalize_routing(norm, inst, routing)
                return OracleResult(size, routing)
    return OracleResult(0, Routing())
