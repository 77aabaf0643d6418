"""Graphs, instances, routings and the feasibility checker.

Nodes are integers ``0..node_count-1``.  Edges live in an append-only list so
an edge id is simply its position; contraction tombstones edges instead of
renumbering them, which keeps paths that refer to edge ids valid.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence


class Mode(str, Enum):
    EDGE = "edp"
    NODE = "ndp"


@dataclass(frozen=True)
class Graph:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    deleted: frozenset[int] = frozenset()

    def __post_init__(self):
        if not 0 <= self.node_count < 2**31:
            raise ValueError(f"node_count out of range: {self.node_count}")
        for eid, (a, b) in enumerate(self.edges):
            if eid in self.deleted:
                continue
            if not (0 <= a < self.node_count and 0 <= b < self.node_count):
                raise ValueError(f"edge {eid}=({a},{b}) has an endpoint outside [0,{self.node_count})")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(node_count, tuple((int(a), int(b)) for a, b in edges))

    def live_edges(self) -> list[int]:
        return [e for e in range(len(self.edges)) if e not in self.deleted]

    @property
    def edge_count(self) -> int:
        return len(self.edges) - len(self.deleted)

    def is_live(self, e: int) -> bool:
        return 0 <= e < len(self.edges) and e not in self.deleted

    @cached_property
    def incidence(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node, the ``(neighbor, edge_id)`` pairs of its live edges, ordered by edge id."""
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for e, (a, b) in enumerate(self.edges):
            if e in self.deleted:
                continue
            inc[a].append((b, e))
            if a != b:
                inc[b].append((a, e))
        return tuple(tuple(x) for x in inc)

    def neighbors(self, v: int) -> list[int]:
        return sorted({w for w, _ in self.incidence[v]})

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def other_end(self, e: int, v: int) -> int:
        a, b = self.edges[e]
        if v == a:
            return b
        if v == b:
            return a
        raise ValueError(f"node {v} is not an endpoint of edge {e}")

    def add_nodes(self, count: int) -> "Graph":
        return Graph(self.node_count + count, self.edges, self.deleted)

    def add_edges(self, new_edges: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.node_count, self.edges + tuple((a, b) for a, b in new_edges), self.deleted)

    def without_nodes(self, removed: Iterable[int]) -> "Graph":
        """Same node ids; every edge touching ``removed`` is tombstoned."""
        gone = set(removed)
        dead = set(self.deleted)
        for e, (a, b) in enumerate(self.edges):
            if a in gone or b in gone:
                dead.add(e)
        return Graph(self.node_count, self.edges, frozenset(dead))

    def components(self, ignore: Iterable[int] = ()) -> list[int]:
        """Component label per node (``-1`` for ignored nodes); labels are smallest member ids."""
        skip = set(ignore)
        label = [-1] * self.node_count
        for start in range(self.node_count):
            if start in skip or label[start] != -1:
                continue
            label[start] = start
            stack = [start]
            while stack:
                v = stack.pop()
                for w, _ in self.incidence[v]:
                    if w not in skip and label[w] == -1:
                        label[w] = start
                        stack.append(w)
        return label

    def is_forest(self, removed: Iterable[int] = ()) -> bool:
        """Cycle test on ``G - removed`` (self-loops and parallel edges count as cycles)."""
        gone = set(removed)
        parent = list(range(self.node_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e, (a, b) in enumerate(self.edges):
            if e in self.deleted or a in gone or b in gone:
                continue
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True


@dataclass(frozen=True)
class PathSeq:
    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path needs exactly one more node than edges")

    @classmethod
    def from_nodes(cls, g: Graph, nodes: Sequence[int]) -> "PathSeq":
        """Build a path by picking, for each hop, the lowest live edge id joining the two nodes."""
        edges = []
        for a, b in zip(nodes, nodes[1:]):
            cands = [e for w, e in g.incidence[a] if w == b]
            if not cands:
                raise ValueError(f"no live edge between {a} and {b}")
            edges.append(min(cands))
        return cls(tuple(nodes), tuple(edges))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def reversed(self) -> "PathSeq":
        return PathSeq(self.nodes[::-1], self.edges[::-1])

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def loop_erased(self) -> "PathSeq":
        """Chronological loop erasure: the result uses a subset of this walk's edges."""
        nodes = [self.nodes[0]]
        edges: list[int] = []
        pos = {self.nodes[0]: 0}
        for e, w in zip(self.edges, self.nodes[1:]):
            if w in pos:
                cut = pos[w]
                for dropped in nodes[cut + 1:]:
                    del pos[dropped]
                del nodes[cut + 1:]
                del edges[cut:]
            else:
                pos[w] = len(nodes)
                nodes.append(w)
                edges.append(e)
        return PathSeq(tuple(nodes), tuple(edges))


@dataclass(frozen=True)
class Instance:
    graph: Graph
    pairs: tuple[tuple[int, int], ...]
    mode: Mode = Mode.EDGE
    # origin[v] = node of the instance this one was normalized from (identity if not normalized)
    origin: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "pairs", tuple((int(s), int(t)) for s, t in self.pairs))
        n = self.graph.node_count
        for i, (s, t) in enumerate(self.pairs):
            if not (0 <= s < n and 0 <= t < n):
                raise ValueError(f"pair {i} = ({s},{t}) references a missing node")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def terminals(self) -> set[int]:
        return {v for p in self.pairs for v in p}

    def is_normalized(self) -> bool:
        seen: Counter[int] = Counter(v for p in self.pairs for v in p)
        if any(c != 1 for c in seen.values()):
            return False
        return all(self.graph.degree(v) == 1 for v in seen) and all(s != t for s, t in self.pairs)

    def with_pairs(self, pairs: Iterable[tuple[int, int]]) -> "Instance":
        return Instance(self.graph, tuple(pairs), self.mode, self.origin)


@dataclass(frozen=True)
class Routing:
    entries: tuple[tuple[int, PathSeq], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda x: x[0])))
        idx = [i for i, _ in self.entries]
        if len(idx) != len(set(idx)):
            raise ValueError("a pair index is routed twice")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def pair_indices(self) -> list[int]:
        return [i for i, _ in self.entries]

    def path_for(self, i: int) -> PathSeq | None:
        for j, p in self.entries:
            if j == i:
                return p
        return None


@dataclass
class RoutingReport:
    feasible: bool
    max_edge_congestion: int
    max_node_congestion: int
    violations: list[str] = field(default_factory=list)


def edge_loads(paths: Iterable[PathSeq]) -> Counter[int]:
    load: Counter[int] = Counter()
    for p in paths:
        load.update(p.edges)
    return load


def node_loads(paths: Iterable[PathSeq]) -> Counter[int]:
    load: Counter[int] = Counter()
    for p in paths:
        load.update(set(p.nodes))
    return load


def verify_routing(inst: Instance, routing: Routing, congestion_cap: int = 1) -> RoutingReport:
    """Check a routing; every problem becomes a message in ``violations``."""
    if congestion_cap < 1:
        raise ValueError("congestion_cap must be positive")
    g = inst.graph
    violations = []
    good_paths = []
    for i, path in routing.entries:
        if not 0 <= i < inst.k:
            violations.append(f"pair index {i} out of range")
            continue
        s, t = inst.pairs[i]
        ok = True
        if len(path.nodes) != len(path.edges) + 1:
            violations.append(f"pair {i}: node/edge count mismatch")
            continue
        if {path.source, path.target} != {s, t} or (s == t):
            violations.append(f"pair {i}: path runs {path.source}->{path.target}, expected {s}->{t}")
            ok = False
        for j, e in enumerate(path.edges):
            if not g.is_live(e):
                violations.append(f"pair {i}: edge {e} is not a live edge")
                ok = False
                continue
            a, b = g.edges[e]
            u, v = path.nodes[j], path.nodes[j + 1]
            if {a, b} != {u, v} or (a == b) != (u == v):
                violations.append(f"pair {i}: edge {e}=({a},{b}) does not join {u} and {v}")
                ok = False
        if not path.is_simple():
            violations.append(f"pair {i}: path is not simple")
            ok = False
        if ok:
            good_paths.append(path)
    # congestion is measured on every path, malformed or not, so the numbers stay honest
    all_paths = [p for _, p in routing.entries]
    eload = edge_loads(all_paths)
    nload = node_loads(all_paths)
    max_e = max(eload.values(), default=0)
    max_n = max(nload.values(), default=0)
    if inst.mode is Mode.EDGE and max_e > congestion_cap:
        hot = sorted(e for e, c in eload.items() if c > congestion_cap)
        violations.append(f"edge congestion {max_e} > {congestion_cap} on edges {hot[:10]}")
    if inst.mode is Mode.NODE and max_n > congestion_cap:
        hot = sorted(v for v, c in nload.items() if c > congestion_cap)
        violations.append(f"node congestion {max_n} > {congestion_cap} at nodes {hot[:10]}")
    return RoutingReport(not violations, max_e, max_n, violations)


def normalize_instance(raw: Instance) -> Instance:
    """Give every terminal occurrence its own fresh leaf so the pairs form a matching on leaves."""
    for i, (s, t) in enumerate(raw.pairs):
        if s == t:
            raise ValueError(f"pair {i} has identical endpoints ({s},{t})")
    n = raw.graph.node_count
    base_origin = raw.origin if raw.origin is not None else tuple(range(n))
    new_edges = []
    new_pairs = []
    origin = list(base_origin)
    nxt = n
    for s, t in raw.pairs:
        ends = []
        for v in (s, t):
            new_edges.append((v, nxt))
            origin.append(base_origin[v])
            ends.append(nxt)
            nxt += 1
        new_pairs.append(tuple(ends))
    g = raw.graph.add_nodes(nxt - n).add_edges(new_edges)
    return Instance(g, tuple(new_pairs), raw.mode, tuple(origin))


def denormalize_routing(norm: Instance, raw: Instance, routing: Routing) -> Routing:
    """Map a routing on ``normalize_instance(raw)`` back to ``raw`` by stripping the leaf edges."""
    n_raw = raw.graph.node_count
    out = []
    for i, p in routing.entries:
        nodes, edges = list(p.nodes), list(p.edges)
        if nodes and nodes[0] >= n_raw:
            nodes, edges = nodes[1:], edges[1:]
        if nodes and nodes[-1] >= n_raw:
            nodes, edges = nodes[:-1], edges[:-1]
        out.append((i, PathSeq(tuple(nodes), tuple(edges))))
    return Routing(tuple(out))


def contract_edge(g: Graph, e: int) -> tuple[Graph, list[int], list[int | None]]:
    """Contract live non-loop edge ``e``; returns ``(graph, node_map, edge_map)``.

    The merged node takes the smaller endpoint's rank, later nodes shift down by one.
    Edges that become loops are tombstoned, so ``edge_map`` sends them (and ``e``) to None.
    """
    if not g.is_live(e):
        raise ValueError(f"edge {e} is not live")
    a, b = g.edges[e]
    if a == b:
        raise ValueError(f"edge {e} is a self-loop")
    keep, gone = min(a, b), max(a, b)
    node_map = [v if v < gone else v - 1 for v in range(g.node_count)]
    node_map[gone] = node_map[keep]
    new_edges = []
    dead = set(g.deleted)
    edge_map: list[int | None] = []
    for eid, (x, y) in enumerate(g.edges):
        nx_, ny = node_map[x], node_map[y]
        new_edges.append((nx_, ny))
        if eid in g.deleted:
            edge_map.append(None)
        elif eid == e or nx_ == ny:
            dead.add(eid)
            edge_map.append(None)
        else:
            edge_map.append(eid)
    return Graph(g.node_count - 1, tuple(new_edges), frozenset(dead)), node_map, edge_map
