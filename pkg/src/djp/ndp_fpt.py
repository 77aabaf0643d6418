"""Exact MaxNDP parameterized by the feedback vertex set: guess how routed pairs
thread through R, then fill a tree DP over F = G - R for everything else."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

from .fvs import fvs_exact
from .graph import Graph, Instance, Mode, PathSeq, Routing, denormalize_routing, normalize_instance

NEG = -math.inf
FREE, TBU, BLOCKED = "free", "to_be_used", "blocked"


# ---------------------------------------------------------------- structures

@dataclass(frozen=True)
class EssentialStructure:
    """Routed pairs and, per routed pair, the ordered feedback nodes its path visits."""
    chains: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @property
    def routed(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.chains)

    def essential_pairs(self, inst: Instance) -> list[tuple[int, int, int]]:
        """``(a, b, pair_index)`` per essential pair, in chain order."""
        out = []
        for i, chain in self.chains:
            s, t = inst.pairs[i]
            stops = (s, *chain, t)
            out.extend((a, b, i) for a, b in zip(stops, stops[1:]))
        return out

    def is_valid(self, inst: Instance, R) -> bool:
        seen: set[int] = set()
        idx = set()
        for i, chain in self.chains:
            if i in idx or not chain or not 0 <= i < inst.k:
                return False
            idx.add(i)
            for x in chain:
                if x not in R or x in seen:
                    return False
                seen.add(x)
        return True


def _chains(pool: list[int]) -> Iterator[tuple[int, ...]]:
    for size in range(1, len(pool) + 1):
        for sub in itertools.combinations(pool, size):
            yield from itertools.permutations(sub)


def enumerate_essential_structures(inst: Instance, R) -> Iterator[EssentialStructure]:
    """Every chain structure over ``R``, lazily; the empty structure comes first."""
    R = sorted(R)

    def rec(i: int, free: tuple[int, ...], acc: tuple):
        if i == inst.k:
            yield EssentialStructure(acc)
            return
        yield from rec(i + 1, free, acc)
        for chain in _chains(list(free)):
            rest = tuple(x for x in free if x not in chain)
            yield from rec(i + 1, rest, acc + ((i, chain),))

    yield from rec(0, tuple(R), ())


def structure_count_bound(k: int, r: int) -> int:
    return (2 * k + r + 1) ** (2 * r)


# ---------------------------------------------------------------- preprocessing

@dataclass
class Prepared:
    inst: Instance                   # the normalized node-disjoint instance
    graph: Graph                     # subdivided graph plus the dummy root
    R: frozenset[int]
    root: int
    children: dict[int, list[int]]
    parent: dict[int, int]
    top_of: dict[int, int]           # forest node -> top node of its tree (a child of root)
    r_nbrs: dict[int, frozenset[int]]
    touch: dict[int, frozenset[int]]  # terminal or R node -> tops of the trees it can enter
    original: dict[int, int | None]  # prepared node -> instance node (None if added)

    @property
    def tops(self) -> list[int]:
        return self.children[self.root]


def preprocess_ndp(inst: Instance, R) -> Prepared:
    if inst.mode is not Mode.NODE:
        raise ValueError("preprocess_ndp needs a node-disjoint instance")
    if not inst.is_normalized():
        raise ValueError("instance must be leaf-normalized")
    R = frozenset(R)
    if R & inst.terminals:
        raise ValueError("feedback vertex set contains a terminal")
    g = inst.graph
    if not g.is_forest(R):
        raise ValueError("R is not a feedback vertex set")
    n = g.node_count
    edges: list[tuple[int, int]] = []
    nxt = n
    for e in g.live_edges():
        a, b = g.edges[e]
        if a in R or b in R:
            edges += [(a, nxt), (nxt, b)]
            nxt += 1
        else:
            edges.append((a, b))
    # subdivision nodes are exactly the R-neighbours now
    h = Graph.from_edges(nxt, edges)
    r_nbrs = {v: frozenset(w for w in h.neighbors(v) if w in R) for v in range(n, nxt)}
    terminals = inst.terminals
    label = h.components(ignore=R)
    comps: dict[int, list[int]] = {}
    for v in range(nxt):
        if label[v] >= 0:
            comps.setdefault(label[v], []).append(v)
    attach = []
    extra_edges: list[tuple[int, int]] = []
    for lab in sorted(comps):
        members = comps[lab]
        if len(members) == 1:
            attach.append(members[0])
            continue
        ok = [v for v in members if v not in terminals and v not in r_nbrs]
        if ok:
            attach.append(min(ok))
            continue
        # only a terminal hanging on an R-neighbour: split their edge so the root has a
        # non-leaf place to attach
        a, b = sorted(members)
        z = nxt
        nxt += 1
        edges.remove((a, b) if (a, b) in edges else (b, a))
        extra_edges += [(a, z), (z, b)]
        attach.append(z)
    edges += extra_edges
    root = nxt
    nxt += 1
    h = Graph.from_edges(nxt, edges)
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {root: sorted(attach)}
    top_of: dict[int, int] = {}
    for top in sorted(attach):
        parent[top] = root
        stack = [top]
        seen = {top}
        while stack:
            v = stack.pop()
            top_of[v] = top
            kids = sorted(w for w in h.neighbors(v) if w not in R and w not in seen)
            children[v] = kids
            for w in kids:
                seen.add(w)
                parent[w] = v
                stack.append(w)
    touch: dict[int, set[int]] = {}
    for v in terminals:
        touch[v] = {top_of[v]}
    for v, rs in r_nbrs.items():
        for x in rs:
            touch.setdefault(x, set()).add(top_of[v])
    for x in R:
        touch.setdefault(x, set())
    original = {v: (v if v < n else None) for v in range(nxt)}
    edges_with_root = edges + [(root, t) for t in attach]
    graph = Graph.from_edges(nxt, edges_with_root)
    return Prepared(inst, graph, R, root, children, parent, top_of, r_nbrs,
                    {x: frozenset(s) for x, s in touch.items()}, original)


# ---------------------------------------------------------------- tree DP

# table keys: (FREE, mask) / (BLOCKED, mask) / (TBU, mask, u)
# entries:    key -> (value, backpointer)


class _TreeDP:
    """DP over one tree of F for a fixed list of essential pairs and F-routable pairs."""

    def __init__(self, prep: Prepared, top: int, epairs: tuple[tuple[int, int], ...],
                 fpairs: tuple[tuple[int, int, int], ...]):
        self.prep = prep
        self.top = top
        self.epairs = epairs
        self.fpairs = fpairs
        self.e_index = {frozenset(p): j for j, p in enumerate(epairs)}
        self.f_index = {frozenset((s, t)): i for s, t, i in fpairs}
        self.endpoints = {x for p in epairs for x in p} | {x for s, t, _ in fpairs for x in (s, t)}
        self.tables: dict[tuple[int, int], dict] = {}
        self._run()

    def _leaf(self, v: int) -> dict:
        prep = self.prep
        tab = {(FREE, 0): (0, ("leaf", [], None)), (BLOCKED, 0): (0, ("leaf", [], None))}
        nbrs = prep.r_nbrs.get(v, frozenset())
        for j, (a, b) in enumerate(self.epairs):
            if (a in nbrs and b in nbrs and a != b) or (a == v and b in nbrs) or (b == v and a in nbrs):
                path = [x for x in (a, v, b)]
                if a == v:
                    path = [v, b]
                elif b == v:
                    path = [a, v]
                tab[(BLOCKED, 1 << j)] = (0, ("leaf", [("e", j, path)], None))
        if v in self.endpoints and v in self.prep.inst.terminals:
            tab[(TBU, 0, v)] = (0, ("leaf", [], [v]))
        for u in sorted(nbrs):
            if u in self.endpoints:
                tab[(TBU, 0, u)] = (0, ("leaf", [], [u, v]))
        return tab

    def _first(self, v: int, child: int) -> dict:
        ctab = self.tables[(child, len(self.prep.children[child]))]
        tab = {}
        for key, (val, _) in ctab.items():
            if key[0] == TBU:
                tab[key] = (val, ("child", key))
            elif key[0] == BLOCKED:
                tab[(BLOCKED, key[1])] = (val, ("child", key))
                tab[(FREE, key[1])] = (val, ("child", key))
        return tab

    def _combine(self, v: int, prev: dict, ctab: dict) -> dict:
        tab: dict = {}

        def put(key, val, bp):
            old = tab.get(key)
            if old is None or val > old[0]:
                tab[key] = (val, bp)

        for pk, (pv, _) in prev.items():
            m1 = pk[1]
            for ck, (cv, _) in ctab.items():
                m2 = ck[1]
                if m1 & m2:
                    continue
                m = m1 | m2
                total = pv + cv
                if pk[0] == FREE and ck[0] == BLOCKED:
                    put((FREE, m), total, ("comb", pk, ck, "plain"))
                if pk[0] == TBU and ck[0] == BLOCKED:
                    put((TBU, m, pk[2]), total, ("comb", pk, ck, "left"))
                if pk[0] == FREE and ck[0] == TBU:
                    put((TBU, m, ck[2]), total, ("comb", pk, ck, "child"))
                if pk[0] == BLOCKED and ck[0] == BLOCKED:
                    put((BLOCKED, m), total, ("comb", pk, ck, "plain"))
                if pk[0] == TBU and ck[0] == TBU:
                    ends = frozenset((pk[2], ck[2]))
                    j = self.e_index.get(ends)
                    if j is not None and not m & (1 << j):
                        put((BLOCKED, m | (1 << j)), total, ("comb", pk, ck, ("e", j)))
                    i = self.f_index.get(ends)
                    if i is not None:
                        put((BLOCKED, m), total + 1, ("comb", pk, ck, ("f", i)))
        return tab

    def _run(self) -> None:
        order = []
        stack = [self.top]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(self.prep.children[v])
        for v in reversed(order):
            kids = self.prep.children[v]
            if not kids:
                self.tables[(v, 0)] = self._leaf(v)
                continue
            self.tables[(v, 1)] = self._first(v, kids[0])
            for i in range(2, len(kids) + 1):
                c = kids[i - 1]
                self.tables[(v, i)] = self._combine(
                    v, self.tables[(v, i - 1)], self.tables[(c, len(self.prep.children[c]))])

    def root_table(self) -> dict[int, int]:
        tab = self.tables[(self.top, len(self.prep.children[self.top]))]
        return {k[1]: val for k, (val, _) in tab.items() if k[0] == BLOCKED}

    def rebuild(self, v: int, i: int, key) -> tuple[list, list | None]:
        """Completed paths ``(kind, id, nodes)`` and the open fragment for a TBU key."""
        _, bp = self.tables[(v, i)][key]
        if bp[0] == "leaf":
            return list(bp[1]), (list(bp[2]) if bp[2] is not None else None)
        if bp[0] == "child":
            c = self.prep.children[v][0]
            done, frag = self.rebuild(c, len(self.prep.children[c]), bp[1])
            return done, (frag + [v] if key[0] == TBU else None)
        _, pk, ck, kind = bp
        c = self.prep.children[v][i - 1]
        d1, f1 = self.rebuild(v, i - 1, pk)
        d2, f2 = self.rebuild(c, len(self.prep.children[c]), ck)
        done = d1 + d2
        if kind == "left":
            return done, f1
        if kind == "child":
            return done, f2 + [v]
        if kind == "plain":
            return done, None
        return done + [(kind[0], kind[1], f1 + f2[::-1])], None


# ---------------------------------------------------------------- solving one structure

@dataclass
class DPOutcome:
    value: float                      # |P_F|, or -inf when the structure is unrealizable
    paths: list[tuple[str, int, list[int]]] = field(default_factory=list)


class _Solver:
    def __init__(self, prep: Prepared):
        self.prep = prep
        self.cache: dict[tuple, _TreeDP] = {}
        # pairs whose two terminals share a tree can be routed inside F
        inst = prep.inst
        self.local_pairs: dict[int, list[tuple[int, int, int]]] = {}
        for i, (s, t) in enumerate(inst.pairs):
            if prep.top_of[s] == prep.top_of[t]:
                self.local_pairs.setdefault(prep.top_of[s], []).append((s, t, i))

    def tree(self, top, epairs, fpairs) -> _TreeDP:
        key = (top, epairs, fpairs)
        dp = self.cache.get(key)
        if dp is None:
            dp = _TreeDP(self.prep, top, epairs, fpairs)
            self.cache[key] = dp
        return dp

    def solve(self, structure: EssentialStructure, witness: bool = False) -> DPOutcome:
        prep = self.prep
        inst = prep.inst
        ess = structure.essential_pairs(inst)
        routed = structure.routed
        where: list[list[int]] = []
        for a, b, _ in ess:
            tops = sorted(prep.touch.get(a, frozenset()) & prep.touch.get(b, frozenset()))
            if not tops:
                return DPOutcome(NEG)
            where.append(tops)
        by_top: dict[int, list[int]] = {}
        for j, tops in enumerate(where):
            for t in tops:
                by_top.setdefault(t, []).append(j)
        # knapsack over the root's children: the root stays free, so each tree is blocked
        best: dict[int, tuple[float, list]] = {0: (0, [])}
        for top in prep.tops:
            js = by_top.get(top, [])
            fp = tuple(p for p in self.local_pairs.get(top, []) if p[2] not in routed)
            if not js and not fp:
                continue
            epairs = tuple((ess[j][0], ess[j][1]) for j in js)
            dp = self.tree(top, epairs, fp)
            table = dp.root_table()
            nxt: dict[int, tuple[float, list]] = {}
            for gm, (gv, gch) in best.items():
                for lm, lv in table.items():
                    mapped = 0
                    for b in range(len(js)):
                        if lm >> b & 1:
                            mapped |= 1 << js[b]
                    if mapped & gm:
                        continue
                    m = gm | mapped
                    val = gv + lv
                    if m not in nxt or val > nxt[m][0]:
                        nxt[m] = (val, gch + [(dp, lm, js)])
            best = nxt
        full = (1 << len(ess)) - 1
        if full not in best:
            return DPOutcome(NEG)
        value, choice = best[full]
        if not witness:
            return DPOutcome(value)
        paths = []
        for dp, lm, js in choice:
            done, _ = dp.rebuild(dp.top, len(prep.children[dp.top]), (BLOCKED, lm))
            for kind, idx, nodes in done:
                paths.append((kind, js[idx] if kind == "e" else idx, nodes))
        return DPOutcome(value, paths)


def dp_solve(prep: Prepared, structure: EssentialStructure) -> float:
    return _Solver(prep).solve(structure).value


# ---------------------------------------------------------------- driver

@dataclass
class NDPResult:
    value: int
    routing: Routing
    structure: EssentialStructure
    structures_tried: int
    r: int


def _assemble(prep: Prepared, structure: EssentialStructure, out: DPOutcome) -> Routing:
    inst = prep.inst
    ess = structure.essential_pairs(inst)
    seg = {}
    entries = []
    for kind, idx, nodes in out.paths:
        if kind == "e":
            seg[idx] = nodes
        else:
            entries.append((idx, nodes))
    j = 0
    for i, chain in structure.chains:
        walk: list[int] = []
        for _ in range(len(chain) + 1):
            a, b, _ = ess[j]
            piece = seg[j] if seg[j][0] == a else seg[j][::-1]
            walk = walk + (piece if not walk else piece[1:])
            j += 1
        entries.append((i, walk))
    out_entries = []
    for i, nodes in entries:
        s, t = inst.pairs[i]
        real = [prep.original[v] for v in nodes if prep.original[v] is not None]
        if real[0] != s:
            real.reverse()
        out_entries.append((i, PathSeq.from_nodes(inst.graph, real)))
    return Routing(tuple(out_entries))


def maxndp_fpt(inst: Instance, R=None, upper_bound: int | None = None) -> NDPResult:
    """Maximum node-disjoint routing with a witness.

    Structures are explored by branch and bound: pairs are decided in index order, and a
    branch is cut once even routing every undecided pair cannot beat the best value.
    """
    if inst.mode is not Mode.NODE:
        raise ValueError("maxndp_fpt needs a node-disjoint instance")
    norm = inst if inst.is_normalized() else normalize_instance(inst)
    if R is None:
        R = fvs_exact(norm.graph).nodes
    R = frozenset(R) - norm.terminals
    prep = preprocess_ndp(norm, R)
    solver = _Solver(prep)
    k = norm.k
    cap = k if upper_bound is None else min(k, upper_bound)
    local = {i for i, (s, t) in enumerate(norm.pairs) if prep.top_of[s] == prep.top_of[t]}

    def can_enter(x, y):
        return bool(prep.touch.get(x, frozenset()) & prep.touch.get(y, frozenset()))

    def chains_for(i, free):
        s, t = norm.pairs[i]
        # grow chains hop by hop along realizable essential pairs
        def grow(path, left):
            last = path[-1] if path else s
            for x in left:
                if can_enter(last, x):
                    nxt = path + (x,)
                    if can_enter(x, t):
                        yield nxt
                    yield from grow(nxt, tuple(y for y in left if y != x))
        yield from grow((), free)

    best_val = -1
    best = (EssentialStructure(), DPOutcome(NEG))
    tried = 0

    def rec(i, free, acc, routed_count, optional):
        nonlocal best_val, best, tried
        if best_val >= cap:
            return
        if routed_count + optional + (k - i) <= best_val:
            return
        if i == k:
            st = EssentialStructure(acc)
            tried += 1
            out = solver.solve(st)
            if out.value == NEG:
                return
            val = routed_count + int(out.value)
            if val > best_val:
                best_val = val
                best = (st, out)
            return
        for chain in chains_for(i, free):
            rest = tuple(x for x in free if x not in chain)
            rec(i + 1, rest, acc + ((i, chain),), routed_count + 1, optional)
            if best_val >= cap:
                return
        rec(i + 1, free, acc, routed_count, optional + (1 if i in local else 0))

    rec(0, tuple(sorted(R)), (), 0, 0)
    structure, _ = best
    out = solver.solve(structure, witness=True)
    routing = _assemble(prep, structure, out)
    if len(routing) != best_val:
        raise AssertionError(f"witness has {len(routing)} paths, DP promised {best_val}")
    if norm is not inst:
        routing = denormalize_routing(norm, inst, routing)
    return NDPResult(best_val, routing, structure, tried, len(R))
