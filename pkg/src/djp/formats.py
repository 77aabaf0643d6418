"""Line-based text formats for instances and routings (1-indexed on disk)."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .graph import Graph, Instance, Mode, PathSeq, Routing


class FormatError(ValueError):
    pass


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_instance(text: str) -> Instance:
    header = None
    edges: list[tuple[int, int]] = []
    pairs: list[tuple[int, int]] = []
    for lineno, tok in _lines(text):
        try:
            if tok[0] == "p":
                if tok[1] != "djp" or len(tok) != 6:
                    raise FormatError(f"line {lineno}: expected 'p djp <edp|ndp> <n> <m> <k>'")
                header = (Mode(tok[2]), int(tok[3]), int(tok[4]), int(tok[5]))
            elif tok[0] == "e":
                edges.append((int(tok[1]) - 1, int(tok[2]) - 1))
            elif tok[0] == "q":
                pairs.append((int(tok[1]) - 1, int(tok[2]) - 1))
            else:
                raise FormatError(f"line {lineno}: unknown record '{tok[0]}'")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise FormatError("missing 'p djp' header")
    mode, n, m, k = header
    if len(edges) != m or len(pairs) != k:
        raise FormatError(f"header promises {m} edges / {k} pairs, found {len(edges)} / {len(pairs)}")
    try:
        return Instance(Graph.from_edges(n, edges), tuple(pairs), mode)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def format_instance(inst: Instance, comment: str | None = None) -> str:
    g = inst.graph
    live = g.live_edges()
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"p djp {inst.mode.value} {g.node_count} {len(live)} {inst.k}")
    out.extend(f"e {g.edges[e][0] + 1} {g.edges[e][1] + 1}" for e in live)
    out.extend(f"q {s + 1} {t + 1}" for s, t in inst.pairs)
    return "\n".join(out) + "\n"


def read_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def write_instance(inst: Instance, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_instance(inst, comment))


def format_routing(routing: Routing, congestion: int, weights: dict[int, float] | None = None,
                   extra: Iterable[str] = ()) -> str:
    out = [f"value {len(routing)}", f"congestion {congestion}"]
    for i, p in routing.entries:
        line = "r " + " ".join(str(x + 1) for x in (i, *p.nodes))
        if weights is not None and i in weights:
            line += f" w {weights[i]:.10g}"
        out.append(line)
    out.extend(extra)
    return "\n".join(out) + "\n"


def format_weighted_paths(paths: Iterable[tuple[int, PathSeq, float]]) -> list[str]:
    return [
        "r " + " ".join(str(x + 1) for x in (i, *p.nodes)) + f" w {w:.10g}"
        for i, p, w in paths
    ]


def parse_routing(text: str, inst: Instance) -> Routing:
    """Read a routing; paths are rebuilt from node lists using the lowest-id edge per hop.

    Diagnostic lines other than ``r`` records are ignored.
    """
    entries = []
    for lineno, tok in _lines(text):
        if tok[0] != "r":
            continue
        if "w" in tok:
            tok = tok[: tok.index("w")]
        try:
            i = int(tok[1]) - 1
            nodes = [int(x) - 1 for x in tok[2:]]
        except (IndexError, ValueError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        if not nodes:
            raise FormatError(f"line {lineno}: empty path")
        try:
            path = _path_from_nodes(inst.graph, nodes)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        entries.append((i, path))
    return Routing(tuple(entries))


def _path_from_nodes(g: Graph, nodes: list[int]) -> PathSeq:
    # simple paths never need the same parallel edge twice, but edge-disjoint routings may
    # need different parallel copies across paths; the caller re-verifies anyway
    for v in nodes:
        if not 0 <= v < g.node_count:
            raise ValueError(f"node {v + 1} does not exist")
    return PathSeq.from_nodes(g, nodes)
