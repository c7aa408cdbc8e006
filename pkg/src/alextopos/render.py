"""Deterministic text output: Hasse diagrams as DOT, pattern grids as ASCII."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable

from .ambient_group import GroupElem, format_elem
from .poset_core import WindowPoset, node_key


@dataclass(frozen=True)
class RenderConfig:
    format: str = "dot"
    label: str = "both"  # "fiber", "group" or "both" for (group element, fibre) nodes
    name: str = "E"
    rank_by_projection: bool = True


def _fmt(x) -> str:
    return format_elem(x) if isinstance(x, GroupElem) else str(x)


def node_label(x, style: str = "both") -> str:
    if isinstance(x, tuple) and len(x) == 2:
        p, s = x
        if style == "fiber":
            return _fmt(s)
        if style == "group":
            return _fmt(p)
        return f"{_fmt(p)}|{_fmt(s)}"
    return _fmt(x)


def _projection(x):
    return x[0] if isinstance(x, tuple) and len(x) == 2 else None


def render_hasse(P: WindowPoset, cfg: RenderConfig | None = None,
                 projection: Callable | None = None) -> str:
    """Render the cover relation of ``P``, one DOT edge per cover ``a < b``."""
    cfg = cfg or RenderConfig()
    if cfg.format == "json":
        d = P.to_dict(name=lambda x: node_label(x, "both"))
        d["covers"] = [[node_label(a), node_label(b)] for a, b in P.covers()]
        return json.dumps(d, indent=1) + "\n"
    if cfg.format == "ascii":
        return "".join(f"{node_label(a, cfg.label)} -> {node_label(b, cfg.label)}\n" for a, b in P.covers())
    ids = {x: f"n{k}" for k, x in enumerate(P.elements)}
    lines = [f"digraph {cfg.name} {{"]
    proj = projection or _projection
    ranks: dict = {}
    if cfg.rank_by_projection:
        for x in P.elements:
            v = proj(x)
            if v is not None:
                ranks.setdefault(v, []).append(x)
    lines.append("  rankdir=LR;" if ranks else "  rankdir=BT;")
    lines.append("  node [shape=plaintext];")
    for x in P.elements:
        label = node_label(x, cfg.label).replace('"', '\\"')
        lines.append(f'  {ids[x]} [label="{label}"];')
    for v in sorted(ranks, key=node_key):
        members = "; ".join(ids[x] for x in ranks[v])
        lines.append(f"  {{ rank=same; {members}; }}")
    for a, b in P.covers():
        lines.append(f"  {ids[a]} -> {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_NODE = re.compile(r'^\s*(n\d+) \[label="((?:[^"\\]|\\.)*)"\];$')
_EDGE = re.compile(r"^\s*(n\d+) -> (n\d+);$")


def dot_cover_edges(text: str) -> set[tuple[str, str]]:
    """Labelled edges of a DOT text produced by :func:`render_hasse`."""
    labels, edges = {}, set()
    for line in text.splitlines():
        if m := _NODE.match(line):
            labels[m.group(1)] = m.group(2).replace('\\"', '"')
        elif m := _EDGE.match(line):
            edges.add((m.group(1), m.group(2)))
    return {(labels[a], labels[b]) for a, b in edges}


def render_grid(g) -> str:
    """``size`` rows of ``#``/``.``, highest ``b`` first, ``a`` left to right."""
    rows = []
    for b in reversed(range(g.size)):
        rows.append("".join("#" if g.cells[a][b] else "." for a in range(g.size)))
    return "\n".join(rows)
