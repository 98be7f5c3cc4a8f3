"""Pajek ``.net``, ``.clu`` and ``.vec`` files.

Two-mode networks use the ``*Vertices n n1`` convention: row nodes are
``1..n1`` and column nodes ``n1+1..n``.  A ``% roles`` comment line records the
node roles so a network read back compares equal to the one written.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .netcore import (Network, NodeSet, NodeVector, OneModeNetwork, Partition, Role,
                      TwoModeNetwork, matrix_from_triples)
from .reports import atomic_write_text

logger = logging.getLogger(__name__)

_VERTEX = re.compile(r'^(\d+)(?:\s+"([^"]*)"|\s+(\S+))?')


class PajekSyntaxError(ValueError):
    def __init__(self, message: str, line: int, path: Optional[str] = None):
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")
        self.line = line


def format_weight(w: float) -> str:
    text = format(w, ".12g")
    return text if float(text) == w else repr(w)


def _quote(label: str) -> str:
    if '"' in label:
        raise ValueError(f"Pajek labels cannot contain double quotes: {label!r}")
    return '"' + label + '"'


def format_network(net: Network) -> str:
    lines: List[str] = []
    if isinstance(net, TwoModeNetwork):
        n1 = len(net.rows)
        lines.append(f"% roles {net.rows.role.value} {net.cols.role.value}")
        lines.append(f"*Vertices {n1 + len(net.cols)} {n1}")
        labels = net.rows.labels + net.cols.labels
        offset = n1
        section = "*Arcs"
    else:
        lines.append(f"% roles {net.nodes.role.value}")
        lines.append(f"*Vertices {len(net.nodes)}")
        labels = net.nodes.labels
        offset = 0
        section = "*Arcs" if net.directed else "*Edges"
    lines.extend(f"{i} {_quote(label)}" for i, label in enumerate(labels, start=1))
    lines.append(section)
    m = net.matrix
    for i in range(m.shape[0]):
        for k in range(m.indptr[i], m.indptr[i + 1]):
            lines.append(f"{i + 1} {m.indices[k] + 1 + offset} {format_weight(float(m.data[k]))}")
    return "\n".join(lines) + "\n"


def write_network(path: Path | str, net: Network) -> None:
    atomic_write_text(path, format_network(net))
    logger.debug("Wrote %s with %d arcs", path, net.n_arcs)


def parse_network(text: str, path: Optional[str] = None) -> Network:
    """Parse ``.net`` text into a two-mode or one-mode network."""
    roles: List[Role] = []
    n = n1 = None
    labels: List[str] = []
    arcs: List[Tuple[int, int, float, int]] = []
    section = None
    edges_seen = arcs_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            parts = line[1:].split()
            if parts[:1] == ["roles"]:
                try:
                    roles = [Role(p) for p in parts[1:]]
                except ValueError as exc:
                    raise PajekSyntaxError(str(exc), lineno, path) from None
            continue
        if line.startswith("*"):
            head = line.split()
            keyword = head[0].lower()
            if keyword == "*vertices":
                try:
                    n = int(head[1])
                    n1 = int(head[2]) if len(head) > 2 else None
                except (IndexError, ValueError):
                    raise PajekSyntaxError(f"bad vertices line {line!r}", lineno, path) from None
                section = "vertices"
            elif keyword in ("*arcs", "*edges"):
                if n is None:
                    raise PajekSyntaxError(f"{head[0]} before *Vertices", lineno, path)
                section = keyword[1:]
                edges_seen |= section == "edges"
                arcs_seen |= section == "arcs"
            elif keyword == "*network":
                continue
            else:
                raise PajekSyntaxError(f"unsupported section {head[0]}", lineno, path)
            continue
        if section == "vertices":
            match = _VERTEX.match(line)
            if match is None or int(match.group(1)) != len(labels) + 1:
                raise PajekSyntaxError(f"expected vertex {len(labels) + 1}", lineno, path)
            label = match.group(2) if match.group(2) is not None else match.group(3)
            labels.append(label if label is not None else str(len(labels) + 1))
        elif section in ("arcs", "edges"):
            parts = line.split()
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) > 2 else 1.0
            except (IndexError, ValueError):
                raise PajekSyntaxError(f"bad link line {line!r}", lineno, path) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise PajekSyntaxError(f"vertex out of range in {line!r}", lineno, path)
            arcs.append((u - 1, v - 1, w, lineno))
        else:
            raise PajekSyntaxError(f"data outside a section: {line!r}", lineno, path)

    if n is None:
        raise PajekSyntaxError("missing *Vertices", 1, path)
    while len(labels) < n:
        labels.append(str(len(labels) + 1))

    if n1 is not None:
        rows = NodeSet(roles[0] if roles else Role.SHRUNK, tuple(labels[:n1]))
        cols = NodeSet(roles[1] if len(roles) > 1 else Role.SHRUNK, tuple(labels[n1:]))
        triples = []
        for u, v, w, lineno in arcs:
            if u >= n1 > v:
                u, v = v, u
            if not (u < n1 <= v):
                raise PajekSyntaxError("link inside one mode of a two-mode network", lineno, path)
            triples.append((u, v - n1, w))
        return TwoModeNetwork(rows, cols, matrix_from_triples(rows, cols, triples))

    nodes = NodeSet(roles[0] if roles else Role.SHRUNK, tuple(labels))
    directed = not (edges_seen and not arcs_seen)
    triples = [(u, v, w) for u, v, w, _ in arcs]
    return OneModeNetwork(nodes, matrix_from_triples(nodes, nodes, triples), directed)


def read_network(path: Path | str) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read(), str(path))


def _format_column(values: List[str]) -> str:
    return "\n".join([f"*Vertices {len(values)}"] + values) + "\n"


def write_partition(path: Path | str, partition: Partition) -> None:
    atomic_write_text(path, _format_column([str(int(c)) for c in partition.classes]))


def write_vector(path: Path | str, vector: NodeVector) -> None:
    atomic_write_text(path, _format_column([format_weight(float(v)) for v in vector.values]))


def _parse_column(text: str, nodes: NodeSet, cast, path: Optional[str]) -> list:
    values: list = []
    expected = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.lower().startswith("*vertices"):
            try:
                expected = int(line.split()[1])
            except (IndexError, ValueError):
                raise PajekSyntaxError(f"bad vertices line {line!r}", lineno, path) from None
            continue
        if expected is None:
            raise PajekSyntaxError("value before *Vertices", lineno, path)
        try:
            values.append(cast(line.split()[0]))
        except ValueError:
            raise PajekSyntaxError(f"bad value {line!r}", lineno, path) from None
    if expected is None:
        raise PajekSyntaxError("missing *Vertices", 1, path)
    if len(values) != expected or expected != len(nodes):
        raise PajekSyntaxError(
            f"{len(values)} values for {expected} declared and {len(nodes)} nodes", 1, path
        )
    return values


def parse_partition(text: str, nodes: NodeSet, path: Optional[str] = None) -> Partition:
    return Partition(nodes, np.array(_parse_column(text, nodes, int, path), dtype=np.int64))


def read_partition(path: Path | str, nodes: NodeSet) -> Partition:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_partition(fh.read(), nodes, str(path))


def parse_vector(text: str, nodes: NodeSet, path: Optional[str] = None) -> NodeVector:
    return NodeVector(nodes, np.array(_parse_column(text, nodes, float, path)))


def read_vector(path: Path | str, nodes: NodeSet) -> NodeVector:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_vector(fh.read(), nodes, str(path))
