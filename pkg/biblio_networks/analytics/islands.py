"""Link islands: connected node sets held together more strongly than to their surroundings."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.cluster.hierarchy import DisjointSet

from ..netcore import OneModeNetwork, restrict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Island:
    nodes: Tuple[str, ...]
    height: float
    links: Tuple[Tuple[str, str, float], ...]

    def __len__(self) -> int:
        return len(self.nodes)


def _edges(net: OneModeNetwork) -> List[Tuple[float, int, int]]:
    m = sp.triu(net.full_matrix(), 1).tocoo()
    edges = list(zip(m.data.tolist(), m.row.tolist(), m.col.tolist()))
    # heaviest first; equal weights keep node order
    edges.sort(key=lambda e: (-e[0], e[1], e[2]))
    return edges


def link_islands(net: OneModeNetwork, size_min: int, size_max: int) -> List[Island]:
    """Maximal link islands with ``size_min <= size <= size_max`` nodes.

    An island is a connected set with a spanning tree whose lightest link is
    heavier than every link leaving the set; its height is that lightest tree
    link.  Links are added heaviest first, one weight level at a time, with a
    union-find; a component becomes an island candidate when it forms inside
    the size band and is reported once it grows past ``size_max``.
    """
    if not 1 < size_min <= size_max:
        raise ValueError(f"island sizes need 1 < min <= max, got [{size_min}, {size_max}]")
    if net.directed:
        raise ValueError("link islands are defined on undirected networks")

    ds = DisjointSet(range(len(net.nodes)))
    pending: Dict[int, List[Tuple[frozenset, float]]] = {}
    found: List[Tuple[frozenset, float]] = []

    for weight, group in itertools.groupby(_edges(net), key=lambda e: e[0]):
        group = list(group)
        old_roots = {ds[u] for _, u, _ in group} | {ds[v] for _, _, v in group}
        carried = {r: pending.pop(r, []) for r in old_roots}
        for _, u, v in group:
            ds.merge(u, v)
        children: Dict[int, List[int]] = {}
        for r in old_roots:
            children.setdefault(ds[r], []).append(r)
        for root, merged in children.items():
            inherited = [isl for r in merged for isl in carried[r]]
            if len(merged) == 1:
                # only links inside an existing component: nothing changes
                if inherited:
                    pending[root] = inherited
                continue
            size = ds.subset_size(root)
            if size < size_min:
                continue
            if size <= size_max:
                pending[root] = [(frozenset(ds.subset(root)), weight)]
            else:
                found.extend(inherited)
    for islands in pending.values():
        found.extend(islands)

    labels = net.nodes.labels
    result = []
    for members, height in found:
        ordered = tuple(labels[i] for i in sorted(members))
        sub = restrict(net, ordered)
        result.append(Island(ordered, float(height), tuple(sub.arcs())))
    result.sort(key=lambda isl: (-isl.height, -len(isl), isl.nodes))
    logger.info("Found %d link islands of size [%d, %d]", len(result), size_min, size_max)
    return result


def boundary_weight(net: OneModeNetwork, nodes) -> float:
    """Heaviest link with exactly one end in ``nodes`` (0 when there is none)."""
    adj = net.full_matrix()
    mask = np.zeros(adj.shape[0], dtype=bool)
    mask[[net.nodes.position(label) for label in nodes]] = True
    cut = adj[mask][:, ~mask]
    return float(cut.max()) if cut.nnz else 0.0
