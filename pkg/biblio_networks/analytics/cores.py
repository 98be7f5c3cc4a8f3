from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..netcore import NodeVector, OneModeNetwork, restrict

logger = logging.getLogger(__name__)

# relative slack for float accumulation when comparing p_s with t
_EPS = 1e-12


@dataclass(frozen=True)
class CoreResult:
    """Members of the pS-core at ``level``.

    ``outside`` maps every removed node to its weight into the core; each of
    those values is below ``level``, which is the maximality witness.
    """

    level: float
    members: Tuple[str, ...]
    p_values: NodeVector
    outside: Dict[str, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.members)


def _weighted_degrees(adj, alive: np.ndarray) -> np.ndarray:
    return np.asarray(adj @ alive.astype(np.float64)).ravel()


def ps_core(net: OneModeNetwork, t: float) -> CoreResult:
    """Largest node set where every member's weight into the set is at least ``t``.

    Nodes are deleted lowest-first from a lazy heap; the result does not depend
    on the deletion order.
    """
    if t < 0:
        raise ValueError(f"core level must be non-negative, got {t}")
    if net.directed:
        raise ValueError("pS-cores are defined on undirected networks")
    adj = net.full_matrix()
    n = adj.shape[0]
    tol = _EPS * max(1.0, t)
    alive = np.ones(n, dtype=bool)
    p = _weighted_degrees(adj, alive)
    heap = [(float(p[i]), i) for i in range(n)]
    heapq.heapify(heap)
    while heap:
        value, i = heapq.heappop(heap)
        if not alive[i] or value != p[i]:
            continue
        if value >= t - tol:
            break
        alive[i] = False
        start, end = adj.indptr[i], adj.indptr[i + 1]
        for j, w in zip(adj.indices[start:end], adj.data[start:end]):
            if alive[j]:
                p[j] -= w
                heapq.heappush(heap, (float(p[j]), int(j)))

    # recompute from scratch so reported values carry no accumulated error
    p = _weighted_degrees(adj, alive)
    labels = net.nodes.labels
    members = tuple(labels[i] for i in np.flatnonzero(alive))
    core = restrict(net, members)
    outside = {labels[i]: float(p[i]) for i in np.flatnonzero(~alive)}
    logger.info("pS-core at level %g: %d of %d nodes", t, len(members), n)
    return CoreResult(float(t), members, NodeVector(core.nodes, p[alive]), outside)


def core_network(net: OneModeNetwork, result: CoreResult) -> OneModeNetwork:
    return restrict(net, result.members)
