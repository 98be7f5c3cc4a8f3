"""Sparse network model and the algebra used on bibliographic networks.

Networks wrap a canonical ``scipy.sparse`` CSR matrix of float64 weights:
sorted column indices, duplicates summed and explicit zeros removed.  All
operations return new networks; nothing is modified in place.
"""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .entities import EntityMaps
from .records import Record

logger = logging.getLogger(__name__)


class DimensionMismatch(ValueError):
    pass


class Role(str, Enum):
    W = "W"
    A = "A"
    J = "J"
    K = "K"
    M = "M"
    SHRUNK = "S"


class NormMode(str, Enum):
    BY_OUTDEG = "by_outdeg"
    BY_OUTDEG_MINUS_1 = "by_outdeg_minus_1"
    BY_WEIGHTED_OUTDEG = "by_weighted_outdeg"


@dataclass(frozen=True)
class NodeSet:
    role: Role
    labels: Tuple[str, ...]
    index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        index = {label: i for i, label in enumerate(labels)}
        if len(index) != len(labels):
            dup = [k for k, n in Counter(labels).items() if n > 1]
            raise ValueError(f"duplicate node labels: {dup[:5]}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def position(self, label: str) -> int:
        return self.index[label]

    def subset(self, mask: np.ndarray) -> "NodeSet":
        return NodeSet(self.role, tuple(l for l, keep in zip(self.labels, mask) if keep))


def _canonical(matrix, shape: Tuple[int, int]) -> sp.csr_matrix:
    m = sp.csr_matrix(matrix, shape=shape, dtype=np.float64)
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    if m.nnz and m.data.min() < 0:
        raise ValueError("network weights must be positive")
    return m


def matrix_from_triples(rows: NodeSet, cols: NodeSet,
                  triples: Iterable[Tuple[int, int, float]]) -> sp.csr_matrix:
    triples = list(triples)
    if not triples:
        return sp.csr_matrix((len(rows), len(cols)), dtype=np.float64)
    r, c, w = zip(*triples)
    return sp.coo_matrix((w, (r, c)), shape=(len(rows), len(cols))).tocsr()


class _Network:
    matrix: sp.csr_matrix

    @property
    def n_arcs(self) -> int:
        return int(self.matrix.nnz)

    @property
    def total_weight(self) -> float:
        return float(self.matrix.sum())


@dataclass(frozen=True, eq=False)
class TwoModeNetwork(_Network):
    """Arcs from ``rows`` nodes to ``cols`` nodes."""

    rows: NodeSet
    cols: NodeSet
    matrix: sp.csr_matrix

    def __post_init__(self):
        if self.rows.role == self.cols.role and self.rows.role is not Role.SHRUNK:
            raise ValueError(f"two-mode network needs two roles, got {self.rows.role.value} twice")
        object.__setattr__(self, "matrix", _canonical(self.matrix, (len(self.rows), len(self.cols))))

    @property
    def name(self) -> str:
        return self.rows.role.value + self.cols.role.value

    def weight(self, row: str, col: str) -> float:
        return float(self.matrix[self.rows.position(row), self.cols.position(col)])

    def arcs(self) -> Iterator[Tuple[str, str, float]]:
        m = self.matrix
        for i in range(m.shape[0]):
            for k in range(m.indptr[i], m.indptr[i + 1]):
                yield self.rows.labels[i], self.cols.labels[m.indices[k]], float(m.data[k])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoModeNetwork):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and _same_matrix(self.matrix, other.matrix))


@dataclass(frozen=True, eq=False)
class OneModeNetwork(_Network):
    """Links inside one node set.

    Undirected networks keep each edge once in the upper triangle and have no
    loops; lower-triangle entries given to the constructor are folded onto
    the upper triangle.
    """

    nodes: NodeSet
    matrix: sp.csr_matrix
    directed: bool = True

    def __post_init__(self):
        n = len(self.nodes)
        m = _canonical(self.matrix, (n, n))
        if not self.directed:
            if m.diagonal().any():
                raise ValueError("undirected networks cannot have loops")
            m = _canonical(sp.triu(m, 1) + sp.tril(m, -1).T, (n, n))
        object.__setattr__(self, "matrix", m)

    @property
    def rows(self) -> NodeSet:
        return self.nodes

    @property
    def cols(self) -> NodeSet:
        return self.nodes

    def full_matrix(self) -> sp.csr_matrix:
        """Symmetric adjacency for undirected networks, the matrix otherwise."""
        if self.directed:
            return self.matrix
        return (self.matrix + self.matrix.T).tocsr()

    def weight(self, u: str, v: str) -> float:
        i, j = self.nodes.position(u), self.nodes.position(v)
        if not self.directed and i > j:
            i, j = j, i
        return float(self.matrix[i, j])

    def arcs(self) -> Iterator[Tuple[str, str, float]]:
        m = self.matrix
        labels = self.nodes.labels
        for i in range(m.shape[0]):
            for k in range(m.indptr[i], m.indptr[i + 1]):
                yield labels[i], labels[m.indices[k]], float(m.data[k])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneModeNetwork):
            return NotImplemented
        return (self.nodes == other.nodes and self.directed == other.directed
                and _same_matrix(self.matrix, other.matrix))


Network = Union[TwoModeNetwork, OneModeNetwork]


def _same_matrix(a: sp.csr_matrix, b: sp.csr_matrix) -> bool:
    return (a.shape == b.shape and a.nnz == b.nnz
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data))


@dataclass(frozen=True, eq=False)
class Partition:
    """Non-negative integer class per node; ``names`` labels shrunk classes."""

    over: NodeSet
    classes: np.ndarray
    names: Optional[Dict[int, str]] = None
    role: Role = Role.SHRUNK

    def __post_init__(self):
        classes = np.asarray(self.classes, dtype=np.int64)
        if classes.shape != (len(self.over),):
            raise ValueError(f"partition needs {len(self.over)} classes, got {classes.shape}")
        if classes.size and classes.min() < 0:
            raise ValueError("partition classes must be non-negative")
        object.__setattr__(self, "classes", classes)

    def class_of(self, label: str) -> int:
        return int(self.classes[self.over.position(label)])

    def members(self, cls: int) -> List[str]:
        return [self.over.labels[i] for i in np.flatnonzero(self.classes == cls)]

    def label(self, cls: int) -> str:
        if self.names and cls in self.names:
            return self.names[cls]
        return str(cls)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.over == other.over and np.array_equal(self.classes, other.classes)


@dataclass(frozen=True, eq=False)
class NodeVector:
    over: NodeSet
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.over),):
            raise ValueError(f"vector needs {len(self.over)} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, label: str) -> float:
        return float(self.values[self.over.position(label)])

    def items(self) -> Iterator[Tuple[str, float]]:
        return zip(self.over.labels, (float(v) for v in self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NodeVector):
            return NotImplemented
        return self.over == other.over and np.array_equal(self.values, other.values)


# ---------------------------------------------------------------------------
# construction


@dataclass
class Networks:
    WA: TwoModeNetwork
    WJ: TwoModeNetwork
    WK: TwoModeNetwork
    WM: TwoModeNetwork
    WMp: TwoModeNetwork
    year: Partition

    def two_mode(self) -> Dict[str, TwoModeNetwork]:
        return {"WA": self.WA, "WJ": self.WJ, "WK": self.WK, "WM": self.WM, "WMp": self.WMp}

    def sizes(self) -> Dict[str, Dict[str, int]]:
        """Node-set sizes and arc counts of every two-mode network."""
        nodes = {"W": len(self.WA.rows), "A": len(self.WA.cols), "J": len(self.WJ.cols),
                 "K": len(self.WK.cols), "M": len(self.WM.cols)}
        arcs = {name: net.n_arcs for name, net in self.two_mode().items()}
        missing_year = int((self.year.classes == 0).sum())
        return {"nodes": nodes, "arcs": arcs, "works_without_year": {"count": missing_year}}


def _first_seen(groups: Iterable[Iterable[str]]) -> Tuple[str, ...]:
    seen: Dict[str, None] = {}
    for group in groups:
        for label in group:
            seen.setdefault(label)
    return tuple(seen)


def _two_mode(works: NodeSet, role: Role,
              links: Sequence[Sequence[Tuple[str, float]]]) -> TwoModeNetwork:
    cols = NodeSet(role, _first_seen([label for label, _ in arcs] for arcs in links))
    triples = [(i, cols.index[label], w) for i, arcs in enumerate(links) for label, w in arcs]
    return TwoModeNetwork(works, cols, matrix_from_triples(works, cols, triples))


def build_networks(records: Sequence[Record], maps: EntityMaps) -> Networks:
    """Build WA, WJ, WK, WM (plus primary-MSC WMp) and the year partition.

    Node order is first-seen order in the record stream.  WM weights count
    how often a 5-char code occurs on a work.
    """
    works = NodeSet(Role.W, tuple(r.id for r in records))

    wa = _two_mode(works, Role.A, [[(a, 1.0) for a in maps.work_authors.get(r.id, ())]
                                   for r in records])
    wj = _two_mode(works, Role.J, [[(maps.work_journal[r.id], 1.0)] if r.id in maps.work_journal
                                   else [] for r in records])
    wk = _two_mode(works, Role.K, [[(t, float(n)) for t, n in maps.work_keywords.get(r.id, {}).items()]
                                   for r in records])
    wm = _two_mode(works, Role.M, [[(m.code, 1.0) for m in r.msc_codes] for r in records])
    primary = [(i, wm.cols.index[m.code], 1.0)
               for i, r in enumerate(records) for m in r.msc_codes if m.primary]
    wmp = binarize(TwoModeNetwork(works, wm.cols, matrix_from_triples(works, wm.cols, primary)))

    year = Partition(works, np.array([r.year or 0 for r in records], dtype=np.int64),
                     role=Role.SHRUNK)
    nets = Networks(wa, wj, wk, wm, wmp, year)
    logger.info("Built networks: %s", nets.sizes()["arcs"])
    return nets


# ---------------------------------------------------------------------------
# algebra


def _like(net: Network, matrix) -> Network:
    if isinstance(net, OneModeNetwork):
        return OneModeNetwork(net.nodes, matrix, net.directed)
    return TwoModeNetwork(net.rows, net.cols, matrix)


def transpose(net: Network) -> Network:
    """Reverse every arc; undirected networks are returned unchanged."""
    if isinstance(net, OneModeNetwork):
        if not net.directed:
            return net
        return OneModeNetwork(net.nodes, net.matrix.T.tocsr(), True)
    return TwoModeNetwork(net.cols, net.rows, net.matrix.T.tocsr())


def _operand(net: Network) -> sp.csr_matrix:
    if isinstance(net, OneModeNetwork):
        return net.full_matrix()
    return net.matrix


def multiply(a: Network, b: Network, threads: int = 1) -> Network:
    """Matrix product of two networks sharing the middle node set.

    With ``threads > 1`` row blocks of ``a`` are multiplied on a thread pool;
    each row of the product is computed the same way, so the result equals the
    sequential product.
    """
    if a.cols != b.rows:
        raise DimensionMismatch(
            f"cannot multiply {a.rows.role.value}x{a.cols.role.value} ({len(a.cols)} cols) "
            f"by {b.rows.role.value}x{b.cols.role.value} ({len(b.rows)} rows)"
        )
    left, right = _operand(a), _operand(b)
    n = left.shape[0]
    if threads > 1 and n > threads:
        bounds = np.linspace(0, n, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(lambda ij: left[ij[0]:ij[1]] @ right,
                                   zip(bounds[:-1], bounds[1:])))
        product = sp.vstack(blocks, format="csr")
    else:
        product = left @ right
    if a.rows == b.cols:
        return OneModeNetwork(a.rows, product, directed=True)
    return TwoModeNetwork(a.rows, b.cols, product)


def binarize(net: Network) -> Network:
    m = net.matrix.copy()
    m.data[:] = 1.0
    return _like(net, m)


def row_normalize(net: Network, mode: NormMode | str = NormMode.BY_OUTDEG) -> Network:
    """Scale each row by the reciprocal of its (weighted) outdegree.

    ``by_outdeg`` divides by ``max(1, d)`` and ``by_outdeg_minus_1`` by ``max(1, d - 1)``;
    ``by_weighted_outdeg`` divides by the row sum so every non-empty row sums to 1.
    """
    mode = NormMode(mode)
    m = net.matrix
    if mode is NormMode.BY_WEIGHTED_OUTDEG:
        d = np.asarray(m.sum(axis=1)).ravel()
        scale = np.ones_like(d)
        np.divide(1.0, d, out=scale, where=d > 0)
    else:
        d = np.diff(m.indptr).astype(np.float64)
        if mode is NormMode.BY_OUTDEG_MINUS_1:
            d = d - 1
        scale = 1.0 / np.maximum(1.0, d)
    return _like(net, sp.diags(scale) @ m)


def _aggregation(partition: Partition) -> Tuple[sp.csr_matrix, NodeSet]:
    present = np.unique(partition.classes)
    column = np.searchsorted(present, partition.classes)
    n = len(partition.over)
    agg = sp.csr_matrix((np.ones(n), (np.arange(n), column)), shape=(n, len(present)))
    shrunk = NodeSet(partition.role, tuple(partition.label(int(c)) for c in present))
    return agg, shrunk


def shrink(net: TwoModeNetwork, partition: Partition, side: Optional[str] = None) -> TwoModeNetwork:
    """Merge the nodes of one side by class; parallel arcs add up.

    ``side`` is ``"rows"`` or ``"cols"``; by default the side whose node set
    the partition is over.
    """
    if side is None:
        side = "cols" if partition.over == net.cols else "rows"
    agg, shrunk = _aggregation(partition)
    if side == "cols":
        if partition.over != net.cols:
            raise DimensionMismatch("partition is not over the network columns")
        return TwoModeNetwork(net.rows, shrunk, net.matrix @ agg)
    if partition.over != net.rows:
        raise DimensionMismatch("partition is not over the network rows")
    return TwoModeNetwork(shrunk, net.cols, agg.T @ net.matrix)


def _mask(nodes: NodeSet, partition: Optional[Partition], classes) -> np.ndarray:
    if partition is None or classes is None:
        return np.ones(len(nodes), dtype=bool)
    if partition.over != nodes:
        raise DimensionMismatch("partition is not over the selected node set")
    return np.isin(partition.classes, np.fromiter(classes, dtype=np.int64))


def extract_subnetwork(net: TwoModeNetwork,
                       row_classes: Optional[Iterable[int]] = None,
                       col_classes: Optional[Iterable[int]] = None,
                       row_partition: Optional[Partition] = None,
                       col_partition: Optional[Partition] = None,
                       drop_empty_rows: bool = False,
                       drop_isolated_cols: bool = False) -> TwoModeNetwork:
    """Keep the arcs whose end nodes lie in the selected classes.

    ``None`` selects every class of that side.  Node sets are restricted to
    the selected nodes; rows left without arcs are removed when
    ``drop_empty_rows`` is set, columns without arcs with ``drop_isolated_cols``.
    """
    row_mask = _mask(net.rows, row_partition, row_classes)
    col_mask = _mask(net.cols, col_partition, col_classes)
    m = net.matrix[row_mask][:, col_mask]
    if drop_empty_rows:
        keep = np.diff(m.tocsr().indptr) > 0
        row_mask = row_mask.copy()
        row_mask[row_mask] = keep
        m = m[keep]
    if drop_isolated_cols:
        keep = np.asarray((m != 0).sum(axis=0)).ravel() > 0
        col_mask = col_mask.copy()
        col_mask[col_mask] = keep
        m = m[:, keep]
    return TwoModeNetwork(net.rows.subset(row_mask), net.cols.subset(col_mask), m)


def restrict(net: OneModeNetwork, labels: Iterable[str]) -> OneModeNetwork:
    """Subnetwork induced by ``labels``, keeping the original node order."""
    wanted = set(labels)
    mask = np.array([label in wanted for label in net.nodes.labels], dtype=bool)
    m = net.matrix[mask][:, mask]
    return OneModeNetwork(net.nodes.subset(mask), m, net.directed)


def symmetrize_drop_diagonal(net: OneModeNetwork) -> OneModeNetwork:
    """Undirected network with ``w{u,v} = N(u,v) + N(v,u)`` and no loops."""
    m = net.matrix.tolil(copy=True)
    m.setdiag(0)
    return OneModeNetwork(net.nodes, m.tocsr(), directed=False)


def degrees(net: Network, side: str = "rows", weighted: bool = False) -> NodeVector:
    """Out- (``rows``) or in- (``cols``) degrees; undirected networks ignore ``side``."""
    if isinstance(net, OneModeNetwork) and not net.directed:
        m = net.full_matrix()
        side = "rows"
    else:
        m = net.matrix
    if not weighted:
        m = (m != 0).astype(np.float64)
    axis = 1 if side == "rows" else 0
    nodes = net.rows if side == "rows" else net.cols
    return NodeVector(nodes, np.asarray(m.sum(axis=axis)).ravel())


def partition_by_prefix(nodes: NodeSet, length: int) -> Partition:
    """Class = first ``length`` characters of the label (MSC 2-/3-char shrink)."""
    prefixes = [label[:length] for label in nodes.labels]
    names = sorted(set(prefixes))
    lookup = {p: i for i, p in enumerate(names)}
    return Partition(nodes, np.array([lookup[p] for p in prefixes], dtype=np.int64),
                     dict(enumerate(names)), nodes.role)


SUBJECT_OTHER, SUBJECT_PURE, SUBJECT_APPLIED = 0, 1, 2


def subject_partition(nodes: NodeSet, prefix: str, extra: Sequence[str] = ()) -> Partition:
    """Class 1 for labels starting with ``prefix``, 2 for ``extra`` prefixes, else 0."""
    classes = []
    for label in nodes.labels:
        if label.startswith(prefix):
            classes.append(SUBJECT_PURE)
        elif any(label.startswith(e) for e in extra):
            classes.append(SUBJECT_APPLIED)
        else:
            classes.append(SUBJECT_OTHER)
    names = {SUBJECT_OTHER: "other", SUBJECT_PURE: prefix or "all",
             SUBJECT_APPLIED: "applications"}
    return Partition(nodes, np.array(classes, dtype=np.int64), names, Role.SHRUNK)


def indicator_partition(net: TwoModeNetwork, col_partition: Partition,
                        classes: Iterable[int]) -> Partition:
    """Rows get class 1 when at least one arc ends in a selected column class."""
    cols = _mask(net.cols, col_partition, list(classes)).astype(np.float64)
    hits = net.matrix @ cols
    return Partition(net.rows, (hits > 0).astype(np.int64), {0: "outside", 1: "inside"})
