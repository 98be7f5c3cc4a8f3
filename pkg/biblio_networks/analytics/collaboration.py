"""Collaboration networks derived from the works x authors network."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..constants import ET_AL_KEY
from ..netcore import (NodeSet, NormMode, OneModeNetwork, Partition, TwoModeNetwork,
                       extract_subnetwork, multiply, row_normalize,
                       symmetrize_drop_diagonal, transpose)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollabBundle:
    """Co = AW*WA, N and N' normalisations of WA, Ct = N^T*N, Ct', Cn = AW*N."""

    WA: TwoModeNetwork
    Co: OneModeNetwork
    N: TwoModeNetwork
    Nprime: TwoModeNetwork
    Ct: OneModeNetwork
    CtPrime: OneModeNetwork
    Cn: OneModeNetwork

    @property
    def authors(self) -> NodeSet:
        return self.WA.cols


@dataclass(frozen=True)
class AuthorIndexRow:
    author: str
    cn_ii: float
    total: int
    S: float
    K: float


def drop_pseudo_authors(wa: TwoModeNetwork) -> TwoModeNetwork:
    """Remove the ``et.al`` column; works keep their other authors."""
    if ET_AL_KEY not in wa.cols.index:
        return wa
    keep = Partition(wa.cols, np.array([label != ET_AL_KEY for label in wa.cols.labels]))
    return extract_subnetwork(wa, col_classes={1}, col_partition=keep)


def collaboration_networks(wa: TwoModeNetwork, exclude_et_al: bool = True,
                           threads: int = 1) -> CollabBundle:
    if exclude_et_al:
        wa = drop_pseudo_authors(wa)
    aw = transpose(wa)
    co = multiply(aw, wa, threads)
    n = row_normalize(wa, NormMode.BY_OUTDEG)
    n_prime = row_normalize(wa, NormMode.BY_OUTDEG_MINUS_1)
    nt = transpose(n)
    ct = multiply(nt, n, threads)
    # each k-author work adds 1/(k(k-1)) in both directions, so the sum gives 2/(k(k-1))
    ct_prime = symmetrize_drop_diagonal(multiply(nt, n_prime, threads))
    cn = multiply(aw, n, threads)
    logger.info("Collaboration networks over %d authors: Co %d arcs, Ct' %d edges",
                len(wa.cols), co.n_arcs, ct_prime.n_arcs)
    return CollabBundle(wa, co, n, n_prime, ct, ct_prime, cn)


def author_indices(bundle: CollabBundle, sort_by: str = "cn_ii") -> List[AuthorIndexRow]:
    """Self-contribution, total works and the S/K indices of every author.

    ``sort_by`` is ``"cn_ii"`` or ``"total"``; ties go to the author key.
    """
    cn_diag = bundle.Cn.matrix.diagonal()
    co_diag = bundle.Co.matrix.diagonal()
    rows = []
    for i, author in enumerate(bundle.authors.labels):
        total = int(round(co_diag[i]))
        if total == 0:
            continue
        cn_ii = float(cn_diag[i])
        s = cn_ii / total
        rows.append(AuthorIndexRow(author, cn_ii, total, s, 1.0 - s))
    if sort_by == "total":
        rows.sort(key=lambda r: (-r.total, -r.cn_ii, r.author))
    elif sort_by == "cn_ii":
        rows.sort(key=lambda r: (-r.cn_ii, -r.total, r.author))
    else:
        raise ValueError(f"unknown sort key {sort_by!r}")
    return rows


def coauthor_counts(bundle: CollabBundle) -> List[Tuple[str, int, int, bool]]:
    """``(author, distinct co-authors, works, is pseudo-author)``, most co-authors first."""
    co = bundle.Co.matrix
    diag = co.diagonal()
    rows = []
    for i, author in enumerate(bundle.authors.labels):
        start, end = co.indptr[i], co.indptr[i + 1]
        others = int(np.count_nonzero(co.indices[start:end] != i))
        rows.append((author, others, int(round(diag[i])), author == ET_AL_KEY))
    rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
    return rows


def top_links(net: OneModeNetwork, k: int | None = None) -> List[Tuple[str, str, float]]:
    """Heaviest links, loops excluded; ties broken by the node labels."""
    links = [(u, v, w) for u, v, w in net.arcs() if u != v]
    links.sort(key=lambda link: (-link[2], link[0], link[1]))
    return links if k is None else links[:k]
