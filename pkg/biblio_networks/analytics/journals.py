from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import AbstractSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..netcore import (SUBJECT_APPLIED, SUBJECT_PURE, NormMode, OneModeNetwork,
                       TwoModeNetwork, binarize, multiply, partition_by_prefix,
                       row_normalize, shrink, subject_partition, transpose)

logger = logging.getLogger(__name__)


class EmptySubject(ValueError):
    pass


@dataclass(frozen=True)
class BiasRow:
    journal: str
    works: int
    subject_works: int
    bias: float


@dataclass
class BiasTable:
    overall_fraction: float
    rows: List[BiasRow] = field(default_factory=list)

    @property
    def ranked(self) -> List[BiasRow]:
        return [r for r in self.rows if not math.isinf(r.bias)]

    @property
    def without_subject(self) -> List[BiasRow]:
        return [r for r in self.rows if math.isinf(r.bias)]

    def positive(self, k: Optional[int] = None) -> List[BiasRow]:
        rows = [r for r in self.ranked if r.bias > 0]
        return rows[:k] if k is not None else rows

    def negative(self, k: Optional[int] = None) -> List[BiasRow]:
        rows = sorted((r for r in self.ranked if r.bias < 0),
                      key=lambda r: (r.bias, r.journal))
        return rows[:k] if k is not None else rows


def subject_works(wm3: TwoModeNetwork, subject: AbstractSet[str]) -> np.ndarray:
    """Boolean mask of works with at least one MSC class in ``subject``."""
    cols = np.array([label in subject for label in wm3.cols.labels], dtype=np.float64)
    return np.asarray(binarize(wm3).matrix @ cols).ravel() > 0


def journal_bias(wj: TwoModeNetwork, wm3: TwoModeNetwork, subject: AbstractSet[str],
                 min_works: int = 50) -> BiasTable:
    """log2 of a journal's subject fraction over the corpus subject fraction.

    Journals with fewer than ``min_works`` indexed works are left out; journals
    without subject works get ``-inf`` and are listed apart from the ranking.
    """
    if min_works < 1:
        raise ValueError(f"min_works must be at least 1, got {min_works}")
    if not subject:
        raise EmptySubject("subject class set is empty")
    about = subject_works(wm3, subject)
    total = len(wj.rows)
    if total == 0 or not about.any():
        raise EmptySubject(f"no work is classified in {sorted(subject)}")
    overall = about.sum() / total

    jw = wj.matrix.T.tocsr()
    works = np.diff(jw.indptr)
    hits = np.asarray(jw @ about.astype(np.float64)).ravel()
    rows = []
    for j, journal in enumerate(wj.cols.labels):
        if works[j] < min_works:
            continue
        n_sub = int(round(hits[j]))
        if n_sub == 0:
            bias = -math.inf
        else:
            bias = math.log2((n_sub / works[j]) / overall)
        rows.append(BiasRow(journal, int(works[j]), n_sub, bias))
    rows.sort(key=lambda r: (-r.bias, r.journal))
    logger.info("Bias of %d journals (overall subject fraction %.4f)", len(rows), overall)
    return BiasTable(float(overall), rows)


def journal_subject_profile(wj: TwoModeNetwork, wm3: TwoModeNetwork) -> TwoModeNetwork:
    """n(JW * b(WM3)): every journal's MSC-class profile, rows summing to 1."""
    jm3 = multiply(transpose(wj), binarize(wm3))
    return row_normalize(jm3, NormMode.BY_WEIGHTED_OUTDEG)


def subject_shares(wj: TwoModeNetwork, wm: TwoModeNetwork, prefix: str,
                   extra: Sequence[str] = ()) -> List[Tuple[str, int, float, float]]:
    """``(journal, works, pure share, share with applications)``, largest pure share first.

    Both shares count (work, 3-char class) pairs of a journal, the same pairs
    that make up ``n(JW * b(WM3))``.  A pair is pure when its class is the
    subject prefix; it is applied when the work carries a full code in that
    class starting with one of ``extra``, so ``68R10`` joins the subject
    without pulling in the rest of ``68R``.
    """
    prefix3 = prefix[:3]
    by_class = partition_by_prefix(wm.cols, 3)
    pairs = binarize(shrink(wm, by_class))
    pure = subject_partition(pairs.cols, prefix3).classes == SUBJECT_PURE
    applied_codes = subject_partition(wm.cols, prefix3, extra).classes == SUBJECT_APPLIED
    masked = TwoModeNetwork(wm.rows, wm.cols,
                            wm.matrix @ sp.diags(applied_codes.astype(np.float64)))
    # same partition, so the same shrunk columns as ``pairs``
    applied = binarize(shrink(masked, by_class))

    jw = transpose(wj)
    journal_pairs = multiply(jw, pairs).matrix
    total = np.asarray(journal_pairs.sum(axis=1)).ravel()
    pure_pairs = np.asarray(journal_pairs @ pure.astype(np.float64)).ravel()
    applied_pairs = np.asarray(multiply(jw, applied).matrix.sum(axis=1)).ravel()
    share_pure = np.zeros_like(total)
    share_all = np.zeros_like(total)
    np.divide(pure_pairs, total, out=share_pure, where=total > 0)
    np.divide(pure_pairs + applied_pairs, total, out=share_all, where=total > 0)

    works = np.diff(wj.matrix.T.tocsr().indptr)
    rows = [(journal, int(works[j]), float(share_pure[j]), float(share_all[j]))
            for j, journal in enumerate(wj.cols.labels)
            if share_all[j] > 0]
    rows.sort(key=lambda r: (-r[2], -r[3], r[0]))
    return rows


def bradford_curve(wj: TwoModeNetwork) -> List[Tuple[int, str, int, int]]:
    """``(rank, journal, works, cumulative works)`` by decreasing journal size."""
    counts = np.diff(wj.matrix.T.tocsr().indptr)
    ordered = sorted(zip(wj.cols.labels, (int(c) for c in counts)),
                     key=lambda item: (-item[1], item[0]))
    rows = []
    cumulative = 0
    for rank, (journal, works) in enumerate(ordered, start=1):
        cumulative += works
        rows.append((rank, journal, works, cumulative))
    return rows


@dataclass(frozen=True)
class JournalNetworks:
    AJ: TwoModeNetwork
    JJ: OneModeNetwork
    JJ_authors: OneModeNetwork


def journal_networks(wa: TwoModeNetwork, wj: TwoModeNetwork, threads: int = 1) -> JournalNetworks:
    """AJ = AW*WJ; JJ = b(JA*AJ) links journals sharing an author;
    JJ_authors = b(JA)*b(AJ) counts the authors two journals share."""
    aj = multiply(transpose(wa), wj, threads)
    ja = transpose(aj)
    jj = binarize(multiply(ja, aj, threads))
    jj_authors = multiply(binarize(ja), binarize(aj), threads)
    return JournalNetworks(aj, jj, jj_authors)
