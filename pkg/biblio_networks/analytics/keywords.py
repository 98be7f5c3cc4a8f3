from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..netcore import (TwoModeNetwork, binarize, multiply, partition_by_prefix, shrink,
                       transpose)

logger = logging.getLogger(__name__)

IDF_BASES = {"e": math.e, "2": 2.0, "10": 10.0}


@dataclass(frozen=True)
class TfidfRow:
    msc: str
    keyword: str
    appearances: float
    all_appearances: float
    tfidf: float


def keyword_msc_network(wm: TwoModeNetwork, wk: TwoModeNetwork, level: int = 3,
                        threads: int = 1) -> TwoModeNetwork:
    """MK = MW * WK with MSCs shrunk to their ``level``-char class.

    A work counts once per class, however many of its codes fall in it.
    """
    wm_l = binarize(shrink(wm, partition_by_prefix(wm.cols, level)))
    return multiply(transpose(wm_l), wk, threads)


def tfidf(mk: TwoModeNetwork, base: float | str = "e") -> List[TfidfRow]:
    """TF-IDF of every (MSC, keyword) link of ``mk``.

    TF is the link value over the MSC's row sum; IDF is
    ``log(#MSCs with keywords / #MSCs linked to the keyword)``.
    """
    if isinstance(base, str):
        base = IDF_BASES[base]
    m = mk.matrix
    row_sums = np.asarray(m.sum(axis=1)).ravel()
    col_sums = np.asarray(m.sum(axis=0)).ravel()
    n_msc = int(np.count_nonzero(np.diff(m.indptr)))
    df = np.bincount(m.indices, minlength=m.shape[1])
    rows = []
    for i, msc in enumerate(mk.rows.labels):
        start, end = m.indptr[i], m.indptr[i + 1]
        for j, value in zip(m.indices[start:end], m.data[start:end]):
            tf = value / row_sums[i]
            idf = math.log(n_msc / df[j], base)
            rows.append(TfidfRow(msc, mk.cols.labels[j], float(value),
                                 float(col_sums[j]), float(tf * idf)))
    rows.sort(key=lambda r: (r.msc, -r.tfidf, r.keyword))
    return rows


def top_tfidf(rows: List[TfidfRow], k: Optional[int] = None,
              prefix: str = "") -> List[TfidfRow]:
    """Highest non-zero scores of the MSC classes starting with ``prefix``."""
    selected = [r for r in rows if r.msc.startswith(prefix) and r.tfidf > 0]
    selected.sort(key=lambda r: (-r.tfidf, r.msc, r.keyword))
    return selected if k is None else selected[:k]
