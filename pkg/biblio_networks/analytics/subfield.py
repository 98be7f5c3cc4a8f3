from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..netcore import (SUBJECT_PURE, Networks, Partition, TwoModeNetwork,
                       binarize, degrees, extract_subnetwork, indicator_partition,
                       partition_by_prefix, shrink, subject_partition)
from .collaboration import AuthorIndexRow, CollabBundle, author_indices, collaboration_networks
from .cores import CoreResult, ps_core
from .distributions import DistributionTable, distribution
from .islands import Island, link_islands
from .journals import BiasTable, EmptySubject, bradford_curve, journal_bias, subject_shares
from .keywords import TfidfRow, keyword_msc_network, tfidf, top_tfidf

logger = logging.getLogger(__name__)


@dataclass
class SubfieldBundle:
    prefix: str
    sigma: Partition
    tau: Partition
    networks: Dict[str, TwoModeNetwork]
    coclassification: List[Tuple[str, int]]
    distributions: Dict[str, DistributionTable]
    bradford: List[Tuple[int, str, int, int]]
    collaboration: Optional[CollabBundle] = None
    indices: List[AuthorIndexRow] = field(default_factory=list)
    core: Optional[CoreResult] = None
    islands: List[Island] = field(default_factory=list)
    bias: Optional[BiasTable] = None
    shares: List[Tuple[str, int, float, float]] = field(default_factory=list)
    tfidf: List[TfidfRow] = field(default_factory=list)

    @property
    def n_works(self) -> int:
        return int(self.tau.classes.sum())

    @property
    def is_empty(self) -> bool:
        return self.n_works == 0


def coclassification(wm: TwoModeNetwork, tau: Partition) -> List[Tuple[str, int]]:
    """Works of class 1 of ``tau`` per MSC, with all those works shrunk to one node."""
    sub = extract_subnetwork(binarize(wm), {1}, None, tau, None)
    one = Partition(sub.rows, np.zeros(len(sub.rows), dtype=np.int64), {0: "subject"})
    shrunk = shrink(sub, one, side="rows")
    totals = np.asarray(shrunk.matrix.sum(axis=0)).ravel()
    rows = [(label, int(round(c))) for label, c in zip(shrunk.cols.labels, totals) if c > 0]
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows


def subfield_pipeline(nets: Networks, prefix: str, *,
                      extra: Sequence[str] = (),
                      core_level: float = 1.0,
                      island_bounds: Tuple[int, int] = (2, 10),
                      min_works: int = 50,
                      tfidf_level: int = 3,
                      idf_base: str = "e",
                      exclude_et_al: bool = True,
                      threads: int = 1) -> SubfieldBundle:
    """Everything about the works classified under ``prefix``.

    ``prefix=""`` selects every work.  A prefix matching no work yields an
    empty bundle.
    """
    sigma = subject_partition(nets.WM.cols, prefix, extra)
    if prefix:
        tau = indicator_partition(nets.WM, sigma, {SUBJECT_PURE})
    else:
        tau = Partition(nets.WM.rows, np.ones(len(nets.WM.rows), dtype=np.int64),
                        {0: "outside", 1: "inside"})

    restricted = {
        name: extract_subnetwork(net, {1}, None, tau, None,
                                 drop_isolated_cols=bool(prefix))
        for name, net in nets.two_mode().items()
    }
    bundle = SubfieldBundle(
        prefix=prefix,
        sigma=sigma,
        tau=tau,
        networks=restricted,
        coclassification=coclassification(nets.WM, tau),
        distributions={
            "authors_per_work": distribution(degrees(restricted["WA"], "rows")),
            "works_per_author": distribution(degrees(restricted["WA"], "cols")),
            "keywords_per_work": distribution(degrees(restricted["WK"], "rows")),
            "works_per_keyword": distribution(degrees(restricted["WK"], "cols")),
            "mscs_per_work": distribution(degrees(binarize(restricted["WM"]), "rows")),
            "works_per_msc": distribution(degrees(binarize(restricted["WM"]), "cols")),
            "works_per_journal": distribution(degrees(restricted["WJ"], "cols")),
        },
        bradford=bradford_curve(restricted["WJ"]),
    )
    if bundle.is_empty:
        logger.warning("No work is classified under %r; subject bundle is empty", prefix)
        return bundle
    logger.info("Subfield %r: %d of %d works", prefix, bundle.n_works, len(tau.over))

    collab = collaboration_networks(restricted["WA"], exclude_et_al, threads)
    bundle.collaboration = collab
    bundle.indices = author_indices(collab)
    bundle.core = ps_core(collab.CtPrime, core_level)
    bundle.islands = link_islands(collab.CtPrime, *island_bounds)

    wm3 = shrink(nets.WM, partition_by_prefix(nets.WM.cols, 3))
    subject3 = {label for label in wm3.cols.labels if label.startswith(prefix[:3])}
    if len(prefix) > 3:
        logger.warning("Bias and shares use 3-char classes; %r widened to %r", prefix, prefix[:3])
    try:
        bundle.bias = journal_bias(nets.WJ, wm3, subject3, min_works)
    except EmptySubject as exc:
        logger.warning("Skipping journal bias: %s", exc)
    bundle.shares = subject_shares(nets.WJ, nets.WM, prefix, extra)

    mk = keyword_msc_network(nets.WM, nets.WK, tfidf_level, threads)
    bundle.tfidf = top_tfidf(tfidf(mk, idf_base), prefix=prefix[:tfidf_level])
    return bundle
