import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.append(str(Path(__file__).resolve().parent.parent))
from biblio_networks.analytics import (collaboration_networks, link_islands,  # noqa: E402
                                       ps_core)
from biblio_networks.entities import EntityMaps, SynonymPartition  # noqa: E402
from biblio_networks.netcore import (NodeSet, Role, TwoModeNetwork, binarize,  # noqa: E402
                                     build_networks)
from biblio_networks.records import MscCode, Record  # noqa: E402

N_WORKS = 100_000
N_AUTHORS = 30_000
N_JOURNALS = 500
MSC_POOL = ("05C10", "05C35", "05C80", "11A41", "60C05", "68R10", "68Q25", "90B10")


@pytest.fixture(scope="module")
def large_wa():
    rng = np.random.default_rng(2)
    authors = rng.integers(0, N_AUTHORS, size=(N_WORKS, 3))
    rows = np.repeat(np.arange(N_WORKS), 3)
    m = sp.csr_matrix((np.ones(rows.size), (rows, authors.ravel())), shape=(N_WORKS, N_AUTHORS))
    works = NodeSet(Role.W, tuple(f"w{i}" for i in range(N_WORKS)))
    names = NodeSet(Role.A, tuple(f"a.{i}" for i in range(N_AUTHORS)))
    return binarize(TwoModeNetwork(works, names, m))


@pytest.fixture(scope="module")
def large_corpus():
    rng = np.random.default_rng(4)
    authors = rng.integers(0, N_AUTHORS, size=(N_WORKS, 2))
    journals = rng.integers(0, N_JOURNALS, size=N_WORKS)
    codes = rng.integers(0, len(MSC_POOL), size=(N_WORKS, 2))
    records, work_authors, work_journal, work_keywords = [], {}, {}, {}
    for i in range(N_WORKS):
        wid = f"{i:07d}"
        first, second = MSC_POOL[codes[i, 0]], MSC_POOL[codes[i, 1]]
        mscs = (MscCode(first, True),) + ((MscCode(second),) if second != first else ())
        records.append(Record(wid, year=1990 + i % 30, msc_codes=mscs))
        work_authors[wid] = tuple(dict.fromkeys(f"a.{k}" for k in authors[i]))
        work_journal[wid] = f"j{journals[i]:05d}"
        work_keywords[wid] = Counter({f"kw{i % 1000}": 1, f"kw{i % 37}": 1})
    maps = EntityMaps(SynonymPartition(), work_authors, {}, [], work_journal, work_keywords)
    return records, maps


def test_large_corpus_builds_in_time(large_corpus):
    records, maps = large_corpus
    start = time.perf_counter()
    nets = build_networks(records, maps)
    elapsed = time.perf_counter() - start
    assert len(nets.WA.rows) == N_WORKS
    assert nets.WJ.n_arcs == N_WORKS
    assert nets.WMp.n_arcs == N_WORKS
    assert nets.WA.n_arcs == sum(len(a) for a in maps.work_authors.values())
    assert len(nets.WM.cols) == len(MSC_POOL)
    assert elapsed < 60


def test_large_corpus_derives_in_time(large_wa):
    assert large_wa.n_arcs > 290_000
    start = time.perf_counter()
    bundle = collaboration_networks(large_wa, threads=2)
    core = ps_core(bundle.CtPrime, 3.0)
    islands = link_islands(bundle.CtPrime, 2, 10)
    elapsed = time.perf_counter() - start
    assert bundle.Cn.matrix.diagonal().sum() == pytest.approx(N_WORKS)
    assert len(core.members) < N_AUTHORS
    assert all(2 <= len(isl) <= 10 for isl in islands)
    assert elapsed < 60
