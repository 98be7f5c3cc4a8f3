import math
import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.append(str(Path(__file__).resolve().parent.parent))
from biblio_networks.analytics import (EmptySubject, bradford_curve, journal_bias,  # noqa: E402
                                       journal_networks, journal_subject_profile,
                                       subject_shares)
from biblio_networks.netcore import (NodeSet, Role, TwoModeNetwork,  # noqa: E402
                                    partition_by_prefix, shrink)


@pytest.fixture(scope="module")
def wm3(fixture_nets):
    return shrink(fixture_nets.WM, partition_by_prefix(fixture_nets.WM.cols, 3))


def test_bias_against_whole_corpus(fixture_nets, wm3):
    table = journal_bias(fixture_nets.WJ, wm3, {"05C"}, min_works=1)
    assert table.overall_fraction == pytest.approx(0.25)
    assert [(r.journal, r.bias) for r in table.ranked] == [("00000101", pytest.approx(2.0)),
                                                           ("00000202", pytest.approx(2.0))]
    assert [r.journal for r in table.without_subject] == ["00000303", "00000404",
                                                          "00000505", "00000606"]
    assert all(math.isinf(r.bias) and r.bias < 0 for r in table.without_subject)
    assert [r.journal for r in table.positive(1)] == ["00000101"]
    assert table.negative() == []


def test_bias_respects_min_works(fixture_nets, wm3):
    table = journal_bias(fixture_nets.WJ, wm3, {"05C"}, min_works=2)
    assert [r.journal for r in table.rows] == ["00000101", "00000303", "00000404"]
    assert table.rows[0].works == 2
    assert table.rows[0].subject_works == 2


def test_bias_with_no_subject_works(fixture_nets, wm3):
    with pytest.raises(EmptySubject):
        journal_bias(fixture_nets.WJ, wm3, {"99Z"}, min_works=1)
    with pytest.raises(EmptySubject):
        journal_bias(fixture_nets.WJ, wm3, set(), min_works=1)
    with pytest.raises(ValueError, match="min_works"):
        journal_bias(fixture_nets.WJ, wm3, {"05C"}, min_works=0)


def test_subject_profile_rows_sum_to_one(fixture_nets, wm3):
    profile = journal_subject_profile(fixture_nets.WJ, wm3)
    assert profile.weight("00000101", "05C") == pytest.approx(2 / 3)
    assert profile.weight("00000101", "68R") == pytest.approx(1 / 3)
    sums = profile.matrix.sum(axis=1)
    assert sums.min() == pytest.approx(1.0)
    assert sums.max() == pytest.approx(1.0)


def test_subject_shares_with_applications(fixture_nets):
    rows = subject_shares(fixture_nets.WJ, fixture_nets.WM, "05C", ["68R10"])
    assert [r[0] for r in rows] == ["00000101", "00000202"]
    journal, works, pure, applied = rows[0]
    assert works == 2
    assert pure == pytest.approx(2 / 3)
    assert applied == pytest.approx(1.0)
    assert rows[1][2:] == (pytest.approx(0.5), pytest.approx(0.5))


def test_application_codes_do_not_pull_in_their_whole_class():
    works = NodeSet(Role.W, ("w1", "w2", "w3", "w4"))
    journals = NodeSet(Role.J, ("J1", "J2", "J3"))
    wj = TwoModeNetwork(works, journals,
                        sp.csr_matrix(np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]])))
    mscs = NodeSet(Role.M, ("05C10", "68R05", "68R10"))
    wm = TwoModeNetwork(works, mscs,
                        sp.csr_matrix(np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 0]])))
    rows = subject_shares(wj, wm, "05C", ["68R10"])
    # J2 only has 68R05, which is not a listed application code
    assert [r[0] for r in rows] == ["J1", "J3"]
    assert rows[0] == ("J1", 2, pytest.approx(2 / 3), pytest.approx(2 / 3))
    assert rows[1] == ("J3", 1, 0.0, pytest.approx(1.0))
    whole_class = subject_shares(wj, wm, "05C", ["68R"])
    assert [r[0] for r in whole_class] == ["J1", "J2", "J3"]


def test_shares_agree_without_application_codes(fixture_nets):
    rows = subject_shares(fixture_nets.WJ, fixture_nets.WM, "05C")
    assert [r[0] for r in rows] == ["00000101", "00000202"]
    assert all(r[2] == pytest.approx(r[3]) for r in rows)
    works = NodeSet(Role.W, ("w1", "w2"))
    wj = TwoModeNetwork(works, NodeSet(Role.J, ("J",)), sp.csr_matrix(np.ones((2, 1))))
    wm = TwoModeNetwork(works, NodeSet(Role.M, ("05C10", "11A41", "60C05")),
                        sp.csr_matrix(np.array([[1.0, 0, 0], [0, 1, 1]])))
    assert subject_shares(wj, wm, "05C") == [("J", 2, pytest.approx(1 / 3), pytest.approx(1 / 3))]


def test_bradford_curve(fixture_nets):
    rows = bradford_curve(fixture_nets.WJ)
    assert rows[0] == (1, "00000303", 4, 4)
    assert [r[3] for r in rows] == [4, 6, 8, 9, 10, 11]


def test_journal_networks(fixture_nets):
    jnets = journal_networks(fixture_nets.WA, fixture_nets.WJ)
    assert jnets.AJ.weight("smith.john", "00000101") == 2.0
    assert jnets.JJ.weight("00000101", "00000202") == 1.0
    assert jnets.JJ.weight("00000303", "00000404") == 1.0
    assert jnets.JJ.weight("00000101", "00000303") == 0.0
    assert jnets.JJ_authors.weight("00000101", "00000101") == 3.0
    assert jnets.JJ_authors.weight("00000101", "00000606") == 1.0


def _synthetic():
    # j0: 4 works, 1 on 05C; j1: 4 works, 2 on 05C; j2: 8 works, 1 on 05C
    layout = [("j0", 4, 1), ("j1", 4, 2), ("j2", 8, 1)]
    journals = [j for j, _, _ in layout]
    wj_rows, wm_rows = [], []
    for j, (_, works, about) in enumerate(layout):
        for k in range(works):
            wj_rows.append([1.0 if c == j else 0.0 for c in range(3)])
            wm_rows.append([1.0, 0.0] if k < about else [0.0, 1.0])
    works = NodeSet(Role.W, tuple(f"w{i}" for i in range(len(wj_rows))))
    wj = TwoModeNetwork(works, NodeSet(Role.J, tuple(journals)), sp.csr_matrix(np.array(wj_rows)))
    wm3 = TwoModeNetwork(works, NodeSet(Role.M, ("05C", "11A")), sp.csr_matrix(np.array(wm_rows)))
    return wj, wm3


def test_bias_signs():
    wj, wm3 = _synthetic()
    table = journal_bias(wj, wm3, {"05C"}, min_works=1)
    assert table.overall_fraction == pytest.approx(0.25)
    assert {r.journal: r.bias for r in table.rows} == {
        "j0": pytest.approx(0.0), "j1": pytest.approx(1.0), "j2": pytest.approx(-1.0),
    }
    assert [r.journal for r in table.positive()] == ["j1"]
    assert [r.journal for r in table.negative()] == ["j2"]


def _doubled(wj, wm3):
    works = NodeSet(Role.W, tuple(f"w{i}" for i in range(2 * len(wj.rows))))
    wj2 = TwoModeNetwork(works, wj.cols, sp.vstack([wj.matrix, wj.matrix]).tocsr())
    wm2 = TwoModeNetwork(works, wm3.cols, sp.vstack([wm3.matrix, wm3.matrix]).tocsr())
    return wj2, wm2


@pytest.mark.parametrize("source", ["synthetic", "fixture"])
def test_bias_is_invariant_under_duplication(source, fixture_nets, wm3):
    wj, wm3 = _synthetic() if source == "synthetic" else (fixture_nets.WJ, wm3)
    once = journal_bias(wj, wm3, {"05C"}, min_works=1)
    twice = journal_bias(*_doubled(wj, wm3), {"05C"}, min_works=1)
    assert twice.overall_fraction == pytest.approx(once.overall_fraction)
    assert [(r.journal, r.bias) for r in twice.rows] == [
        (r.journal, pytest.approx(r.bias)) for r in once.rows
    ]
    assert [r.works for r in twice.rows] == [2 * r.works for r in once.rows]


def test_profile_of_evenly_split_journal():
    works = NodeSet(Role.W, ("w1", "w2", "w3", "w4"))
    wj = TwoModeNetwork(works, NodeSet(Role.J, ("j",)), sp.csr_matrix(np.ones((4, 1))))
    wm3 = TwoModeNetwork(works, NodeSet(Role.M, ("05C", "11A")),
                         sp.csr_matrix(np.array([[1.0, 0], [1, 0], [0, 1], [0, 1]])))
    profile = journal_subject_profile(wj, wm3)
    assert profile.matrix.toarray().tolist() == [[0.5, 0.5]]
