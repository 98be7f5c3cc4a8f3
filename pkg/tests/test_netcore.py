import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse as sp

sys.path.append(str(Path(__file__).resolve().parent.parent))
from biblio_networks.entities import build_entity_maps, load_word_list  # noqa: E402
from biblio_networks.netcore import (DimensionMismatch, NodeSet, NormMode,  # noqa: E402
                                     OneModeNetwork, Partition, Role, TwoModeNetwork,
                                     binarize, build_networks, degrees, extract_subnetwork,
                                     indicator_partition, multiply, partition_by_prefix,
                                     restrict, row_normalize, shrink, subject_partition,
                                     symmetrize_drop_diagonal, transpose)
from biblio_networks.records import parse_records  # noqa: E402

FIXTURE = Path(__file__).resolve().parent / "fixtures" / "corpus.txt"


@pytest.fixture(scope="module")
def nets():
    with open(FIXTURE, "rb") as fh:
        records, _ = parse_records(fh)
    return build_networks(records, build_entity_maps(records, load_word_list()))


def _random_net(rng, rows, cols, density=0.3):
    dense = rng.integers(1, 4, size=(len(rows), len(cols))).astype(float)
    dense[rng.random(dense.shape) > density] = 0.0
    return TwoModeNetwork(rows, cols, sp.csr_matrix(dense)), dense


def test_fixture_sizes(nets):
    sizes = nets.sizes()
    assert sizes["nodes"] == {"W": 12, "A": 8, "J": 6, "K": sizes["nodes"]["K"], "M": 13}
    assert sizes["arcs"]["WA"] == 20
    assert sizes["arcs"]["WJ"] == 11
    assert sizes["arcs"]["WM"] == 18
    assert sizes["arcs"]["WMp"] == 12
    assert sizes["works_without_year"] == {"count": 1}
    assert nets.WA.cols.labels == ("smith.john", "jones.mary", "brown.alice", "lee.kim",
                                   "park.jin", "chen.wei", "mustata.c", "dumitrescu.i")


def test_primary_network_shares_msc_nodes(nets):
    assert nets.WMp.cols == nets.WM.cols
    assert nets.WMp.weight("0000002", "05C10") == 1.0
    assert nets.WMp.weight("0000002", "68R10") == 0.0


def test_year_partition(nets):
    assert nets.year.class_of("0000001") == 2001
    assert nets.year.class_of("0000012") == 0


def test_node_set_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        NodeSet(Role.A, ("a", "b", "a"))


def test_two_mode_needs_two_roles():
    nodes = NodeSet(Role.A, ("a",))
    with pytest.raises(ValueError):
        TwoModeNetwork(nodes, nodes, sp.csr_matrix((1, 1)))


def test_negative_weights_are_rejected():
    rows, cols = NodeSet(Role.W, ("w",)), NodeSet(Role.A, ("a",))
    with pytest.raises(ValueError, match="positive"):
        TwoModeNetwork(rows, cols, sp.csr_matrix(np.array([[-1.0]])))


def test_undirected_folds_lower_triangle_and_rejects_loops():
    nodes = NodeSet(Role.A, ("a", "b"))
    net = OneModeNetwork(nodes, sp.csr_matrix(np.array([[0.0, 1.0], [2.0, 0.0]])), directed=False)
    assert net.n_arcs == 1
    assert net.weight("b", "a") == 3.0
    with pytest.raises(ValueError, match="loops"):
        OneModeNetwork(nodes, sp.identity(2, format="csr"), directed=False)


def test_multiply_matches_dense_product_on_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n, k, m = rng.integers(1, 8, size=3)
        rows = NodeSet(Role.W, tuple(f"w{i}" for i in range(n)))
        mid = NodeSet(Role.A, tuple(f"a{i}" for i in range(k)))
        cols = NodeSet(Role.K, tuple(f"k{i}" for i in range(m)))
        left, dl = _random_net(rng, rows, mid)
        right, dr = _random_net(rng, mid, cols)
        product = multiply(left, right)
        assert np.array_equal(product.matrix.toarray(), dl @ dr)
        assert multiply(left, right, threads=3) == product


def _nodes(role, prefix, n):
    return NodeSet(role, tuple(f"{prefix}{i}" for i in range(n)))


def test_product_of_transposes_is_transposed_product():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n, k, m = rng.integers(1, 8, size=3)
        works, authors = _nodes(Role.W, "w", n), _nodes(Role.A, "a", k)
        keywords = _nodes(Role.K, "k", m)
        a, _ = _random_net(rng, works, authors)
        b, _ = _random_net(rng, keywords, works)
        assert multiply(transpose(a), transpose(b)) == transpose(multiply(b, a))


def test_unary_operations_match_dense_oracles():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n, m = rng.integers(1, 9, size=2)
        net, dense = _random_net(rng, _nodes(Role.W, "w", n), _nodes(Role.A, "a", m), density=0.4)
        assert np.array_equal(transpose(net).matrix.toarray(), dense.T)
        assert transpose(net).rows == net.cols
        assert np.array_equal(binarize(net).matrix.toarray(), (dense > 0).astype(float))

        d = (dense > 0).sum(axis=1).astype(float)
        s = dense.sum(axis=1)
        expected = {
            NormMode.BY_OUTDEG: dense / np.maximum(1.0, d)[:, None],
            NormMode.BY_OUTDEG_MINUS_1: dense / np.maximum(1.0, d - 1)[:, None],
            NormMode.BY_WEIGHTED_OUTDEG: dense / np.where(s > 0, s, 1.0)[:, None],
        }
        for mode, oracle in expected.items():
            assert np.allclose(row_normalize(net, mode).matrix.toarray(), oracle)


def test_shrink_matches_dense_oracle_and_keeps_total_weight():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n, m = rng.integers(1, 9, size=2)
        net, dense = _random_net(rng, _nodes(Role.W, "w", n), _nodes(Role.M, "m", m), density=0.5)
        classes = rng.integers(0, 4, size=m)
        shrunk = shrink(net, Partition(net.cols, classes))
        present = np.unique(classes)
        oracle = np.stack([dense[:, classes == c].sum(axis=1) for c in present], axis=1)
        assert shrunk.cols.labels == tuple(str(c) for c in present)
        assert np.array_equal(shrunk.matrix.toarray(), oracle)
        assert shrunk.total_weight == pytest.approx(net.total_weight)

        row_classes = rng.integers(0, 3, size=n)
        by_rows = shrink(net, Partition(net.rows, row_classes))
        assert by_rows.total_weight == pytest.approx(net.total_weight)
        assert by_rows.cols == net.cols


def test_multiply_rejects_mismatched_middle_sets(nets):
    with pytest.raises(DimensionMismatch):
        multiply(nets.WA, nets.WJ)


def test_product_over_same_node_set_is_one_mode(nets):
    co = multiply(transpose(nets.WA), nets.WA)
    assert isinstance(co, OneModeNetwork)
    assert co.weight("lee.kim", "lee.kim") == 4.0
    assert co.weight("lee.kim", "park.jin") == 2.0


def test_transpose_twice_is_identity(nets):
    assert transpose(transpose(nets.WK)) == nets.WK


def test_binarize_and_row_normalize():
    rows, cols = NodeSet(Role.W, ("w1", "w2", "w3")), NodeSet(Role.A, ("a", "b"))
    net = TwoModeNetwork(rows, cols, sp.csr_matrix(np.array([[2.0, 2.0], [3.0, 0.0], [0.0, 0.0]])))
    assert binarize(net).matrix.toarray().tolist() == [[1, 1], [1, 0], [0, 0]]
    assert row_normalize(net).matrix.toarray().tolist() == [[1, 1], [3, 0], [0, 0]]
    weighted = row_normalize(net, NormMode.BY_WEIGHTED_OUTDEG).matrix.toarray()
    assert weighted.tolist() == [[0.5, 0.5], [1, 0], [0, 0]]
    minus = row_normalize(net, "by_outdeg_minus_1").matrix.toarray()
    assert minus.tolist() == [[2, 2], [3, 0], [0, 0]]


def test_row_normalized_rows_sum_to_one(nets):
    norm = row_normalize(nets.WA)
    sums = np.asarray(norm.matrix.sum(axis=1)).ravel()
    has_authors = np.diff(nets.WA.matrix.indptr) > 0
    assert np.allclose(sums[has_authors], 1.0)


def test_shrink_adds_parallel_arcs(nets):
    part = partition_by_prefix(nets.WM.cols, 2)
    shrunk = shrink(nets.WM, part)
    assert "05" in shrunk.cols.labels
    assert shrunk.weight("0000001", "05") == 2.0
    assert shrunk.total_weight == nets.WM.total_weight


def test_shrink_rows_by_year(nets):
    by_year = shrink(nets.WJ, nets.year, side="rows")
    assert by_year.rows.labels == ("0", "2001", "2002", "2003", "2004", "2005", "2006")
    assert by_year.weight("2003", "00000303") == 2.0


def test_shrink_rejects_foreign_partition(nets):
    with pytest.raises(DimensionMismatch):
        shrink(nets.WA, partition_by_prefix(nets.WM.cols, 2), side="cols")


def test_extract_subnetwork(nets):
    part = subject_partition(nets.WM.cols, "05C")
    sub = extract_subnetwork(nets.WM, col_classes=[1], col_partition=part, drop_empty_rows=True)
    assert sub.rows.labels == ("0000001", "0000002", "0000003")
    assert sub.cols.labels == ("05C35", "05C38", "05C10", "05C80")
    assert sub.n_arcs == 4


def test_indicator_partition(nets):
    part = subject_partition(nets.WM.cols, "05C", ["90B"])
    assert part.class_of("90B10") == 2
    tau = indicator_partition(nets.WM, part, [1])
    assert tau.members(1) == ["0000001", "0000002", "0000003"]


def test_restrict_and_symmetrize(nets):
    co = multiply(transpose(nets.WA), nets.WA)
    sym = symmetrize_drop_diagonal(co)
    assert not sym.directed
    assert sym.weight("lee.kim", "park.jin") == 4.0
    assert sym.matrix.diagonal().sum() == 0
    small = restrict(sym, ["park.jin", "lee.kim"])
    assert small.nodes.labels == ("lee.kim", "park.jin")
    assert small.n_arcs == 1


def test_degrees(nets):
    deg = degrees(nets.WA, side="cols")
    assert deg["jones.mary"] == 3.0
    assert degrees(nets.WA)["0000002"] == 3.0


def test_partition_labels():
    nodes = NodeSet(Role.M, ("05C10", "05C35", "11A41"))
    part = partition_by_prefix(nodes, 3)
    assert part == Partition(nodes, np.array([0, 0, 1]))
    assert part.label(1) == "11A"
