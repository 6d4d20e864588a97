"""TUDataset parsing, feature encodings, statistics, and serialization."""

from __future__ import annotations

import numpy as np
import pytest

import ifmixup as m

from conftest import MUTAG_DIR, mutag_available


def write(path, text):
    path.write_text(text, encoding="utf-8")


def make_files(tmp_path, a, indicator, labels, node_labels=None, name="T"):
    write(tmp_path / f"{name}_A.txt", a)
    write(tmp_path / f"{name}_graph_indicator.txt", indicator)
    write(tmp_path / f"{name}_graph_labels.txt", labels)
    if node_labels is not None:
        write(tmp_path / f"{name}_node_labels.txt", node_labels)
    return m.TUDatasetFiles(str(tmp_path), name)


class TestParse:
    def test_fixture(self, tmp_path):
        files = m.make_fixture_dataset(str(tmp_path))
        ds = m.parse_tudataset(files)
        assert len(ds) == 1 and ds.num_classes == 1
        g = ds.graphs[0]
        assert g.n == 2
        assert g.e[0, 1] == 1.0 and g.e[1, 0] == 1.0

    def test_two_graphs_split_by_indicator(self, tmp_path):
        files = make_files(
            tmp_path,
            a="1, 2\n2, 1\n3, 4\n4, 3\n4, 5\n5, 4\n",
            indicator="1\n1\n2\n2\n2\n",
            labels="5\n9\n",
        )
        ds = m.parse_tudataset(files)
        assert len(ds) == 2
        assert ds.graphs[0].n == 2 and ds.graphs[1].n == 3
        # labels map to contiguous classes in sorted original order
        assert ds.labels == [0, 1] and ds.label_values == [5, 9]
        # second graph's edges are re-indexed locally: path 0-1-2
        e = ds.graphs[1].e
        assert e[0, 1] == 1.0 and e[1, 2] == 1.0 and e[0, 2] == 0.0

    def test_single_direction_edge_still_undirected(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\n", indicator="1\n1\n", labels="1\n")
        g = m.parse_tudataset(files).graphs[0]
        assert g.e[0, 1] == 1.0 and g.e[1, 0] == 1.0

    def test_comma_and_space_tokens(self, tmp_path):
        files = make_files(tmp_path, a="1,2\n2 , 1\n", indicator="1\n1\n", labels="1\n")
        assert m.parse_tudataset(files).graphs[0].e[0, 1] == 1.0

    def test_missing_file(self, tmp_path):
        files = m.TUDatasetFiles(str(tmp_path), "NOPE")
        with pytest.raises(m.ParseError, match="missing required file"):
            m.parse_tudataset(files)

    def test_node_id_out_of_range_with_line(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\n2, 7\n", indicator="1\n1\n", labels="1\n")
        with pytest.raises(m.ParseError, match=r"T_A.txt line 2: node id out of range 1\.\.2"):
            m.parse_tudataset(files)

    def test_non_integer_token_with_line(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\nx, 1\n", indicator="1\n1\n", labels="1\n")
        with pytest.raises(m.ParseError, match="T_A.txt line 2: non-integer token"):
            m.parse_tudataset(files)

    def test_edge_crossing_graphs(self, tmp_path):
        files = make_files(tmp_path, a="1, 3\n", indicator="1\n1\n2\n", labels="1\n2\n")
        with pytest.raises(m.ParseError, match="crosses graphs"):
            m.parse_tudataset(files)

    def test_self_loop_rejected(self, tmp_path):
        files = make_files(tmp_path, a="1, 1\n", indicator="1\n1\n", labels="1\n")
        with pytest.raises(m.ParseError, match="self-loop on node 1"):
            m.parse_tudataset(files)

    def test_gapped_graph_ids_rejected(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\n", indicator="1\n3\n", labels="1\n2\n")
        with pytest.raises(m.ParseError, match="consecutive"):
            m.parse_tudataset(files)

    def test_label_count_mismatch(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\n", indicator="1\n1\n", labels="1\n2\n")
        with pytest.raises(m.ParseError, match="2 labels for 1 graphs"):
            m.parse_tudataset(files)

    def test_node_label_count_mismatch(self, tmp_path):
        files = make_files(
            tmp_path, a="1, 2\n", indicator="1\n1\n", labels="1\n", node_labels="0\n"
        )
        with pytest.raises(m.ParseError, match="1 labels for 2 nodes"):
            m.parse_tudataset(files)

    def test_wrong_column_count(self, tmp_path):
        files = make_files(tmp_path, a="1, 2, 3\n", indicator="1\n1\n", labels="1\n")
        with pytest.raises(m.ParseError, match="expected 2 values, got 3"):
            m.parse_tudataset(files)

    def test_every_parsed_graph_validates(self, tmp_path):
        ds = m.make_synthetic_molecules(20, seed=3)
        enc = m.encode_node_features(ds)
        for g in enc.graphs():
            assert m.validate_graph(g) == []
            assert m.is_binary(g)


class TestEncodings:
    def parsed(self, tmp_path):
        return make_files(
            tmp_path,
            a="1, 2\n2, 1\n2, 3\n3, 2\n",
            indicator="1\n1\n1\n",
            labels="1\n",
            node_labels="4\n2\n4\n",
        )

    def test_one_hot_labels(self, tmp_path):
        ds = m.encode_node_features(m.parse_tudataset(self.parsed(tmp_path)), "one_hot_labels")
        assert ds.feature_dim == 2  # labels {2, 4} -> indices {0, 1}
        v = ds.graphs()[0].v
        assert np.array_equal(v, [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])

    def test_label_index_is_sorted_position(self, tmp_path):
        files = make_files(
            tmp_path,
            a="1, 2\n",
            indicator="1\n1\n",
            labels="1\n",
            node_labels="2\n6\n",
            name="L",
        )
        ds = m.encode_node_features(m.parse_tudataset(files), "one_hot_labels")
        # label 2 -> index 0, label 6 -> index 1
        assert np.array_equal(ds.graphs()[0].v, [[1.0, 0.0], [0.0, 1.0]])

    def test_one_hot_degree(self, tmp_path):
        ds = m.encode_node_features(m.parse_tudataset(self.parsed(tmp_path)), "one_hot_degree")
        assert ds.feature_dim == 3  # max degree 2 -> d = 3
        v = ds.graphs()[0].v
        assert np.array_equal(v, [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])

    def test_labels_mode_requires_node_labels(self, tmp_path):
        files = make_files(tmp_path, a="1, 2\n", indicator="1\n1\n", labels="1\n", name="NL")
        with pytest.raises(ValueError, match="node labels required"):
            m.encode_node_features(m.parse_tudataset(files), "one_hot_labels")

    def test_unknown_mode(self, tmp_path):
        with pytest.raises(ValueError, match="unknown encoding mode"):
            m.encode_node_features(m.parse_tudataset(self.parsed(tmp_path)), "bag_of_words")

    @pytest.mark.parametrize("mode", ["one_hot_labels", "one_hot_degree"])
    def test_vocabulary_independent(self, mode):
        ds = m.encode_node_features(m.make_synthetic_molecules(30, seed=1), mode)
        fb = m.feature_vocabulary(ds)
        assert fb.vocabulary_independent()

    def test_load_dataset_defaults_to_labels(self, tmp_path):
        m.write_tudataset(m.make_synthetic_molecules(6, seed=2), str(tmp_path), "SYN")
        ds = m.load_dataset(str(tmp_path), "SYN")
        assert ds.feature_dim == 7  # synthetic node labels 0..6


class TestRoundTrip:
    def test_write_parse_round_trip(self, tmp_path):
        ds = m.make_synthetic_molecules(12, seed=5)
        files = m.write_tudataset(ds, str(tmp_path), "RT")
        back = m.parse_tudataset(files)
        assert len(back) == len(ds)
        assert back.labels == ds.labels
        assert back.label_values == ds.label_values
        for a, b in zip(ds.graphs, back.graphs):
            assert np.array_equal(a.e, b.e)
            assert np.array_equal(a.node_labels, b.node_labels)

    def test_weighted_graph_bit_exact(self, tmp_path):
        rng = np.random.default_rng(6)
        n = 6
        e = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.5), k=1)
        e = e + e.T
        g = m.NodeFeaturedGraph(rng.random((n, 4)), e)
        m.write_weighted_graph(g, str(tmp_path), "MIXED")
        back = m.read_weighted_graph(str(tmp_path), "MIXED")
        assert np.array_equal(back.v, g.v)  # repr round trip is exact
        assert np.array_equal(back.e, g.e)

    def test_read_weighted_missing_features(self, tmp_path):
        with pytest.raises(m.ParseError, match="missing required file"):
            m.read_weighted_graph(str(tmp_path), "GHOST")


class TestSyntheticMolecules:
    def test_deterministic(self):
        a = m.make_synthetic_molecules(20, seed=9)
        b = m.make_synthetic_molecules(20, seed=9)
        for ga, gb in zip(a.graphs, b.graphs):
            assert np.array_equal(ga.e, gb.e)
            assert np.array_equal(ga.node_labels, gb.node_labels)

    def test_shape_of_corpus(self):
        ds = m.make_synthetic_molecules(188, seed=7)
        assert len(ds) == 188 and ds.num_classes == 2
        assert ds.labels == [i % 2 for i in range(188)]
        sizes = [g.n for g in ds.graphs]
        assert min(sizes) >= 10 and max(sizes) <= 20

    def test_class_topologies(self):
        ds = m.make_synthetic_molecules(30, seed=7)
        for g, cls in zip(ds.graphs, ds.labels):
            degrees = g.e.sum(axis=1)
            undirected = int(np.count_nonzero(np.triu(g.e, k=1)))
            if cls == 0:
                assert np.all(degrees >= 2)  # ring core
                assert undirected >= g.n
            else:
                assert undirected == g.n - 1  # tree
                assert np.any(degrees == 1)


class TestStats:
    def test_fixture_stats(self, tmp_path):
        files = m.make_fixture_dataset(str(tmp_path))
        ds = m.load_dataset(str(tmp_path), "FIXTURE", mode="one_hot_degree")
        st = m.dataset_stats(ds)
        assert st.num_graphs == 1 and st.mean_nodes == 2.0 and st.mean_edges == 1.0
        assert st.num_classes == 1
        assert "graphs:      1" in st.to_text()
        assert m.compare_table5(st) is None  # unknown name -> no reference row

    def test_table5_catalog(self):
        assert set(m.TABLE5) == {
            "MUTAG",
            "PTC_MR",
            "NCI109",
            "NCI1",
            "ENZYMES",
            "PROTEINS",
            "IMDB-M",
            "IMDB-B",
        }
        assert m.TABLE5["MUTAG"].graphs == 188
        assert m.TABLE5["PROTEINS"].graphs == 1113 and m.TABLE5["PROTEINS"].classes == 2
        assert m.TABLE5["NCI1"].graphs == 4110 and m.TABLE5["NCI1"].node_label_count == 37
        assert m.TABLE5["ENZYMES"].graphs == 600 and m.TABLE5["ENZYMES"].classes == 6

    def test_compare_passes_on_matching_stats(self):
        st = m.DatasetStats("MUTAG", 188, 17.93, 19.79, 7, 2)
        check = m.compare_table5(st)
        assert check is not None and check.passed
        assert "PASS" in check.to_text()

    def test_compare_fails_on_wrong_counts(self):
        st = m.DatasetStats("MUTAG", 187, 17.93, 19.79, 7, 2)
        check = m.compare_table5(st)
        assert not check.passed and "FAIL" in check.to_text()

    def test_edge_figure_halved(self):
        st = m.DatasetStats("MUTAG", 188, 17.93, 39.6, 7, 2)  # directed figure used raw
        check = m.compare_table5(st)
        edges_row = [r for r in check.rows if r[0] == "mean edges"][0]
        assert edges_row[1] == pytest.approx(19.8)
        assert not edges_row[3]

    @pytest.mark.skipif(not mutag_available(), reason="MUTAG files not present")
    def test_mutag_matches_reference(self):
        ds = m.load_dataset(MUTAG_DIR, "MUTAG")
        check = m.compare_table5(m.dataset_stats(ds))
        assert check is not None and check.passed
