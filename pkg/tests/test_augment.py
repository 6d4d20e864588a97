"""DropEdge, DropNode, readout mixing, and the random-layer hidden mixing."""

from __future__ import annotations

import numpy as np
import pytest

import ifmixup as m

from conftest import graphs_equal, rand_one_hot_graph


def path5() -> m.NodeFeaturedGraph:
    e = np.zeros((5, 5))
    for i in range(4):
        e[i, i + 1] = e[i + 1, i] = 1.0
    return m.NodeFeaturedGraph(np.eye(5), e)


def edge_count(g: m.NodeFeaturedGraph) -> int:
    return int(np.count_nonzero(np.triu(g.e, k=1)))


class TestAugmentSpec:
    def test_defaults(self):
        spec = m.AugmentSpec()
        assert spec.kind == "none" and spec.ratio == 0.0

    def test_kinds_catalog(self):
        assert m.AUGMENT_KINDS == (
            "none",
            "if_mixup",
            "drop_edge",
            "drop_node",
            "mixup_graph",
            "manifold_mixup",
            "if_mixup_shuffled",
        )
        for kind in m.AUGMENT_KINDS:
            m.AugmentSpec(kind=kind)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError, match="unknown augmentation"):
            m.AugmentSpec(kind="graph_mix")

    @pytest.mark.parametrize("ratio", [-0.1, 1.0, 1.5])
    def test_ratio_range(self, ratio):
        with pytest.raises(ValueError, match="ratio"):
            m.AugmentSpec(kind="drop_edge", ratio=ratio)


class TestDropEdge:
    def test_ratio_zero_identity(self):
        g = path5()
        out = m.drop_edge(g, 0.0, np.random.default_rng(0))
        assert graphs_equal(out, g)

    def test_floor_count(self):
        # 10 undirected edges at ratio 0.2 -> exactly 8 remain
        rng = np.random.default_rng(1)
        g = rand_one_hot_graph(rng, 8, 3, edge_prob=1.0)  # complete: 28 edges
        e = np.zeros((6, 6))
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (3, 5), (4, 5), (2, 4)]
        for i, j in pairs:
            e[i, j] = e[j, i] = 1.0
        g10 = m.NodeFeaturedGraph(np.eye(6), e)
        assert edge_count(g10) == 10
        out = m.drop_edge(g10, 0.2, np.random.default_rng(2))
        assert edge_count(out) == 8

    def test_output_symmetric_and_valid(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            g = rand_one_hot_graph(rng, 7, 3, edge_prob=0.5)
            out = m.drop_edge(g, 0.4, rng)
            assert m.validate_graph(out) == []
            assert np.array_equal(out.e, out.e.T)
            assert np.array_equal(out.v, g.v)

    def test_surviving_fraction(self):
        # floor(0.3 * 10) = 3 dropped per trial, deterministically
        e = np.zeros((6, 6))
        pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (3, 5), (4, 5), (2, 4)]
        for i, j in pairs:
            e[i, j] = e[j, i] = 1.0
        g = m.NodeFeaturedGraph(np.eye(6), e)
        rng = np.random.default_rng(4)
        survived = [edge_count(m.drop_edge(g, 0.3, rng)) for _ in range(10_000)]
        frac = np.mean(survived) / 10
        assert abs(frac - 0.7) < 0.02

    def test_each_edge_equally_likely_to_drop(self):
        e = np.zeros((4, 4))
        for i, j in [(0, 1), (1, 2), (2, 3)]:
            e[i, j] = e[j, i] = 1.0
        g = m.NodeFeaturedGraph(np.eye(4), e)
        rng = np.random.default_rng(5)
        gone = np.zeros(3)
        for _ in range(9000):
            out = m.drop_edge(g, 1 / 3, rng)  # drops exactly one of three
            for idx, (i, j) in enumerate([(0, 1), (1, 2), (2, 3)]):
                if out.e[i, j] == 0.0:
                    gone[idx] += 1
        assert np.all(np.abs(gone / 9000 - 1 / 3) < 0.02)

    def test_requires_binary(self):
        soft = m.NodeFeaturedGraph(np.eye(2), np.array([[0.0, 0.5], [0.5, 0.0]]))
        with pytest.raises(ValueError, match="binary"):
            m.drop_edge(soft, 0.2, np.random.default_rng(0))


class TestDropNode:
    def test_ratio_zero_identity(self):
        g = path5()
        assert graphs_equal(m.drop_node(g, 0.0, np.random.default_rng(0)), g)

    def test_path_drop_middle(self):
        # forcing node 2 out of the 5-path leaves edges {0-1, 3-4} re-indexed
        g = path5()
        for seed in range(100):
            rng = np.random.default_rng(seed)
            out = m.drop_node(g, 0.2, rng)  # drops exactly one node
            if out.v[:, 2].sum() == 0.0:  # node 2 (one-hot feature 2) is gone
                assert out.n == 4
                assert edge_count(out) == 2
                assert out.e[0, 1] == 1.0 and out.e[2, 3] == 1.0
                return
        pytest.fail("node 2 never selected across 100 seeds")

    def test_floor_count(self):
        g = path5()
        out = m.drop_node(g, 0.4, np.random.default_rng(1))  # floor(0.4*5)=2 dropped
        assert out.n == 3

    def test_relative_order_preserved(self):
        g = path5()
        out = m.drop_node(g, 0.4, np.random.default_rng(2))
        kept = [int(np.argmax(row)) for row in out.v]  # one-hot ids
        assert kept == sorted(kept)

    def test_all_dropped_rejected(self):
        g = path5()
        with pytest.raises(ValueError, match="empty graph"):
            m.drop_node(g, 1.0, np.random.default_rng(0))

    def test_outputs_validate(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            g = rand_one_hot_graph(rng, 9, 4, edge_prob=0.4)
            out = m.drop_node(g, 0.4, rng)
            assert m.validate_graph(out) == []
            assert m.is_binary(out)


class TestMixReadout:
    def test_identity_at_one(self):
        ha, hb = np.array([2.0, 0.0]), np.array([0.0, 2.0])
        assert np.array_equal(m.mix_readout(ha, hb, 1.0), ha)

    def test_midpoint(self):
        assert np.allclose(m.mix_readout(np.array([2.0, 0.0]), np.array([0.0, 2.0]), 0.5), [1.0, 1.0])

    def test_convexity(self):
        rng = np.random.default_rng(6)
        ha, hb = rng.normal(size=8), rng.normal(size=8)
        out = m.mix_readout(ha, hb, 0.3)
        assert out.shape == ha.shape
        assert np.all(out <= np.maximum(ha, hb) + 1e-12)
        assert np.all(out >= np.minimum(ha, hb) - 1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shapes differ"):
            m.mix_readout(np.zeros(3), np.zeros(4), 0.5)

    def test_lambda_range(self):
        with pytest.raises(ValueError, match="lambda"):
            m.mix_readout(np.zeros(3), np.zeros(3), 1.5)


class TestMixHidden:
    def setup_traces(self, arch="gin", k=3, hidden=4):
        cfg = m.ModelConfig(arch=arch, k=k, hidden=hidden)
        params = m.init_params(cfg, 3, 2, np.random.default_rng(7))
        rng = np.random.default_rng(8)
        ga, gb = rand_one_hot_graph(rng, 5, 3), rand_one_hot_graph(rng, 6, 3)
        return params, m.forward_classify(ga, params), m.forward_classify(gb, params)

    def test_fixed_layer(self):
        params, ta, tb = self.setup_traces()
        out = m.mix_hidden(ta, tb, 0.25, k=2)
        assert out.layer == 2
        assert np.allclose(out.vector, 0.25 * ta.pooled[1] + 0.75 * tb.pooled[1])

    def test_lambda_one_uses_a_side(self):
        params, ta, tb = self.setup_traces()
        out = m.mix_hidden(ta, tb, 1.0, k=1)
        assert np.array_equal(out.vector, ta.pooled[0])

    def test_random_layer_in_range(self):
        params, ta, tb = self.setup_traces(k=3)
        rng = np.random.default_rng(9)
        layers = {m.mix_hidden(ta, tb, 0.5, rng=rng).layer for _ in range(60)}
        assert layers == {1, 2, 3}

    def test_random_layer_needs_rng(self):
        params, ta, tb = self.setup_traces()
        with pytest.raises(ValueError, match="rng"):
            m.mix_hidden(ta, tb, 0.5)

    def test_layer_out_of_range(self):
        params, ta, tb = self.setup_traces(k=2)
        with pytest.raises(ValueError, match="out of range"):
            m.mix_hidden(ta, tb, 0.5, k=3)

    def test_depth_mismatch(self):
        _, ta, _ = self.setup_traces(k=2)
        _, _, tb = self.setup_traces(k=3)
        with pytest.raises(ValueError, match="different depth"):
            m.mix_hidden(ta, tb, 0.5, k=1)

    def test_gin_probs_use_layer_block(self):
        params, ta, tb = self.setup_traces(arch="gin", k=2, hidden=4)
        out = m.mix_hidden(ta, tb, 0.4, k=2, params=params)
        w = params.tensors["head.W"][4:8]  # second layer's row block
        logits = out.vector @ w + params.tensors["head.b"]
        expected = np.exp(logits - logits.max())
        expected /= expected.sum()
        assert np.allclose(out.probs, expected)

    def test_gcn_final_layer_matches_mix_readout(self):
        params, ta, tb = self.setup_traces(arch="gcn", k=3, hidden=4)
        out = m.mix_hidden(ta, tb, 0.3, k=3, params=params)
        assert np.allclose(out.vector, m.mix_readout(ta.h_graph, tb.h_graph, 0.3))
        logits = out.vector @ params.tensors["head.W"] + params.tensors["head.b"]
        expected = np.exp(logits - logits.max())
        expected /= expected.sum()
        assert np.allclose(out.probs, expected)
