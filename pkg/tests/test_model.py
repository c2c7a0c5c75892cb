"""Network-level tests: shapes, masking, attention semantics, gradients."""

import numpy as np
import pytest

from labelwise import losses
from labelwise import model as md
from labelwise import numerics as nm
from labelwise.errors import ConfigError, DegenerateMaskError
from labelwise.numerics import Tensor

from oracles import finite_difference, max_rel_err


def tiny_setup(seed=0, n=6, d=8, layers=1, heads=2, num_labels=4, batch=2,
               positional=True, dropout=0.0, vocab=12):
    config = md.EncoderConfig(
        layers=layers, heads=heads, d_model=d, dropout=dropout,
        max_len=max(n, 8), positional=positional,
    )
    rng = np.random.default_rng(seed)
    emb = rng.normal(scale=0.5, size=(vocab, d))
    emb[0] = 0.0
    params = md.init_params(config, num_labels, emb, rng)
    ids = rng.integers(2, vocab, size=(batch, n))
    pad_mask = np.ones((batch, n), dtype=bool)
    return config, params, ids, pad_mask, rng


class TestEncode:
    def test_output_shape_preserves_width(self):
        config, params, ids, mask, _ = tiny_setup()
        h = md.encode(ids, mask, params, config)
        assert h.shape == (2, 6, 8)

    def test_permutation_equivariance_without_positions(self):
        config, params, ids, mask, rng = tiny_setup(positional=False)
        h = md.encode(ids, mask, params, config).data
        perm = rng.permutation(6)
        h_perm = md.encode(ids[:, perm], mask, params, config).data
        np.testing.assert_allclose(h_perm, h[:, perm], atol=1e-12)

    def test_pad_content_cannot_leak(self):
        config, params, ids, mask, _ = tiny_setup()
        ids = ids.copy()
        ids[:, -2:] = 0
        mask = mask.copy()
        mask[:, -2:] = False
        h1 = md.encode(ids, mask, params, config).data
        # rewrite the PAD embedding row and re-run
        params.embeddings.data[0] = 37.0
        h2 = md.encode(ids, mask, params, config).data
        np.testing.assert_array_equal(h1[:, :-2], h2[:, :-2])

    def test_all_pad_document_rejected(self):
        config, params, ids, mask, _ = tiny_setup()
        mask = mask.copy()
        mask[0, :] = False
        with pytest.raises(DegenerateMaskError):
            md.encode(ids, mask, params, config)

    def test_width_mismatch_is_config_error(self):
        config, params, ids, mask, _ = tiny_setup()
        bad = md.EncoderConfig(layers=1, heads=2, d_model=16, max_len=8)
        with pytest.raises(ConfigError):
            md.encode(ids, mask, params, bad)

    def test_sequence_longer_than_max_len_rejected(self):
        config, params, ids, mask, _ = tiny_setup()
        long_ids = np.tile(ids, (1, 3))
        long_mask = np.tile(mask, (1, 3))
        with pytest.raises(ConfigError):
            md.encode(long_ids, long_mask, params, config)


class TestLabelAttention:
    def test_zero_scores_give_uniform_rows_and_mean_pooling(self):
        rng = np.random.default_rng(1)
        h = Tensor(rng.normal(size=(5, 8)))
        u = Tensor(rng.normal(size=(8, 16)))
        v = Tensor(np.zeros((3, 16)))
        attn, pooled = md.label_attention(h, None, u, v)
        np.testing.assert_allclose(attn.data, np.full((3, 5), 0.2), atol=1e-12)
        np.testing.assert_allclose(
            pooled.data, np.tile(h.data.mean(axis=0), (3, 1)), atol=1e-12
        )

    def test_single_token_attends_fully(self):
        rng = np.random.default_rng(2)
        h = Tensor(rng.normal(size=(1, 8)))
        u = Tensor(rng.normal(size=(8, 16)))
        v = Tensor(rng.normal(size=(4, 16)))
        attn, pooled = md.label_attention(h, None, u, v)
        np.testing.assert_array_equal(attn.data, np.ones((4, 1)))
        np.testing.assert_array_equal(pooled.data, np.tile(h.data[0], (4, 1)))

    def test_dominant_score_concentrates_mass(self):
        # engineer scores ~ [10, 0, 0] for label 0
        h = Tensor(np.array([[10.0], [0.0], [0.0]]))
        u = Tensor(np.array([[np.arctanh(0.99) / 10.0]]))  # tanh(h u) ~ [.99, 0, 0]
        v = Tensor(np.array([[10.0 / 0.99]]))              # scores ~ [10, 0, 0]
        attn, pooled = md.label_attention(h, None, u, v)
        assert attn.data[0, 0] > 0.9999 - 1e-6
        assert abs(pooled.data[0, 0] - h.data[0, 0]) < 1e-3

    def test_rows_are_distributions_with_pad_zero(self):
        rng = np.random.default_rng(3)
        h = Tensor(rng.normal(size=(2, 7, 8)))
        u = Tensor(rng.normal(size=(8, 16)))
        v = Tensor(rng.normal(size=(5, 16)))
        mask = np.ones((2, 7), dtype=bool)
        mask[:, 5:] = False
        attn, pooled = md.label_attention(h, mask, u, v)
        np.testing.assert_allclose(attn.data.sum(axis=-1), 1.0, atol=1e-9)
        assert np.all(attn.data >= 0)
        assert np.all(attn.data[:, :, 5:] == 0.0)

    def test_pooled_vector_in_convex_hull(self):
        rng = np.random.default_rng(4)
        h = Tensor(rng.normal(size=(6, 8)))
        u = Tensor(rng.normal(size=(8, 16)))
        v = Tensor(rng.normal(size=(3, 16)))
        _, pooled = md.label_attention(h, None, u, v)
        lo, hi = h.data.min(axis=0), h.data.max(axis=0)
        assert np.all(pooled.data >= lo - 1e-12)
        assert np.all(pooled.data <= hi + 1e-12)

    def test_argmax_invariant_to_constant_score_shift(self):
        rng = np.random.default_rng(5)
        h = rng.normal(size=(6, 4))
        u = rng.normal(size=(4, 8))
        v = rng.normal(size=(3, 8))
        base = np.tanh(h @ u) @ v.T  # (n, L) pre-softmax scores
        attn, _ = md.label_attention(Tensor(h), None, Tensor(u), Tensor(v))
        for shift in (0.0, 5.0, -3.0):
            shifted = nm.softmax(Tensor(base.T + shift)).data
            np.testing.assert_array_equal(
                np.argmax(shifted, axis=-1), np.argmax(attn.data, axis=-1)
            )

    def test_all_pad_rejected(self):
        h = Tensor(np.zeros((1, 3, 4)))
        with pytest.raises(DegenerateMaskError):
            md.label_attention(h, np.zeros((1, 3), dtype=bool),
                               Tensor(np.zeros((4, 8))), Tensor(np.zeros((2, 8))))


class TestClassify:
    def test_zero_heads_give_half_probability(self):
        pooled = Tensor(np.random.default_rng(0).normal(size=(3, 8)))
        logits = md.classify(pooled, Tensor(np.zeros((3, 8))), Tensor(np.zeros(3)))
        np.testing.assert_array_equal(logits.data, np.zeros(3))
        np.testing.assert_array_equal(md.probabilities(logits).data, np.full(3, 0.5))

    def test_margin_adjusted_probability(self):
        # logit 0 with margin 1 on a positive label -> sigmoid(-1)
        stats = losses.LabelStats.from_counts([1.0], 1.0)
        adjusted = nm.sub(Tensor([0.0]), Tensor(np.array([1.0]) * stats.margins))
        prob = nm.sigmoid(adjusted).data[0]
        assert prob == pytest.approx(0.2689, abs=1e-4)

    def test_threshold_tie_is_positive(self):
        assert md.predictions(np.array([0.5]))[0] == 1
        assert md.predictions(np.array([0.4999]))[0] == 0


class TestForward:
    def test_shapes(self):
        config, params, ids, mask, _ = tiny_setup(num_labels=4)
        out = md.forward(ids, mask, params, config)
        assert out.logits.shape == (2, 4)
        assert out.attention.shape == (2, 4, 6)
        assert out.doc_reps.shape == (2, 4, 8)

    def test_inference_bitwise_deterministic(self):
        config, params, ids, mask, _ = tiny_setup()
        a = md.forward(ids, mask, params, config)
        b = md.forward(ids, mask, params, config)
        assert np.array_equal(a.logits.data, b.logits.data)
        assert np.array_equal(a.attention.data, b.attention.data)

    def test_encoder_bypass_still_valid(self):
        config, params, ids, mask, _ = tiny_setup(layers=0)
        out = md.forward(ids, mask, params, config)
        assert out.logits.shape == (2, 4)
        np.testing.assert_allclose(out.attention.data.sum(axis=-1), 1.0, atol=1e-9)

    def test_empty_batch_rejected(self):
        config, params, _, _, _ = tiny_setup()
        with pytest.raises(ValueError):
            md.forward(np.zeros((0, 4), dtype=np.intp), np.zeros((0, 4), bool),
                       params, config)

    def test_shared_head_mode(self):
        config = md.EncoderConfig(layers=0, heads=2, d_model=8, max_len=8,
                                  per_label_heads=False)
        rng = np.random.default_rng(9)
        emb = rng.normal(size=(10, 8))
        params = md.init_params(config, 4, emb, rng)
        assert params.heads_z.shape == (1, 8)
        assert params.heads_b.shape == (1,)
        ids = rng.integers(2, 10, size=(2, 5))
        out = md.forward(ids, np.ones((2, 5), bool), params, config)
        assert out.logits.shape == (2, 4)

    def test_mask_disabled_ablation_mode(self):
        config = md.EncoderConfig(layers=1, heads=2, d_model=8, max_len=8,
                                  mask_pad=False)
        rng = np.random.default_rng(10)
        emb = rng.normal(size=(10, 8))
        params = md.init_params(config, 3, emb, rng)
        ids = rng.integers(2, 10, size=(1, 5))
        ids[0, 3:] = 0
        mask = np.array([[True, True, True, False, False]])
        out = md.forward(ids, mask, params, config)
        # without masking, PAD positions legitimately receive attention
        assert out.attention.shape == (1, 3, 5)
        np.testing.assert_allclose(out.attention.data.sum(axis=-1), 1.0, atol=1e-9)

    def test_batch_padding_equivalent_to_global_padding(self):
        """Masked forward over batch-max padding equals per-doc forward."""
        config, params, ids, mask, _ = tiny_setup(n=6, batch=1)
        short = ids[:, :4]
        padded = np.zeros((1, 6), dtype=np.intp)
        padded[:, :4] = short
        m_short = np.ones((1, 4), dtype=bool)
        m_padded = np.zeros((1, 6), dtype=bool)
        m_padded[:, :4] = True
        a = md.forward(short, m_short, params, config)
        b = md.forward(padded, m_padded, params, config)
        np.testing.assert_allclose(a.logits.data, b.logits.data, atol=1e-12)


class TestEndToEndGradients:
    @pytest.mark.parametrize("loss_name", ["bce", "ldam"])
    def test_full_loss_grads_match_fd(self, loss_name):
        """Gradient of the complete forward + loss wrt every parameter."""
        config, params, ids, mask, rng = tiny_setup(
            seed=11, n=12, d=8, layers=1, heads=2, num_labels=4, batch=2,
        )
        mask = mask.copy()
        mask[1, 9:] = False  # exercise PAD masking in the gradient path
        ids = ids.copy()
        ids[1, 9:] = 0
        y = (rng.random((2, 4)) < 0.5).astype(float)
        stats = losses.LabelStats.from_counts([81.0, 16.0, 1.0, 5.0], 3.0)

        def compute_loss():
            out = md.forward(ids, mask, params, config)
            if loss_name == "bce":
                return losses.bce_from_logits(y, out.logits)
            return losses.ldam_loss(y, out.logits, stats)

        with nm.Tape() as tape:
            loss = compute_loss()
        grads = tape.backward(loss)

        for name, tensor in params.named_parameters():
            num = finite_difference(lambda: compute_loss().item(), [tensor.data])[0]
            err = max_rel_err(grads[tensor], num)
            assert err < 1e-4, f"{loss_name}: parameter {name} rel err {err}"
