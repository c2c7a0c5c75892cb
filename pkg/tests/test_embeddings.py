"""CBOW trainer and embedding-file tests."""

import numpy as np
import pytest

from labelwise import embeddings as emb
from labelwise.errors import ArtifactError, InsufficientVocabularyError
from labelwise.preprocess import PAD_ID

from oracles import finite_difference, max_rel_err

SMALL = emb.CbowConfig(d_e=8, window=2, negatives=2, epochs=2)


def toy_streams(rng, vocab_size=10, n_docs=5, doc_len=30):
    return [list(rng.integers(2, vocab_size, size=doc_len)) for _ in range(n_docs)]


class TestTrainCbow:
    def test_output_shape(self):
        rng = np.random.default_rng(0)
        m = emb.train_cbow(toy_streams(rng), 10, SMALL, seed=1)
        assert m.shape == (10, 8)
        assert np.isfinite(m).all()

    def test_pad_row_stays_zero(self):
        rng = np.random.default_rng(0)
        m = emb.train_cbow(toy_streams(rng), 10, SMALL, seed=1)
        np.testing.assert_array_equal(m[PAD_ID], np.zeros(8))

    def test_same_seed_bitwise_identical(self):
        rng = np.random.default_rng(0)
        streams = toy_streams(rng)
        a = emb.train_cbow(streams, 10, SMALL, seed=7)
        b = emb.train_cbow(streams, 10, SMALL, seed=7)
        assert np.array_equal(a, b)

    def test_insufficient_vocabulary(self):
        with pytest.raises(InsufficientVocabularyError):
            emb.train_cbow([[2, 3]], 4, emb.CbowConfig(negatives=5), seed=0)

    def test_empty_corpus(self):
        with pytest.raises(ArtifactError):
            emb.train_cbow([], 10, SMALL, seed=0)

    def test_cooccurring_tokens_end_up_closer(self):
        """Tokens that always share a window beat tokens from disjoint contexts.

        A and B always co-occur against filler pool 1; C only ever appears
        with the disjoint filler pool 2.
        """
        config = emb.CbowConfig(d_e=16, window=2, negatives=3, epochs=25)
        a_tok, b_tok, c_tok = 2, 3, 4
        pool_ab = list(range(5, 12))
        pool_c = list(range(12, 19))
        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(1000 + seed)
            streams = []
            for _ in range(30):
                doc = []
                for _ in range(10):
                    doc.extend([a_tok, b_tok, rng.choice(pool_ab)])
                streams.append(doc)
                doc2 = []
                for _ in range(10):
                    doc2.extend([c_tok, rng.choice(pool_c), rng.choice(pool_c)])
                streams.append(doc2)
            m = emb.train_cbow(streams, 19, config, seed=seed)

            def cos(u, v):
                return np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))

            if cos(m[a_tok], m[b_tok]) > cos(m[a_tok], m[c_tok]):
                wins += 1
        assert wins >= 19, f"co-occurrence ranking held in only {wins}/20 seeds"


class TestPairGradients:
    def test_matches_finite_differences_on_toy_vocab(self):
        rng = np.random.default_rng(3)
        for label in (1.0, 0.0):
            h = rng.normal(size=5)
            v = rng.normal(size=5)
            _, g_h, g_v = emb.cbow_pair_loss_and_grads(h, v, label)
            num = finite_difference(
                lambda: emb.cbow_pair_loss_and_grads(h, v, label)[0], [h, v]
            )
            assert max_rel_err(g_h, num[0]) < 1e-4
            assert max_rel_err(g_v, num[1]) < 1e-4


class TestLookup:
    def test_pad_is_zero_row(self):
        m = np.arange(12.0).reshape(4, 3)
        m[PAD_ID] = 0.0
        out = emb.lookup([0], m)
        np.testing.assert_array_equal(out.data, [[0.0, 0.0, 0.0]])

    def test_repeated_ids_give_identical_rows(self):
        m = np.arange(12.0).reshape(4, 3)
        out = emb.lookup([2, 2], m).data
        np.testing.assert_array_equal(out[0], out[1])

    def test_unk_row(self):
        m = np.arange(12.0).reshape(4, 3)
        np.testing.assert_array_equal(emb.lookup([1], m).data[0], m[1])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            emb.lookup([4], np.zeros((4, 3)))


class TestEmbeddingFile:
    def test_roundtrip_bitwise(self, tmp_path):
        rng = np.random.default_rng(5)
        m = rng.normal(size=(6, 4))
        path = tmp_path / "emb.txt"
        emb.save_embeddings(path, m, "abc123")
        loaded, checksum = emb.load_embeddings(path)
        assert checksum == "abc123"
        assert np.array_equal(loaded, m)

    def test_header_enforced(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("nope\n")
        with pytest.raises(ArtifactError):
            emb.load_embeddings(path)
