import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malens.errors import DimMismatch, ZeroQuery
from malens.interchange import EmbeddingMatrix, RepresentationSequence, Stage
from malens.neighbor import (
    assign_neighbors,
    embedding_mean,
    load_assignments,
    nearest_token,
    save_assignments,
)

from conftest import random_matrix
from oracles import brute_nearest, naive_mean


def matrix_of(rows, tokens=None):
    rows = np.asarray(rows, dtype=np.float32)
    tokens = tokens or tuple(f"t{i}" for i in range(rows.shape[0]))
    return EmbeddingMatrix(rows=rows, tokens=tuple(tokens))


class TestEmbeddingMean:
    def test_symmetric_pair(self):
        m = embedding_mean(matrix_of([[1, 0], [0, 1]]))
        np.testing.assert_array_equal(m, [0.5, 0.5])

    def test_identical_rows(self):
        v = [3.0, -1.5, 2.25]
        m = embedding_mean(matrix_of([v, v, v]))
        np.testing.assert_array_equal(m, v)

    def test_matches_naive_summation(self):
        rng = np.random.default_rng(11)
        matrix = random_matrix(rng, 50, 8)
        expected = naive_mean(matrix.rows.tolist())
        np.testing.assert_allclose(embedding_mean(matrix), expected, atol=1e-12)


class TestNearestToken:
    def test_collinear_centred_row(self):
        # centred q = (0.4, -0.4) is collinear with centred row 0 = (0.5, -0.5)
        matrix = matrix_of([[1, 0], [0, 1]])
        m = np.array([0.5, 0.5])
        result = nearest_token(np.array([0.9, 0.1]), matrix, m)
        assert result.token_index == 0
        assert result.similarity == pytest.approx(1.0, abs=1e-12)

    def test_exact_row_query(self):
        rng = np.random.default_rng(5)
        matrix = random_matrix(rng, 40, 6)
        for k in (0, 17, 39):
            result = nearest_token(matrix.rows[k], matrix)
            assert result.token_index == k
            assert result.token == matrix.tokens[k]

    def test_query_equal_to_mean(self):
        matrix = matrix_of([[1, 0], [0, 1]])
        with pytest.raises(ZeroQuery):
            nearest_token(np.array([0.5, 0.5]), matrix)

    def test_dim_mismatch(self):
        matrix = matrix_of([[1, 0], [0, 1]])
        with pytest.raises(DimMismatch):
            nearest_token(np.array([1.0, 0.0, 0.0]), matrix)

    def test_oracle_equivalence_random_instances(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            vocab = int(rng.integers(2, 60))
            dim = int(rng.integers(1, 16))
            matrix = random_matrix(rng, vocab, dim)
            q = rng.standard_normal(dim).astype(np.float32)
            mean = embedding_mean(matrix)
            expected_idx, expected_sim = brute_nearest(
                matrix.rows.tolist(), q.tolist(), mean.tolist())
            result = nearest_token(q, matrix, mean)
            assert result.token_index == expected_idx
            assert result.similarity == pytest.approx(expected_sim, abs=1e-5)

    @settings(max_examples=40, deadline=None)
    @given(scale=st.floats(1e-3, 1e3), seed=st.integers(0, 1000))
    def test_scale_invariance(self, scale, seed):
        rng = np.random.default_rng(seed)
        matrix = random_matrix(rng, 20, 5)
        mean = embedding_mean(matrix)
        q = rng.standard_normal(5)
        if np.linalg.norm(q - mean) == 0:
            return
        base = nearest_token(q, matrix, mean)
        scaled = nearest_token(scale * (q - mean) + mean, matrix, mean)
        assert scaled.token_index == base.token_index

    def test_tie_breaks_to_lowest_index(self):
        rng = np.random.default_rng(9)
        matrix = random_matrix(rng, 10, 4)
        q = rng.standard_normal(4)
        base = nearest_token(q, matrix)
        # duplicate the winning row at a higher index; answer must not move
        rows = np.vstack([matrix.rows, matrix.rows[base.token_index]])
        dup = EmbeddingMatrix(rows=rows, tokens=matrix.tokens + ("dup",))
        assert nearest_token(q, dup, embedding_mean(matrix)).token_index == base.token_index

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(31)
        matrix = random_matrix(rng, 15, 6)
        mean = embedding_mean(matrix)
        q = rng.standard_normal(6)
        base = nearest_token(q, matrix, mean)
        perm = rng.permutation(15)
        permuted = EmbeddingMatrix(
            rows=matrix.rows[perm], tokens=tuple(matrix.tokens[i] for i in perm))
        result = nearest_token(q, permuted, mean)
        assert perm[result.token_index] == base.token_index

    def test_zero_centred_rows_skipped(self):
        # row 2 equals the mean of the matrix and must never win
        rows = np.array([[2, 0], [0, 2], [1, 1]], dtype=np.float32)
        mean = np.array([1.0, 1.0])
        result = nearest_token(np.array([1.9, 0.1]), matrix_of(rows), mean)
        assert result.token_index == 0


class TestAssignNeighbors:
    def make_seq(self, frames, frame_ms=340):
        return RepresentationSequence("u", Stage.ADAPTER_OUTPUT, frame_ms,
                                      np.asarray(frames, dtype=np.float32))

    def test_exact_rows_in_order(self):
        rng = np.random.default_rng(2)
        matrix = random_matrix(rng, 10, 4)
        seq = self.make_seq(matrix.rows[[3, 1, 7]])
        result = assign_neighbors(seq, matrix)
        assert [a.token_index for a in result] == [3, 1, 7]
        assert [a.frame_index for a in result] == [0, 1, 2]

    def test_matches_bruteforce_on_every_frame(self):
        rng = np.random.default_rng(77)
        matrix = random_matrix(rng, 120, 8)
        seq = self.make_seq(rng.standard_normal((50, 8)))
        mean = embedding_mean(matrix)
        result = assign_neighbors(seq, matrix)
        for i, a in enumerate(result):
            idx, sim = brute_nearest(matrix.rows.tolist(),
                                     seq.frames[i].tolist(), mean.tolist())
            assert a.token_index == idx
            assert a.similarity == pytest.approx(sim, abs=1e-5)

    def test_mean_frame_yields_sentinel(self):
        matrix = matrix_of([[1, 0], [0, 1]])
        mean = np.array([0.5, 0.5], dtype=np.float32)
        seq = self.make_seq([[1, 0], mean, [0, 1]])
        result = assign_neighbors(seq, matrix)
        assert not result[0].is_no_neighbor
        assert result[1].is_no_neighbor
        assert not result[2].is_no_neighbor
        assert result[0].token_index == 0 and result[2].token_index == 1

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        matrix = random_matrix(rng, 30, 5)
        seq = self.make_seq(rng.standard_normal((20, 5)))
        assert assign_neighbors(seq, matrix) == assign_neighbors(seq, matrix)

    def test_serialization_round_trip(self, tmp_path):
        rng = np.random.default_rng(8)
        matrix = random_matrix(rng, 12, 3)
        seq = self.make_seq(rng.standard_normal((5, 3)))
        assignments = [a.with_language("en") for a in assign_neighbors(seq, matrix)]
        path = tmp_path / "a.jsonl"
        save_assignments(path, "u", assignments)
        utterance_id, loaded = load_assignments(path)
        assert utterance_id == "u"
        assert loaded == assignments
