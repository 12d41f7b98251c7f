import gzip
import math

import numpy as np
import pytest

from phrasecomp.dense import DenseEmbedding, UncoveredError, cosine, load_dense, score_d


def write_vectors(path, rows, dim=None):
    dim = dim if dim is not None else len(rows[0][1])
    lines = [f"{len(rows)} {dim}"]
    for word, vec in rows:
        lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
    path.write_text("\n".join(lines) + "\n")


class TestLoader:
    def test_two_word_file(self, tmp_path):
        path = tmp_path / "v.txt"
        write_vectors(path, [("dog", [1.0, 0.0, 0.0]), ("cat", [0.0, 1.0, 0.0])])
        emb, report = load_dense(str(path))
        assert len(emb) == 2
        assert emb.dim == 3
        assert report.rows_kept == 2
        assert np.array_equal(emb.vector("dog"), [1.0, 0.0, 0.0])

    def test_dim_mismatch_row_skipped_and_tallied(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 3\ndog 1.0 0.0 0.0\ncat 1.0 0.0\n")
        emb, report = load_dense(str(path))
        assert len(emb) == 1
        assert report.dim_mismatch == 1

    def test_duplicate_and_zero_norm_skipped(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("3 2\ndog 1.0 0.0\ndog 0.5 0.5\nzero 0.0 0.0\n")
        emb, report = load_dense(str(path))
        assert len(emb) == 1
        assert report.duplicates == 1
        assert report.zero_norm == 1

    def test_empty_file_fatal(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("0 3\n")
        with pytest.raises(ValueError):
            load_dense(str(path))

    def test_bad_header_fatal(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("3\n")
        with pytest.raises(ValueError, match=":1"):
            load_dense(str(path))

    def test_gzip_variant(self, tmp_path):
        path = tmp_path / "v.txt.gz"
        with gzip.open(path, "wt", encoding="utf-8") as fh:
            fh.write("1 2\ndog 1.0 2.0\n")
        emb, _ = load_dense(str(path))
        assert np.array_equal(emb.vector("dog"), [1.0, 2.0])

    def test_unparseable_row_tallied(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("2 2\ndog 1.0 x\ncat 1.0 2.0\n")
        emb, report = load_dense(str(path))
        assert report.unparseable == 1
        assert len(emb) == 1


class TestCosine:
    def test_self_similarity(self):
        v = np.array([3.0, 4.0, 5.0])
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_forty_five_degrees(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.70711, abs=1e-5)
        assert got == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_zero_norm_rejected(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(3), np.array([1.0, 0.0, 0.0]))

    def test_bounded(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            a, b = rng.normal(size=(2, 8))
            assert -1.0 <= cosine(a, b) <= 1.0


def make_embedding(entries):
    vocab = {w: i for i, (w, _) in enumerate(entries)}
    return DenseEmbedding(vocab, np.array([v for _, v in entries], dtype=float))


class TestScoreD:
    def test_exact_composition_scores_one(self):
        v1 = np.array([1.0, 0.0, 0.0])
        v2 = np.array([0.0, 1.0, 0.0])
        emb = make_embedding([("red", v1), ("apple", v2), ("red_apple", v1 + v2)])
        assert score_d("red apple", "red", "apple", emb) == pytest.approx(1.0, abs=1e-12)

    def test_known_value(self):
        emb = make_embedding(
            [("w1", [1.0, 0.0]), ("w2", [0.0, 1.0]), ("w1_w2", [1.0, 0.0])]
        )
        got = score_d("w1 w2", "w1", "w2", emb)
        assert got == pytest.approx(0.70711, abs=1e-5)

    def test_orthogonal_phrase_scores_zero(self):
        emb = make_embedding(
            [("a", [1.0, 0.0, 0.0]), ("b", [0.0, 1.0, 0.0]), ("a_b", [0.0, 0.0, 1.0])]
        )
        assert score_d("a b", "a", "b", emb) == 0.0

    def test_invariant_under_constituent_rescaling(self):
        rng = np.random.default_rng(1)
        v1, v2, vp = rng.normal(size=(3, 6))
        base = score_d("x y", "x", "y", make_embedding([("x", v1), ("y", v2), ("x_y", vp)]))
        scaled = score_d(
            "x y", "x", "y", make_embedding([("x", 7.0 * v1), ("y", v2), ("x_y", 0.3 * vp)])
        )
        assert scaled == pytest.approx(base, abs=1e-12)

    def test_symmetric_in_constituents(self):
        rng = np.random.default_rng(2)
        v1, v2, vp = rng.normal(size=(3, 6))
        emb = make_embedding([("x", v1), ("y", v2), ("x_y", vp)])
        assert score_d("x y", "x", "y", emb) == score_d("x y", "y", "x", emb)

    def test_uncovered_raises_with_surface(self):
        emb = make_embedding([("x_y", [1.0, 1.0]), ("x", [1.0, 0.0])])
        with pytest.raises(UncoveredError) as err:
            score_d("x y", "x", "y", emb)
        assert err.value.surface == "y"

    def test_uncovered_phrase_reported_first(self):
        emb = make_embedding([("x", [1.0, 0.0]), ("y", [0.0, 1.0])])
        with pytest.raises(UncoveredError) as err:
            score_d("x y", "x", "y", emb)
        assert err.value.surface == "x y"

    def test_phrase_lookup_prefers_underscore_form(self):
        emb = make_embedding(
            [("x", [1.0, 0.0]), ("y", [0.0, 1.0]), ("x_y", [1.0, 1.0])]
        )
        assert score_d("x y", "x", "y", emb) == pytest.approx(1.0, abs=1e-12)
