import math
from collections import Counter

import numpy as np
import pytest

from phrasecomp.extraction import PairOccurrence
from phrasecomp.ranking import (
    RankedPairList,
    aggregate,
    build_training_list,
    drop_top_percent,
    normalize,
)


def occ(h, H):
    return PairOccurrence(h, H, 1)


class TestAggregate:
    def test_counts_multiplicity(self):
        got = aggregate([occ("a", "b"), occ("a", "b"), occ("c", "b")])
        assert got == {("a", "b"): 2, ("c", "b"): 1}

    def test_empty(self):
        assert aggregate([]) == {}

    def test_shards_sum(self):
        shard1 = [occ("a", "b")] * 3 + [occ("c", "d")]
        shard2 = [occ("a", "b")] * 2 + [occ("e", "d")]
        merged = Counter(aggregate(shard1)) + Counter(aggregate(shard2))
        assert dict(merged) == aggregate(shard1 + shard2)


class TestNormalize:
    def test_log_weighting(self):
        # single hypernym with global count 1000, pair count 100
        counts = {("x", "h"): 100, ("y", "h"): 900}
        ranked = normalize(counts)
        by_pair = {(wp.hyponym, wp.hypernym): wp for wp in ranked.pairs}
        assert by_pair[("x", "h")].weight == pytest.approx(14.47648, abs=1e-5)
        assert by_pair[("x", "h")].weight == 100 / math.log(1000)

    def test_denominator_floored_at_one(self):
        # hypernym seen twice: ln(2) < 1, so the weight is the raw count
        ranked = normalize({("a", "b"): 2})
        assert ranked.pairs[0].weight == 2.0
        ranked = normalize({("a", "b"): 1})
        assert ranked.pairs[0].weight == 1.0

    def test_equal_weights_break_lexicographically(self):
        counts = {("b", "x"): 2, ("a", "x"): 2, ("a", "w"): 2}
        ranked = normalize(counts)
        keys = [(wp.hyponym, wp.hypernym) for wp in ranked.pairs]
        assert keys == sorted(keys, key=lambda t: t)  # all weights equal here
        assert keys[0] == ("a", "w")

    def test_sorted_descending(self):
        rng = np.random.default_rng(0)
        counts = {
            (f"h{i}", f"H{rng.integers(0, 5)}"): int(rng.integers(1, 50))
            for i in range(60)
        }
        ranked = normalize(counts)
        weights = [wp.weight for wp in ranked.pairs]
        assert all(a >= b for a, b in zip(weights, weights[1:]))

    def test_scale_monotone_per_hypernym(self):
        counts = {("a", "h"): 10, ("b", "h"): 20, ("c", "h"): 30}
        ranked = normalize(counts)
        by_pair = {wp.hyponym: wp.weight for wp in ranked.pairs}
        assert by_pair["a"] < by_pair["b"] < by_pair["c"]

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            normalize({("a", "b"): 0})


def make_ranked(n):
    # n pairs with strictly decreasing weights
    counts = {(f"hypo{i:03d}", "hub"): n - i for i in range(n)}
    return normalize(counts)


class TestDropTopPercent:
    def test_one_percent_of_200(self):
        ranked = make_ranked(200)
        out = drop_top_percent(ranked, 1)
        assert len(out) == 198
        assert out.pairs[0] == ranked.pairs[2]

    def test_zero_is_identity(self):
        ranked = make_ranked(10)
        assert drop_top_percent(ranked, 0).pairs == ranked.pairs

    def test_hundred_empties(self):
        assert len(drop_top_percent(make_ranked(10), 100)) == 0

    def test_length_formula(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(1, 300))
            p = float(rng.integers(0, 101))
            out = drop_top_percent(make_ranked(n), p)
            assert len(out) == n - math.floor(p * n / 100.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            drop_top_percent(make_ranked(5), -1)
        with pytest.raises(ValueError):
            drop_top_percent(make_ranked(5), 101)


class TestTopHypernyms:
    def test_absent_surface(self):
        assert make_ranked(5).top_hypernyms("nope", 3) == []

    def test_truncation_at_availability(self):
        counts = {("w", "h1"): 5, ("w", "h2"): 3}
        ranked = normalize(counts)
        assert ranked.top_hypernyms("w", 5) == ["h1", "h2"]

    def test_weight_order(self):
        counts = {("w", "h1"): 1, ("w", "h2"): 8, ("w", "h3"): 3}
        ranked = normalize(counts)
        assert ranked.top_hypernyms("w", 2) == ["h2", "h3"]

    def test_top_hyponyms(self):
        counts = {("a", "H"): 9, ("b", "H"): 4, ("c", "H"): 6}
        ranked = normalize(counts)
        assert ranked.top_hyponyms("H", 2) == ["a", "c"]

    def test_k_validated(self):
        with pytest.raises(ValueError):
            make_ranked(3).top_hypernyms("x", 0)


class TestBuildTrainingList:
    def test_m_zero_only_target_pairs(self):
        counts = {("dog", "animal"): 9, ("cat", "animal"): 8, ("car", "object"): 7}
        ranked = normalize(counts)
        pairs, report = build_training_list(ranked, ["dog"], k=5, m=0)
        assert pairs == [("dog", "animal")]
        assert report.n_frequent_pairs == 0

    def test_no_targets_top_percent_only(self):
        ranked = make_ranked(200)
        pairs, _ = build_training_list(ranked, [], k=5, m=10)
        assert len(pairs) == 20
        assert pairs == [(wp.hyponym, wp.hypernym) for wp in ranked.pairs[:20]]

    def test_k_truncates_at_availability(self):
        counts = {("w", "h1"): 5, ("w", "h2"): 4, ("w", "h3"): 3}
        ranked = normalize(counts)
        pairs, _ = build_training_list(ranked, ["w"], k=5, m=0)
        assert len(pairs) == 3

    def test_both_directions_collected(self):
        counts = {("w", "up"): 5, ("down", "w"): 4}
        ranked = normalize(counts)
        pairs, _ = build_training_list(ranked, ["w"], k=2, m=0)
        assert ("w", "up") in pairs and ("down", "w") in pairs

    def test_target_pairs_come_first_deduplicated(self):
        counts = {("dog", "animal"): 100, ("cat", "animal"): 1}
        ranked = normalize(counts)
        pairs, _ = build_training_list(ranked, ["cat"], k=1, m=100)
        assert pairs == [("cat", "animal"), ("dog", "animal")]

    def test_uncovered_target_reported(self):
        pairs, report = build_training_list(make_ranked(5), ["ghost"], k=1, m=0)
        assert pairs == []
        assert report.uncovered_targets == ["ghost"]

    def test_output_subset_of_input(self):
        rng = np.random.default_rng(2)
        counts = {
            (f"a{rng.integers(0, 30)}", f"b{rng.integers(0, 10)}"): int(rng.integers(1, 9))
            for _ in range(80)
        }
        ranked = normalize(counts)
        all_keys = {(wp.hyponym, wp.hypernym) for wp in ranked.pairs}
        targets = [f"a{i}" for i in range(10)]
        pairs, _ = build_training_list(ranked, targets, k=3, m=25)
        assert set(pairs) <= all_keys
        assert len(set(pairs)) == len(pairs)

    def test_phrase_target_matches_underscore_spelling(self):
        counts = {("climate change", "issue"): 4}
        ranked = normalize(counts)
        pairs, _ = build_training_list(ranked, ["climate_change"], k=1, m=0)
        assert pairs == [("climate change", "issue")]

    def test_param_validation(self):
        ranked = make_ranked(4)
        with pytest.raises(ValueError):
            build_training_list(ranked, [], k=0, m=0)
        with pytest.raises(ValueError):
            build_training_list(ranked, [], k=1, m=101)


class TestSerialization:
    def test_round_trip_byte_identical(self, tmp_path):
        ranked = normalize({("a a", "b"): 3, ("c", "b"): 5, ("d", "e"): 1})
        p1 = tmp_path / "r1.tsv"
        p2 = tmp_path / "r2.tsv"
        ranked.save(str(p1))
        RankedPairList.load(str(p1)).save(str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_unsorted_file_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a\tb\t1\t1.0\nc\td\t5\t5.0\n")
        with pytest.raises(ValueError, match="not sorted"):
            RankedPairList.load(str(path))

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("a\tb\t5\t5.0\na\tc\t2\n")
        with pytest.raises(ValueError, match="bad.tsv:2"):
            RankedPairList.load(str(path))

    def test_duplicate_pair_rejected(self, tmp_path):
        path = tmp_path / "dup.tsv"
        path.write_text("a\tb\t5\t5.0\na\tb\t5\t5.0\n")
        with pytest.raises(ValueError, match="duplicate"):
            RankedPairList.load(str(path))
