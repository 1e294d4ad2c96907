import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slangchoice.errors import DataError
from slangchoice.evaluation import (
    RankResult,
    auc,
    location_test,
    partition_few_zero,
    prediction_report,
    prior_correlation,
    rank_candidates,
    roc_curve,
    semantic_distance_report,
    synonymy_bin,
    synonymy_degree,
    trapezoid_area,
)
from slangchoice.priors import PriorVector
from slangchoice.lexicon import DataSplit, SenseDefinition

from conftest import make_lexicon, make_store


class TestRankCandidates:
    VOCAB = ["aa", "bb", "cc"]

    def test_argmax_is_rank_one(self):
        r = rank_candidates(np.array([0.1, 0.7, 0.2]), "bb", self.VOCAB)
        assert r.rank == 1
        assert r.topk[0][0] == "bb"

    def test_uniform_ties_follow_vocabulary_order(self):
        post = np.full(3, 1 / 3)
        for i, w in enumerate(self.VOCAB):
            assert rank_candidates(post, w, self.VOCAB).rank == i + 1

    def test_hand_sorted(self):
        r = rank_candidates(np.array([0.2, 0.5, 0.3]), "aa", self.VOCAB)
        assert r.rank == 3

    def test_unknown_word_rejected(self):
        with pytest.raises(DataError):
            rank_candidates(np.array([0.5, 0.5, 0.0]), "zz", self.VOCAB)

    def test_topk_probabilities(self):
        r = rank_candidates(np.array([0.2, 0.5, 0.3]), "aa", self.VOCAB, k=2)
        assert r.topk == [("bb", 0.5), ("cc", pytest.approx(0.3))]


class TestAuc:
    def test_perfect(self):
        assert auc([1, 1, 1], 50) == pytest.approx(100.0)

    def test_single_query_closed_form(self):
        assert auc([3], 5) == pytest.approx(50.0)

    def test_worst(self):
        assert auc([10, 10], 10) == pytest.approx(0.0)

    def test_accepts_rank_results(self):
        rs = [RankResult("s", "w", 1), RankResult("s2", "w2", 5)]
        assert auc(rs, 5) == pytest.approx(100 * (1.0 + 0.0) / 2)

    def test_equals_trapezoid_of_roc(self, rng):
        for _ in range(50):
            v = int(rng.integers(2, 40))
            n = int(rng.integers(1, 12))
            ranks = rng.integers(1, v + 1, size=n).tolist()
            closed = auc(ranks, v)
            area = 100 * trapezoid_area(roc_curve(ranks, v))
            assert closed == pytest.approx(area, abs=1e-9)

    @given(st.integers(3, 50), st.integers(1, 49), st.integers(1, 49))
    def test_antitone_in_each_rank(self, v, r1, r2):
        r1, r2 = min(r1, v), min(r2, v)
        better, worse = min(r1, r2), max(r1, r2)
        base = [max(1, v // 2)] * 3
        assert auc(base + [better], v) >= auc(base + [worse], v)

    def test_uniform_random_ranker_near_fifty(self):
        rng = np.random.default_rng(99)
        ranks = rng.integers(1, 101, size=1000).tolist()
        assert auc(ranks, 100) == pytest.approx(50.0, abs=2.0)


class TestRocCurve:
    def test_endpoints_and_monotone(self, rng):
        ranks = rng.integers(1, 21, size=7).tolist()
        pts = roc_curve(ranks, 20)
        assert pts[0] == (0.0, 0.0)
        assert pts[-1] == (pytest.approx(1.0), pytest.approx(1.0))
        xs, ys = zip(*pts)
        assert all(b >= a - 1e-12 for a, b in zip(xs, xs[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(ys, ys[1:]))


def partition_lexicon():
    spec = [
        ("aa", "aasa aasb", "noun", "slang", {"id": "aa.s0"}),
        ("aa", "aasc aasd", "noun", "slang", {"id": "aa.s1"}),
        ("aa", "aase aasf", "noun", "slang", {"id": "aa.s2"}),
        ("aa", "aaca aacb", "noun", "conventional", {"id": "aa.c"}),
        ("bb", "bbsa bbsb", "noun", "slang", {"id": "bb.s0"}),
        ("bb", "bbca bbcb", "noun", "conventional", {"id": "bb.c"}),
    ]
    return make_lexicon(spec)


class TestPartitionFewZero:
    def test_partition(self):
        lex = partition_lexicon()
        split = DataSplit(train=["aa.s0", "aa.s1"], validation=[],
                          test=["aa.s2", "bb.s0"], seed=0)
        few, zero = partition_few_zero(split, lex)
        assert few == ["aa.s2"]
        assert zero == ["bb.s0"]

    def test_exhaustive_and_disjoint(self):
        lex = partition_lexicon()
        split = DataSplit(train=["bb.s0"], validation=[],
                          test=["aa.s0", "aa.s1", "aa.s2"], seed=0)
        few, zero = partition_few_zero(split, lex)
        assert set(few) | set(zero) == set(split.test)
        assert set(few).isdisjoint(zero)


def sense(defn, word="w", sid="s"):
    return SenseDefinition(id=sid, word=word, definition=defn, pos="noun", kind="slang")


class TestSynonymyDegree:
    def test_exact_match_zero(self):
        t = sense("to kill murder")
        assert synonymy_degree(t, [sense("murder to kill")]) == 0

    def test_hand_computed(self):
        t = sense("kill murder")
        assert synonymy_degree(t, [sense("kill slay"), sense("water earth")]) == 2

    def test_empty_training_infinite(self):
        assert synonymy_degree(sense("kill murder"), []) == math.inf

    def test_binning(self):
        assert synonymy_bin(0) == "0"
        assert synonymy_bin(3) == "3"
        assert synonymy_bin(9) == "4+"
        assert synonymy_bin(math.inf) == "4+"


class TestSemanticDistanceReport:
    def build(self, slang_vec):
        lex = make_lexicon([
            ("aa", "aasa aasb", "noun", "slang", {"id": "aa.s"}),
            ("aa", "aaca aacb", "noun", "conventional", {"id": "aa.c"}),
            ("bb", "bbsa bbsb", "noun", "slang", {"id": "bb.s"}),
            ("bb", "bbca bbcb", "noun", "conventional", {"id": "bb.c"}),
            ("cc", "ccsa ccsb", "noun", "slang", {"id": "cc.s"}),
            ("cc", "ccca cccb", "noun", "conventional", {"id": "cc.c"}),
        ])
        store = make_store(2, {"aa": [1, 0], "bb": [0, 1], "cc": [1, 1]},
                           {"aa.s": slang_vec, "aa.c": [0.0, 0.0],
                            "bb.s": [9, 9], "bb.c": [1.0, 0.0],
                            "cc.s": [9, 9], "cc.c": [2.0, 0.0]})
        return lex, store

    def test_nearest_prototype_zero(self):
        lex, store = self.build([0.1, 0.0])
        report = semantic_distance_report(["aa.s"], lex, store)
        assert report.values[0] == 0.0

    def test_farthest_prototype_one(self):
        lex, store = self.build([3.0, 0.0])
        report = semantic_distance_report(["aa.s"], lex, store)
        assert report.values[0] == 1.0

    def test_middle_is_half(self):
        lex, store = self.build([0.9, 0.0])  # distances: aa 0.9, bb ~0.1, cc 1.1
        report = semantic_distance_report(["aa.s"], lex, store)
        assert report.values[0] == 0.5

    def test_mean_in_unit_interval(self, rng):
        lex, store = self.build(rng.standard_normal(2))
        report = semantic_distance_report(["aa.s", "bb.s", "cc.s"], lex, store)
        assert 0.0 <= report.mean <= 1.0
        assert report.stderr >= 0.0


class TestStatisticalHelpers:
    def test_location_test_detects_shift(self, rng):
        small = rng.normal(0.0, 1.0, 40)
        large = rng.normal(3.0, 1.0, 40)
        assert location_test(small, large) < 1e-6
        assert location_test(large, small) > 0.5

    def test_prior_correlation_bounds_and_agreement(self, rng):
        senses = [sense(f"def {i}", sid=f"s{i}") for i in range(5)]
        probs = [rng.dirichlet(np.ones(6)) for _ in range(5)]

        def fn_a(s):
            return PriorVector(probs[int(s.id[1:])])

        values, mean, stderr = prior_correlation(senses, fn_a, fn_a)
        assert np.allclose(values, 1.0)
        assert mean == pytest.approx(1.0)
        assert stderr == pytest.approx(0.0)

        def fn_b(s):
            return PriorVector(probs[int(s.id[1:])][::-1].copy())

        values, mean, _ = prior_correlation(senses, fn_a, fn_b)
        assert all(-1.0 <= v <= 1.0 for v in values)


class TestPredictionReport:
    def test_shape_and_duplicated_models(self):
        lex = partition_lexicon()
        vocab = lex.vocabulary

        def fake_rank(sense, k):
            probs = np.array([0.7, 0.3])
            return rank_candidates(probs, sense.word, vocab, sense_id=sense.id, k=k)

        rows = prediction_report(["aa.s0", "bb.s0"], lex,
                                 [("m1", fake_rank), ("m2", fake_rank)], k=2)
        assert len(rows) == 2
        assert rows[0]["m1_top2"] == rows[0]["m2_top2"]
        assert rows[0]["m1_rank"] == rows[0]["m2_rank"] == 1
        assert rows[1]["m1_rank"] == 2  # bb ranked second under fixed probs
        assert rows[0]["definition"] == lex.sense("aa.s0").definition
