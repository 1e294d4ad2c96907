import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slangchoice.errors import DataError
from slangchoice.lexicon import (
    DEFAULT_TAG_SET,
    GDOS_TAG_SET,
    FilterConfig,
    content_words,
    conventional_tag_counts,
    historical_splits,
    ingest,
    load_lexicon,
    overlap_fraction,
    pos_distribution,
    save_lexicon,
    split,
)

from conftest import make_lexicon, make_records


class TestContentWords:
    def test_stopwords_and_punctuation_removed(self):
        assert content_words("to kill, to murder", {"to"}) == {"kill", "murder"}

    def test_empty_input(self):
        assert content_words("", {"to"}) == set()

    def test_no_stopwords(self):
        assert content_words("Frozen water", set()) == {"frozen", "water"}

    def test_underscore_phrases_split(self):
        assert content_words("on_fleek today", set()) == {"on", "fleek", "today"}


class TestOverlapFraction:
    def test_identity(self):
        assert overlap_fraction({"kill", "murder"}, {"kill", "murder"}) == 1.0

    def test_disjoint(self):
        assert overlap_fraction({"kill"}, {"water"}) == 0.0

    def test_min_denominator(self):
        assert overlap_fraction({"kill", "murder", "slay"}, {"kill", "water"}) == 0.5

    def test_empty_yields_zero(self):
        assert overlap_fraction(set(), {"kill"}) == 0.0

    @given(
        st.sets(st.text(min_size=1, max_size=4), max_size=8),
        st.sets(st.text(min_size=1, max_size=4), max_size=8),
    )
    def test_symmetric_and_bounded(self, a, b):
        f = overlap_fraction(a, b)
        assert f == overlap_fraction(b, a)
        assert 0.0 <= f <= 1.0

    @given(st.sets(st.text(min_size=1, max_size=4), min_size=1, max_size=8))
    def test_self_overlap_is_one(self, a):
        assert overlap_fraction(a, a) == 1.0


BASE_SPEC = [
    ("ice", "frozen dessert on a stick", "noun", "slang"),
    ("ice", "to kill someone quietly", "verb", "slang"),
    ("kick", "a strong thrill", "noun", "slang"),
    ("ice", "frozen water", "noun", "conventional"),
    ("ice", "diamonds worn openly", "noun", "conventional"),
    ("kick", "strike with the foot", "verb", "conventional"),
]


def ingest_spec(spec, cfg=None):
    return ingest(make_records(spec), (), cfg=cfg or FilterConfig())


class TestIngest:
    def test_basic_survivors(self):
        lex = ingest_spec(BASE_SPEC)
        assert lex.vocabulary == ["ice", "kick"]
        assert len(lex.slang) == 3
        assert len(lex.conventional["ice"]) == 2

    def test_acronyms_dropped(self):
        spec = BASE_SPEC + [("LOL", "laughing out loud", "other", "slang"),
                            ("lol", "a chuckle of any kind", "noun", "conventional")]
        lex = ingest_spec(spec)
        assert "lol" not in lex.vocabulary

    def test_acronyms_kept_when_disabled(self):
        spec = BASE_SPEC + [("LOL", "laughing out loud", "other", "slang"),
                            ("lol", "a chuckle of any kind", "noun", "conventional")]
        lex = ingest_spec(spec, FilterConfig(drop_acronyms=False))
        assert "lol" in lex.vocabulary

    def test_overlap_at_threshold_retained(self):
        # "frozen dessert" vs "frozen water": 1/2 overlap is not strictly
        # greater than the 0.5 threshold.
        lex = ingest_spec(BASE_SPEC)
        assert any(s.definition.startswith("frozen dessert") for s in lex.slang)

    def test_overlap_above_threshold_dropped(self):
        spec = BASE_SPEC + [("kick", "strike hard with the foot", "verb", "slang")]
        lex = ingest_spec(spec)
        assert not any("strike hard" in s.definition for s in lex.slang)

    def test_vote_margin(self):
        # Both voted definitions survive every other filter (overlap 0.5
        # with the curated "to kill someone quietly" sense: kept at dedup,
        # enough for the cross-dictionary check); only the margin differs.
        spec = BASE_SPEC + [
            ("ice", "to kill for coin", "verb", "slang",
             {"up": 12, "down": 5}),
            ("ice", "to kill for payment", "verb", "slang",
             {"up": 30, "down": 5}),
        ]
        lex = ingest_spec(spec)
        voted = [s for s in lex.slang if s.votes is not None]
        assert len(voted) == 1
        assert voted[0].votes == (30, 5)

    def test_voted_entry_needs_curated_sibling(self):
        spec = BASE_SPEC + [
            ("kick", "a fresh pair of sneakers", "noun", "slang",
             {"up": 50, "down": 0}),
        ]
        lex = ingest_spec(spec)
        # No unvoted kick sense overlaps >= 20% with the sneaker definition.
        assert not any(s.votes is not None for s in lex.slang)

    def test_informal_conventional_dropped(self):
        records = make_records(BASE_SPEC)
        conv = [{"word": "ice", "definition": "money in large amounts", "pos": "noun",
                 "kind": "conventional", "flags": ["informal"]}]
        lex = ingest(records + conv, ())
        assert all("money" not in c.definition for c in lex.conventional["ice"])

    def test_slang_without_conventional_dropped(self):
        spec = BASE_SPEC + [("yeet", "to hurl with force", "verb", "slang")]
        lex = ingest_spec(spec)
        assert "yeet" not in lex.vocabulary

    def test_multiword_joined(self):
        spec = BASE_SPEC + [
            ("on fleek", "styled to perfection", "adj", "slang"),
            ("on fleek", "exactly on point", "adj", "conventional"),
        ]
        lex = ingest_spec(spec)
        assert "on_fleek" in lex.vocabulary

    def test_same_word_dedup_keeps_first(self):
        spec = BASE_SPEC + [("kick", "a strong thrill indeed", "noun", "slang")]
        lex = ingest_spec(spec)
        kicks = [s for s in lex.slang if s.word == "kick"]
        assert len(kicks) == 1
        assert kicks[0].definition == "a strong thrill"

    def test_malformed_record_skipped(self, caplog):
        records = make_records(BASE_SPEC) + [{"word": "bad"}, "not a dict"]
        with caplog.at_level("WARNING"):
            lex = ingest(records, ())
        assert len(lex.slang) == 3
        assert sum("rejected" in r.message for r in caplog.records) == 2

    def test_empty_result_raises(self):
        with pytest.raises(DataError):
            ingest([{"word": "solo", "definition": "alone act", "pos": "noun",
                     "kind": "slang"}], ())

    def test_idempotent(self, tmp_path):
        lex = ingest_spec(BASE_SPEC)
        path = tmp_path / "lexicon.jsonl"
        save_lexicon(lex, path)
        again = load_lexicon(path)
        assert [s.to_record() for s in again.slang] == [s.to_record() for s in lex.slang]
        assert again.vocabulary == lex.vocabulary
        assert {w: [c.to_record() for c in cs] for w, cs in again.conventional.items()} == \
               {w: [c.to_record() for c in cs] for w, cs in lex.conventional.items()}


def big_lexicon(n):
    spec = []
    for i in range(n):
        w = f"w{chr(97 + i // 26)}{chr(97 + i % 26)}"
        spec.append((w, f"{w}slangtok{i} meaning", "noun", "slang"))
        spec.append((w, f"{w}convtok{i} thing", "noun", "conventional"))
    return make_lexicon(spec)


class TestSplit:
    def test_counts_match_floor_rule(self):
        lex = big_lexicon(100)
        s = split(lex, seed=1)
        assert len(s.test) == 10
        assert len(s.validation) == 4  # floor(5% of 90)
        assert len(s.train) == 86

    def test_deterministic(self):
        lex = big_lexicon(40)
        assert split(lex, 9) == split(lex, 9)

    def test_different_seeds_differ(self):
        lex = big_lexicon(40)
        assert split(lex, 1) != split(lex, 2)

    def test_partition(self):
        lex = big_lexicon(53)
        s = split(lex, 3)
        parts = [set(s.train), set(s.validation), set(s.test)]
        assert set().union(*parts) == {x.id for x in lex.slang}
        assert sum(len(p) for p in parts) == 53

    def test_too_few_entries(self):
        lex = big_lexicon(9)
        with pytest.raises(DataError):
            split(lex, 0)


class TestHistoricalSplits:
    def spec_with_decades(self):
        spec = []
        decades = [1950] * 3 + [1960] * 2 + [1970]
        for i, dec in enumerate(decades):
            w = f"w{chr(97 + i)}x"
            spec.append((w, f"tok{chr(97 + i)}h meaning", "noun", "slang", {"decade": dec}))
            spec.append((w, f"tok{chr(97 + i)}c thing", "noun", "conventional"))
        return spec

    def test_counts_by_cutoff(self):
        lex = make_lexicon(self.spec_with_decades())
        out = historical_splits(lex, 1960, 1970)
        assert [(d, len(tr), len(te)) for d, tr, te in out] == [(1960, 3, 2), (1970, 5, 1)]

    def test_train_sets_nest(self):
        lex = make_lexicon(self.spec_with_decades())
        out = historical_splits(lex, 1960, 1970)
        assert set(out[0][1]) <= set(out[1][1])
        assert set(out[0][2]).isdisjoint(out[1][2])

    def test_empty_first_train_raises(self):
        lex = make_lexicon(self.spec_with_decades())
        with pytest.raises(DataError):
            historical_splits(lex, 1950, 1970)

    def test_undated_excluded(self):
        spec = self.spec_with_decades()
        spec.append(("wax", "tokaxs meaning", "noun", "slang"))
        spec.append(("wax", "tokaxc thing", "noun", "conventional"))
        lex = make_lexicon(spec)
        out = historical_splits(lex, 1960, 1970)
        seen = set()
        for _, tr, te in out:
            seen |= set(tr) | set(te)
        assert all(lex.sense(i).decade is not None for i in seen)


class TestPosDistribution:
    def test_normalization(self):
        d = pos_distribution("kick", {"kick": {"noun": 3, "verb": 1}})
        assert d.probs[DEFAULT_TAG_SET.index("noun")] == pytest.approx(0.75)
        assert d.probs[DEFAULT_TAG_SET.index("verb")] == pytest.approx(0.25)
        assert d.probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_absent_word_uniform(self):
        d = pos_distribution("ghost", {}, {})
        assert np.allclose(d.probs, 1.0 / len(DEFAULT_TAG_SET))

    def test_fallback_used(self):
        d = pos_distribution("kick", {}, {"kick": {"verb": 2}})
        assert d.probs[DEFAULT_TAG_SET.index("verb")] == pytest.approx(1.0)

    def test_gdos_tag_set_has_five(self):
        assert len(GDOS_TAG_SET) == 5
        assert "interj" not in GDOS_TAG_SET
        d = pos_distribution("kick", {"kick": {"noun": 1}}, tag_set=GDOS_TAG_SET)
        assert d.probs.shape == (5,)

    def test_unknown_tag_maps_to_other(self):
        d = pos_distribution("kick", {"kick": {"zz-custom": 4}})
        assert d.probs[DEFAULT_TAG_SET.index("other")] == pytest.approx(1.0)

    def test_conventional_tag_counts(self):
        lex = make_lexicon(BASE_SPEC)
        counts = conventional_tag_counts(lex)
        assert counts["ice"] == {"noun": 2}
        assert counts["kick"] == {"verb": 1}
