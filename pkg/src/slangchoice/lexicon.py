"""Dictionary ingest, filtering, content-word overlap, and dataset splits."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .stopwords import STOPWORDS

logger = logging.getLogger(__name__)

DEFAULT_TAG_SET = ("noun", "verb", "adj", "adv", "interj", "other")
# GDoS-style data carries no interjections.
GDOS_TAG_SET = ("noun", "verb", "adj", "adv", "other")

PHRASE_JOINER = "_"

# Collapse source tagsets onto the six working categories. Anything not
# listed here (and not already a category) maps to "other".
TAG_ALIASES = {
    "n": "noun",
    "nn": "noun",
    "nns": "noun",
    "nnp": "noun",
    "propn": "noun",
    "v": "verb",
    "vb": "verb",
    "vbd": "verb",
    "vbg": "verb",
    "vbn": "verb",
    "vbp": "verb",
    "vbz": "verb",
    "adjective": "adj",
    "jj": "adj",
    "jjr": "adj",
    "jjs": "adj",
    "adverb": "adv",
    "rb": "adv",
    "rbr": "adv",
    "rbs": "adv",
    "interjection": "interj",
    "intj": "interj",
    "uh": "interj",
    "excl": "interj",
}

_TOKEN_RE = re.compile(r"[a-z]+")


def canonical_tag(tag, tag_set=DEFAULT_TAG_SET):
    """Map a raw source POS tag onto the working tag set."""
    t = str(tag).strip().lower().rstrip(".")
    t = TAG_ALIASES.get(t, t)
    return t if t in tag_set else "other"


def content_words(sentence, stopwords=STOPWORDS):
    """Lowercased alphabetic tokens of `sentence` minus stopwords, as a set."""
    return {t for t in _TOKEN_RE.findall(sentence.lower()) if t not in stopwords}


def overlap_fraction(a, b):
    """|a ∩ b| / min(|a|, |b|); 0.0 when either set is empty."""
    if not a or not b:
        return 0.0
    return len(a & b) / min(len(a), len(b))


@dataclass(frozen=True)
class SenseDefinition:
    """One dictionary sense; the atomic data point for training and testing."""

    id: str
    word: str
    definition: str
    pos: str
    kind: str  # "slang" | "conventional"
    decade: int | None = None
    example: str | None = None
    votes: tuple[int, int] | None = None
    flags: tuple[str, ...] = ()

    def to_record(self):
        rec = {
            "id": self.id,
            "word": self.word,
            "definition": self.definition,
            "pos": self.pos,
            "kind": self.kind,
        }
        if self.decade is not None:
            rec["decade"] = self.decade
        if self.example is not None:
            rec["example"] = self.example
        if self.votes is not None:
            rec["up"], rec["down"] = self.votes
        if self.flags:
            rec["flags"] = list(self.flags)
        return rec


@dataclass(frozen=True)
class FilterConfig:
    dedup_overlap_threshold: float = 0.5
    ud_min_vote_margin: int = 10
    ud_cross_dict_overlap: float = 0.2
    drop_acronyms: bool = True
    drop_informal_conventional: bool = True
    stopword_list: frozenset = STOPWORDS

    def __post_init__(self):
        for name in ("dedup_overlap_threshold", "ud_cross_dict_overlap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass
class Lexicon:
    """Filtered slang and conventional senses over a fixed vocabulary."""

    slang: list[SenseDefinition]
    conventional: dict[str, list[SenseDefinition]]
    vocabulary: list[str]
    tag_set: tuple[str, ...] = DEFAULT_TAG_SET
    _by_id: dict[str, SenseDefinition] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._by_id:
            for s in self.slang:
                self._by_id[s.id] = s
            for senses in self.conventional.values():
                for s in senses:
                    self._by_id[s.id] = s

    def sense(self, sense_id):
        try:
            return self._by_id[sense_id]
        except KeyError:
            raise DataError(f"unknown sense id: {sense_id}") from None

    def slang_by_word(self):
        out: dict[str, list[SenseDefinition]] = {}
        for s in self.slang:
            out.setdefault(s.word, []).append(s)
        return out

    def all_senses(self):
        senses = list(self.slang)
        for w in self.vocabulary:
            senses.extend(self.conventional[w])
        return senses


@dataclass(frozen=True)
class DataSplit:
    train: list[str]
    validation: list[str]
    test: list[str]
    seed: int


@dataclass(frozen=True)
class PosDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if (p < 0).any():
            raise ValueError("POS distribution has negative mass")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"POS distribution sums to {p.sum()}, not 1")
        object.__setattr__(self, "probs", p)


class _Rejected(Exception):
    pass


def _normalize_word(raw):
    w = PHRASE_JOINER.join(str(raw).split())
    return w.lower()


def _parse_record(rec, default_kind, tag_set, seen_ids, counters):
    if not isinstance(rec, dict):
        raise _Rejected("record is not a mapping")
    raw_word = rec.get("word")
    if not isinstance(raw_word, str) or not raw_word.strip():
        raise _Rejected("missing word")
    definition = rec.get("definition")
    if not isinstance(definition, str) or not definition.strip():
        raise _Rejected("missing definition")
    definition = definition.strip()
    kind = rec.get("kind", default_kind)
    if kind not in ("slang", "conventional"):
        raise _Rejected(f"bad kind {kind!r}")
    if "pos" not in rec:
        raise _Rejected("missing pos")
    pos = canonical_tag(rec["pos"], tag_set)

    decade = rec.get("decade")
    if decade is not None:
        if not isinstance(decade, int) or decade <= 0 or decade % 10 != 0:
            raise _Rejected(f"bad decade {decade!r}")

    votes = None
    if "up" in rec or "down" in rec:
        try:
            up, down = int(rec.get("up", 0)), int(rec.get("down", 0))
        except (TypeError, ValueError):
            raise _Rejected("bad vote counts") from None
        if up < 0 or down < 0:
            raise _Rejected("negative vote counts")
        votes = (up, down)

    flags = tuple(str(f).lower() for f in rec.get("flags", ()))

    sense_id = rec.get("id")
    if sense_id is None:
        counters[kind] += 1
        sense_id = f"{kind[0]}{counters[kind]:05d}"
    sense_id = str(sense_id)
    if sense_id in seen_ids:
        raise _Rejected(f"duplicate id {sense_id}")
    seen_ids.add(sense_id)

    sd = SenseDefinition(
        id=sense_id,
        word=_normalize_word(raw_word),
        definition=definition,
        pos=pos,
        kind=kind,
        decade=decade,
        example=rec.get("example"),
        votes=votes,
        flags=flags,
    )
    return sd, raw_word.strip()


def ingest(records, conventional_records=(), cfg=None, tag_set=DEFAULT_TAG_SET):
    """Filter raw dictionary records into a Lexicon.

    `records` and `conventional_records` are iterables of dicts; a record's
    explicit "kind" key wins over the stream it arrived on. Malformed
    records are rejected individually (logged) without aborting the run.
    Raises DataError if no slang entry survives.
    """
    cfg = cfg or FilterConfig()
    stop = cfg.stopword_list

    slang: list[SenseDefinition] = []
    conventional: list[SenseDefinition] = []
    seen_ids: set[str] = set()
    counters = {"slang": 0, "conventional": 0}
    for stream, default_kind in ((records, "slang"), (conventional_records, "conventional")):
        for rec in stream:
            try:
                sd, raw_word = _parse_record(rec, default_kind, tag_set, seen_ids, counters)
            except _Rejected as exc:
                logger.warning("record rejected (%s): %.80r", exc, rec)
                continue
            if sd.kind == "slang":
                if cfg.drop_acronyms and raw_word.isupper():
                    logger.debug("dropping acronym slang entry %r", raw_word)
                    continue
                slang.append(sd)
            else:
                conventional.append(sd)

    if cfg.drop_informal_conventional:
        conventional = [s for s in conventional if "informal" not in s.flags]
    kept_conv = []
    for s in conventional:
        if content_words(s.definition, stop):
            kept_conv.append(s)
        else:
            logger.warning("conventional sense %s has no content words; dropped", s.id)
    conv_by_word: dict[str, list[SenseDefinition]] = {}
    for s in kept_conv:
        conv_by_word.setdefault(s.word, []).append(s)

    cw = {s.id: content_words(s.definition, stop) for s in kept_conv}
    kept_slang = []
    for s in slang:
        words_set = content_words(s.definition, stop)
        if not words_set:
            logger.warning("slang sense %s has no content words; dropped", s.id)
            continue
        if s.votes is not None and s.votes[0] - s.votes[1] < cfg.ud_min_vote_margin:
            continue
        conv_senses = conv_by_word.get(s.word, ())
        if any(
            overlap_fraction(words_set, cw[c.id]) > cfg.dedup_overlap_threshold
            for c in conv_senses
        ):
            continue
        cw[s.id] = words_set
        kept_slang.append(s)

    # Same-word dedup: keep the first of any pair overlapping above threshold.
    deduped: list[SenseDefinition] = []
    kept_by_word: dict[str, list[SenseDefinition]] = {}
    for s in kept_slang:
        if any(
            overlap_fraction(cw[s.id], cw[p.id]) > cfg.dedup_overlap_threshold
            for p in kept_by_word.get(s.word, ())
        ):
            continue
        deduped.append(s)
        kept_by_word.setdefault(s.word, []).append(s)

    # Crowd-sourced entries must echo a curated (unvoted) sense of the word.
    final_slang = []
    for s in deduped:
        if s.votes is not None:
            refs = [p for p in kept_by_word.get(s.word, ()) if p.votes is None]
            if not refs or max(overlap_fraction(cw[s.id], cw[r.id]) for r in refs) < cfg.ud_cross_dict_overlap:
                continue
        final_slang.append(s)

    final_slang = [s for s in final_slang if s.word in conv_by_word]
    if not final_slang:
        raise DataError("no slang entries survived ingest")

    vocabulary = sorted({s.word for s in final_slang})
    conventional_map = {w: conv_by_word[w] for w in vocabulary}
    return Lexicon(
        slang=final_slang,
        conventional=conventional_map,
        vocabulary=vocabulary,
        tag_set=tuple(tag_set),
    )


def split(lex, seed):
    """Deterministic 90/10 train/test split with 5% of train held for validation."""
    ids = [s.id for s in lex.slang]
    n = len(ids)
    if n < 10:
        raise DataError(f"need at least 10 slang entries to split, got {n}")
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [ids[i] for i in order]
    n_test = n * 10 // 100
    n_val = (n - n_test) * 5 // 100
    return DataSplit(
        train=shuffled[n_test + n_val:],
        validation=shuffled[n_test:n_test + n_val],
        test=shuffled[:n_test],
        seed=seed,
    )


def historical_splits(lex, start_decade, end_decade):
    """Per-decade (decade, train ids, test ids): train strictly before, test at.

    Slang entries without a decade tag are excluded (count logged).
    """
    for d in (start_decade, end_decade):
        if d <= 0 or d % 10 != 0:
            raise DataError(f"decade {d} is not a positive multiple of 10")
    if start_decade > end_decade:
        raise DataError("start decade after end decade")
    dated = [s for s in lex.slang if s.decade is not None]
    excluded = len(lex.slang) - len(dated)
    if excluded:
        logger.info("historical mode: excluding %d undated slang senses", excluded)
    out = []
    for d in range(start_decade, end_decade + 1, 10):
        train = [s.id for s in dated if s.decade < d]
        test = [s.id for s in dated if s.decade == d]
        out.append((d, train, test))
    if not out[0][1]:
        raise DataError(f"no training entries before decade {start_decade}")
    return out


def _tally(raw_counts, tag_set):
    vec = np.zeros(len(tag_set))
    if raw_counts:
        index = {t: i for i, t in enumerate(tag_set)}
        for tag, count in raw_counts.items():
            c = float(count)
            if c < 0:
                raise DataError(f"negative POS count for tag {tag!r}")
            vec[index[canonical_tag(tag, tag_set)]] += c
    return vec


def pos_distribution(word, counts, fallback_counts=None, tag_set=DEFAULT_TAG_SET):
    """Normalized POS distribution of `word` over `tag_set`.

    `counts` and `fallback_counts` map word -> {tag: count}. The fallback
    source is consulted when the primary has no mass for the word; if both
    are empty the distribution is uniform.
    """
    vec = _tally((counts or {}).get(word), tag_set)
    if vec.sum() == 0 and fallback_counts:
        vec = _tally(fallback_counts.get(word), tag_set)
    if vec.sum() == 0:
        vec = np.ones(len(tag_set))
    return PosDistribution(vec / vec.sum())


def conventional_tag_counts(lex):
    """Tag counts per vocabulary word from its conventional senses.

    Serves as the fallback source for pos_distribution when no corpus
    counts are available.
    """
    out: dict[str, dict[str, int]] = {}
    for w in lex.vocabulary:
        tally: dict[str, int] = {}
        for s in lex.conventional[w]:
            tally[s.pos] = tally.get(s.pos, 0) + 1
        out[w] = tally
    return out


def save_lexicon(lex, path, header_lines=()):
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        for s in lex.all_senses():
            f.write(json.dumps(s.to_record(), sort_keys=True) + "\n")


def load_records(path):
    """Read line-delimited JSON records, skipping comment lines."""
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: bad record: {exc}") from None
    return records


def load_lexicon(path, cfg=None, tag_set=DEFAULT_TAG_SET):
    """Rebuild a Lexicon from a serialized record file (ingest is idempotent)."""
    return ingest(load_records(path), (), cfg=cfg, tag_set=tag_set)


def load_pos_counts(path):
    """Read tabular POS counts: word <TAB> tag <TAB> count."""
    out: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            word, tag, count = parts
            try:
                out.setdefault(_normalize_word(word), {})[tag] = float(count)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad count {count!r}") from None
    return out
