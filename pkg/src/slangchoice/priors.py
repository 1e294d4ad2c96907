"""Contextual priors over the vocabulary: uniform, syntactic-shift, LM-based."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .lexicon import PosDistribution

logger = logging.getLogger(__name__)

KL_FLOOR = 1e-10
DEFAULT_QUERY_EPSILON = 0.1
DEFAULT_ALPHA = 0.001


@dataclass(frozen=True)
class PriorVector:
    probs: np.ndarray
    kind: str = "uniform"

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if (p < 0).any():
            raise ValueError("prior has negative mass")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"prior sums to {p.sum()}, not 1")
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-normalized POS transition counts, rows slang tag, columns conventional."""

    T: np.ndarray
    tag_set: tuple[str, ...]

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        k = len(self.tag_set)
        if T.shape != (k, k):
            raise ValueError(f"transition matrix shape {T.shape} does not match {k} tags")
        if (T < 0).any():
            raise ValueError("transition matrix has negative entries")
        if np.abs(T.sum(axis=0) - 1.0).max() > 1e-9:
            raise ValueError("transition matrix columns must sum to 1")
        object.__setattr__(self, "T", T)


@dataclass
class LmScoreTable:
    """Externally produced infilling scores: sense id -> {word: score}."""

    scores: dict[str, dict[str, float]]
    alpha: float = DEFAULT_ALPHA

    def validate(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DataError(f"alpha must be positive and finite, got {self.alpha}")
        for sid, row in self.scores.items():
            for w, v in row.items():
                if not (math.isfinite(v) and v >= 0):
                    raise DataError(f"bad LM score for ({sid}, {w}): {v}")
        return self


def estimate_transition_matrix(train_ids, lex):
    """Count (slang tag, conventional tag) pairs over training senses.

    Every training slang sense contributes one count against each
    conventional sense of its word. Columns normalize to 1; a column with
    no observations becomes uniform.
    """
    if not train_ids:
        raise DataError("transition matrix needs a non-empty training set")
    tags = lex.tag_set
    index = {t: i for i, t in enumerate(tags)}
    counts = np.zeros((len(tags), len(tags)))
    for sid in train_ids:
        s = lex.sense(sid)
        for c in lex.conventional.get(s.word, ()):
            counts[index[s.pos], index[c.pos]] += 1
    col_sums = counts.sum(axis=0)
    T = np.empty_like(counts)
    for j, total in enumerate(col_sums):
        T[:, j] = counts[:, j] / total if total > 0 else 1.0 / len(tags)
    return TransitionMatrix(T=T, tag_set=tuple(tags))


def smoothed_query_distribution(tag, tag_set, epsilon=DEFAULT_QUERY_EPSILON):
    """Mass 1-epsilon on the query tag, epsilon spread over the rest."""
    if tag not in tag_set:
        raise DataError(f"unknown POS tag {tag!r}; tag set is {tag_set}")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    k = len(tag_set)
    if k == 1:
        return PosDistribution(np.ones(1))
    probs = np.full(k, epsilon / (k - 1))
    probs[tag_set.index(tag)] = 1.0 - epsilon
    return PosDistribution(probs)


def _floored(p):
    q = np.maximum(np.asarray(p, dtype=float), KL_FLOOR)
    return q / q.sum()


def kl_divergence(p, q):
    """KL(p || q) with both arguments floored at 1e-10 and renormalized."""
    p, q = _floored(p), _floored(q)
    return float(np.sum(p * np.log(p / q)))


def syntactic_prior(query_tag, vocabulary, pos_dists, transition,
                    epsilon=DEFAULT_QUERY_EPSILON):
    """Score words by closeness of their POS profile to the shifted query tag.

    The smoothed query distribution is transformed by the transition
    matrix; each word scores exp(-KL(P_w || P*_S))^(1/2), normalized
    over the vocabulary.
    """
    ps = smoothed_query_distribution(query_tag, transition.tag_set, epsilon).probs
    pstar = _floored(transition.T @ ps)
    scores = np.empty(len(vocabulary))
    for i, w in enumerate(vocabulary):
        dist = pos_dists[w]
        probs = dist.probs if isinstance(dist, PosDistribution) else np.asarray(dist, float)
        scores[i] = math.exp(-0.5 * kl_divergence(probs, pstar))
    return PriorVector(scores / scores.sum(), kind="syntactic")


def linguistic_prior(sense_id, table, vocabulary):
    """Laplace-smoothed LM infilling scores, normalized over the vocabulary."""
    if not table.alpha > 0:
        raise DataError(f"alpha must be positive, got {table.alpha}")
    row = table.scores.get(sense_id, {})
    scores = np.array([row.get(w, 0.0) + table.alpha for w in vocabulary])
    return PriorVector(scores / scores.sum(), kind="linguistic")


def combine_priors(priors):
    """Element-wise product of priors, renormalized."""
    if not priors:
        raise ValueError("combine_priors needs at least one prior")
    sizes = {len(p.probs) for p in priors}
    if len(sizes) != 1:
        raise ValueError(f"priors cover different vocabularies: sizes {sorted(sizes)}")
    product = np.ones(sizes.pop())
    for p in priors:
        product = product * p.probs
    total = product.sum()
    if total <= 0:
        raise NumericalError("combined prior has zero mass everywhere")
    kind = priors[0].kind if len(priors) == 1 else "combined"
    return PriorVector(product / total, kind=kind)


def uniform_prior(vocabulary):
    n = len(vocabulary)
    if n == 0:
        raise ValueError("vocabulary is empty")
    return PriorVector(np.full(n, 1.0 / n), kind="uniform")


def save_lm_scores(table, path, header_lines=()):
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(f"alpha {table.alpha!r}\n")
        for sid in table.scores:
            for w, v in table.scores[sid].items():
                f.write(f"{sid}\t{w}\t{v!r}\n")


def load_lm_scores(path):
    alpha = None
    scores: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if alpha is None:
                parts = line.split()
                if len(parts) != 2 or parts[0] != "alpha":
                    raise DataError(f"{path}:{lineno}: expected `alpha <value>` header")
                alpha = float(parts[1])
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            sid, word, value = parts
            try:
                scores.setdefault(sid, {})[word] = float(value)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score {value!r}") from None
    if alpha is None:
        raise DataError(f"{path}: missing alpha header")
    return LmScoreTable(scores=scores, alpha=alpha).validate()


def save_transition_matrix(transition, path, header_lines=()):
    """Labeled tag grid: header row of conventional tags, one row per slang tag."""
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write("\t" + "\t".join(transition.tag_set) + "\n")
        for i, tag in enumerate(transition.tag_set):
            f.write(tag + "\t" + "\t".join(repr(float(x)) for x in transition.T[i]) + "\n")


def load_transition_matrix(path):
    tags = None
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if tags is None:
                if parts[0] != "":
                    raise DataError(f"{path}: bad grid header")
                tags = tuple(parts[1:])
                continue
            if len(parts) != len(tags) + 1:
                raise DataError(f"{path}: row has {len(parts) - 1} values, want {len(tags)}")
            rows.append([float(x) for x in parts[1:]])
    if tags is None or len(rows) != len(tags):
        raise DataError(f"{path}: incomplete transition grid")
    return TransitionMatrix(T=np.array(rows), tag_set=tags)
