"""Ranking evaluation: ROC/AUC, few/zero-shot, synonymy, semantic distance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import mannwhitneyu, spearmanr

from .contrastive import encode_batch
from .errors import DataError
from .lexicon import content_words
from .stopwords import STOPWORDS

DEFAULT_SYNONYMY_BINS = (0, 1, 2, 3, 4)


@dataclass(frozen=True)
class RankResult:
    sense_id: str
    true_word: str
    rank: int
    topk: list = field(default_factory=list)  # [(word, probability)]


@dataclass
class EvalReport:
    auc: float
    roc: list
    n: int
    label: str = ""
    error: str | None = None


def rank_candidates(post, true_word, vocabulary, sense_id="", k=5):
    """Rank of the true word under the posterior; ties break by vocabulary order."""
    probs = np.asarray(getattr(post, "probs", post), dtype=float)
    if true_word not in vocabulary:
        raise DataError(f"true word {true_word!r} not in vocabulary")
    if probs.shape != (len(vocabulary),):
        raise ValueError("posterior does not align with the vocabulary")
    # Stable sort on descending probability keeps vocabulary order for ties.
    order = np.argsort(-probs, kind="stable")
    positions = np.empty(len(vocabulary), dtype=int)
    positions[order] = np.arange(len(vocabulary))
    rank = int(positions[vocabulary.index(true_word)]) + 1
    topk = [(vocabulary[i], float(probs[i])) for i in order[:k]]
    return RankResult(sense_id=sense_id, true_word=true_word, rank=rank, topk=topk)


def _ranks(results):
    return [r.rank if isinstance(r, RankResult) else int(r) for r in results]


def auc(results, v_size):
    """Mean single-positive ROC AUC as a percentage.

    With one relevant word per query the area under the ROC curve reduces
    to (V - rank) / (V - 1), averaged over queries.
    """
    ranks = _ranks(results)
    if not ranks:
        raise ValueError("auc needs at least one ranked query")
    if v_size < 2:
        raise ValueError("auc needs a vocabulary of at least 2")
    return 100.0 * float(np.mean([(v_size - r) / (v_size - 1) for r in ranks]))


def roc_curve(results, v_size):
    """Pooled ROC points (fpr, tpr) for cutoffs k = 0 .. V."""
    ranks = np.asarray(_ranks(results))
    n = len(ranks)
    points = []
    for k in range(v_size + 1):
        hits = ranks <= k
        tpr = float(np.mean(hits))
        fpr = float(np.mean((k - hits.astype(float)) / (v_size - 1)))
        points.append((fpr, tpr))
    return points


def trapezoid_area(points):
    xs, ys = zip(*points)
    return float(np.trapezoid(ys, xs))


def partition_few_zero(split, lex):
    """Split test ids into few-shot (word seen in training slang) and zero-shot."""
    train_words = {lex.sense(i).word for i in split.train}
    few, zero = [], []
    for sid in split.test:
        (few if lex.sense(sid).word in train_words else zero).append(sid)
    return few, zero


def synonymy_degree(test_sense, train_senses, stopwords=STOPWORDS):
    """Minimum set edit distance |A∪B| - |A∩B| between content-word sets.

    Returns math.inf when there are no training senses to compare against.
    """
    a = content_words(test_sense.definition, stopwords)
    best = math.inf
    for t in train_senses:
        b = content_words(t.definition, stopwords)
        best = min(best, len(a | b) - len(a & b))
    return best


def synonymy_bin(degree, edges=DEFAULT_SYNONYMY_BINS):
    """Label for the bin a synonymy degree falls in, last bin open-ended."""
    for edge in edges[:-1]:
        if degree <= edge:
            return str(edge)
    return f"{edges[-1]}+"


@dataclass
class DistanceReport:
    values: np.ndarray  # normalized rank per sense, in [0, 1]
    mean: float
    stderr: float


def semantic_distance_report(test_ids, lex, store, encoder=None):
    """Normalized rank of each slang vector's own prototype among all words.

    Euclidean distance in the (optionally encoded) sense space; rank 1 is
    the nearest prototype, normalized by |V| - 1.
    """
    vocab = lex.vocabulary
    protos = []
    for w in vocab:
        rows = [store.sense_vectors[c.id] for c in lex.conventional[w]
                if c.id in store.sense_vectors]
        if not rows:
            raise DataError(f"word {w!r} has no conventional sense vectors")
        block = np.stack(rows)
        if encoder is not None:
            block = encode_batch(encoder, block)
        protos.append(block.mean(axis=0))
    protos = np.stack(protos)
    index = {w: i for i, w in enumerate(vocab)}

    values = []
    for sid in test_ids:
        s = lex.sense(sid)
        vec = store.sense_vectors[sid]
        if encoder is not None:
            vec = encode_batch(encoder, vec[None, :])[0]
        d = np.sqrt(np.sum((protos - vec) ** 2, axis=1))
        order = np.argsort(d, kind="stable")
        positions = np.empty(len(vocab), dtype=int)
        positions[order] = np.arange(len(vocab))
        values.append(positions[index[s.word]] / (len(vocab) - 1))
    values = np.asarray(values)
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return DistanceReport(values=values, mean=float(values.mean()), stderr=stderr)


def location_test(smaller, larger):
    """One-sided Mann-Whitney p-value that `smaller` sits below `larger`."""
    return float(mannwhitneyu(smaller, larger, alternative="less").pvalue)


def prior_correlation(senses, prior_fn_a, prior_fn_b):
    """Per-example Spearman correlation between two priors, with mean/stderr.

    Quantifies how much complementary information the priors carry: values
    near zero mean they rank candidates independently.
    """
    values = []
    for s in senses:
        rho = spearmanr(prior_fn_a(s).probs, prior_fn_b(s).probs).statistic
        values.append(float(rho))
    values = np.asarray(values)
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    return values, float(values.mean()), stderr


def prediction_report(test_ids, lex, models, k=5):
    """Side-by-side top-k predictions and true-word ranks per model.

    `models` is a list of (name, rank_fn) where rank_fn(sense, k) returns
    a RankResult.
    """
    rows = []
    for sid in test_ids:
        s = lex.sense(sid)
        row = {"sense_id": sid, "true_word": s.word, "definition": s.definition}
        for name, rank_fn in models:
            result = rank_fn(s, k)
            row[f"{name}_top{k}"] = " ".join(w for w, _ in result.topk)
            row[f"{name}_rank"] = result.rank
        rows.append(row)
    return rows
