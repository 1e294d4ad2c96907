"""Fixed-dimension sense vectors: store I/O, pooling, neighborhoods."""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UnembeddableDefinition
from .lexicon import content_words
from .stopwords import STOPWORDS

logger = logging.getLogger(__name__)

DEGENERATE_NORM = 1e-9


@dataclass
class EmbeddingStore:
    """Immutable id -> vector maps for words and sense definitions."""

    dim: int
    word_vectors: dict[str, np.ndarray] = field(default_factory=dict)
    sense_vectors: dict[str, np.ndarray] = field(default_factory=dict)
    source: str = ""

    def validate(self):
        if self.dim <= 0:
            raise DataError(f"bad embedding dimension {self.dim}")
        for name, table in (("word", self.word_vectors), ("sense", self.sense_vectors)):
            for key, vec in table.items():
                if vec.shape != (self.dim,):
                    raise DataError(f"{name} vector {key!r} has shape {vec.shape}, want ({self.dim},)")
                if not np.isfinite(vec).all():
                    raise DataError(f"{name} vector {key!r} has non-finite components")
                if name == "word" and np.linalg.norm(vec) < DEGENERATE_NORM:
                    raise DataError(f"word vector {key!r} is (near) zero")
        return self


def is_degenerate(vec, tol=DEGENERATE_NORM):
    return float(np.linalg.norm(vec)) < tol


def cosine_distance(u, v):
    """1 - cos(u, v), in [0, 2]. Raises ValueError on zero vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu < DEGENERATE_NORM or nv < DEGENERATE_NORM:
        raise ValueError("cosine distance undefined for zero vectors")
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(max(d, 0.0), 2.0)


def sentence_embedding(definition, store, stopwords=STOPWORDS):
    """Mean of L2-normalized vectors of the definition's in-store content words.

    Words missing from the store are skipped. Raises UnembeddableDefinition
    when nothing remains. The mean may itself be (near) zero for opposed
    vectors; callers exclude such degenerate results from training.
    """
    words = sorted(content_words(definition, stopwords))
    rows = []
    for w in words:
        vec = store.word_vectors.get(w)
        if vec is None:
            continue
        rows.append(vec / np.linalg.norm(vec))
    if not rows:
        raise UnembeddableDefinition(
            f"no content word of {definition!r} is present in the vector store"
        )
    pooled = np.mean(rows, axis=0)
    if is_degenerate(pooled):
        logger.warning("pooled vector for %.60r is degenerate (zero mean)", definition)
    return pooled


def toy_embedder(token, dim, seed):
    """Deterministic pseudo-random unit vector keyed by (token, seed).

    Hash-based (SHA-256 counter mode), so identical across runs and
    platforms. The norm is accumulated left to right on purpose: other
    implementations of the scheme reproduce these float64 bits exactly.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    out = np.empty(dim)
    i = 0
    block = 0
    while i < dim:
        digest = hashlib.sha256(f"{token}\x1f{seed}\x1f{block}".encode("utf-8")).digest()
        for off in range(0, 32, 8):
            if i >= dim:
                break
            u = int.from_bytes(digest[off:off + 8], "big")
            out[i] = 2.0 * ((u >> 11) * 2.0 ** -53) - 1.0
            i += 1
        block += 1
    total = 0.0
    for x in out:
        total += x * x
    norm = math.sqrt(total)
    if norm < 1e-12:
        out[0] = 1.0
        norm = 1.0
    return out / norm


def _unit_rows(store, vocabulary):
    missing = [w for w in vocabulary if w not in store.word_vectors]
    if missing:
        raise DataError(f"vocabulary words without vectors: {', '.join(missing[:10])}")
    rows = np.stack([store.word_vectors[w] for w in vocabulary])
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def build_neighborhoods(store, vocabulary, k):
    """k nearest vocabulary words per word by cosine distance.

    Ties break by vocabulary order; a word is never its own neighbor.
    Returns {word: [(neighbor, distance), ...]} with distances ascending.
    """
    if k >= len(vocabulary):
        raise ValueError(f"k={k} must be smaller than the vocabulary ({len(vocabulary)})")
    unit = _unit_rows(store, vocabulary)
    out = {}
    chunk = 512
    for lo in range(0, len(vocabulary), chunk):
        dist = 1.0 - unit[lo:lo + chunk] @ unit.T
        np.clip(dist, 0.0, 2.0, out=dist)
        for row, i in enumerate(range(lo, min(lo + chunk, len(vocabulary)))):
            order = np.argsort(dist[row], kind="stable")
            neighbors = []
            for j in order:
                if j == i:
                    continue
                neighbors.append((vocabulary[j], float(dist[row, j])))
                if len(neighbors) == k:
                    break
            out[vocabulary[i]] = neighbors
    return out


def neighbor_rank_percentile(store, vocabulary, w, w2):
    """Rank of w2 among words sorted by ascending distance to w, over |V|-1."""
    if w == w2:
        raise ValueError("rank percentile undefined for a word against itself")
    unit = _unit_rows(store, vocabulary)
    index = {word: i for i, word in enumerate(vocabulary)}
    for word in (w, w2):
        if word not in index:
            raise DataError(f"word not in vocabulary: {word!r}")
    i = index[w]
    dist = 1.0 - unit @ unit[i]
    np.clip(dist, 0.0, 2.0, out=dist)
    order = [j for j in np.argsort(dist, kind="stable") if j != i]
    rank = order.index(index[w2]) + 1
    return rank / (len(vocabulary) - 1)


def save_vector_file(path, dim, rows, header_lines=()):
    """Write the `dim <d> count <n>` vector file format.

    `rows` is an iterable of (id, vector) pairs; order is preserved.
    """
    rows = list(rows)
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(f"dim {dim} count {len(rows)}\n")
        for key, vec in rows:
            f.write(key + "\t" + " ".join(repr(float(x)) for x in vec) + "\n")


def load_vector_file(path, vocabulary=None, sense_ids=None, source=None):
    """Load a vector file into an EmbeddingStore.

    Rows whose id appears in `sense_ids` become sense vectors; every other
    row is a word vector (word-vector exports routinely cover far more
    tokens than the vocabulary). With `vocabulary` given, missing word
    coverage is warned about. Structural problems raise DataError.
    """
    sense_set = set(sense_ids) if sense_ids is not None else set()
    word_vectors: dict[str, np.ndarray] = {}
    sense_vectors: dict[str, np.ndarray] = {}
    dim = None
    declared = None
    n_rows = 0
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if dim is None:
                parts = line.split()
                if len(parts) != 4 or parts[0] != "dim" or parts[2] != "count":
                    raise DataError(f"{path}:{lineno}: bad header {line!r}")
                dim, declared = int(parts[1]), int(parts[3])
                if dim <= 0:
                    raise DataError(f"{path}:{lineno}: bad dimension {dim}")
                continue
            key, _, values = line.partition("\t")
            if not values:
                raise DataError(f"{path}:{lineno}: missing tab separator")
            try:
                vec = np.array([float(x) for x in values.split()], dtype=float)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad float") from None
            if vec.shape != (dim,):
                raise DataError(f"{path}:{lineno}: expected {dim} components, got {vec.shape[0]}")
            if not np.isfinite(vec).all():
                raise DataError(f"{path}:{lineno}: non-finite component")
            n_rows += 1
            if key in word_vectors or key in sense_vectors:
                raise DataError(f"{path}:{lineno}: duplicate id {key!r}")
            if key in sense_set:
                if is_degenerate(vec):
                    logger.warning("%s:%d: sense vector %r is degenerate", path, lineno, key)
                sense_vectors[key] = vec
            else:
                word_vectors[key] = vec
    if dim is None:
        raise DataError(f"{path}: missing header")
    if declared != n_rows:
        raise DataError(f"{path}: header declares {declared} rows, found {n_rows}")
    if vocabulary is not None:
        missing = [w for w in vocabulary if w not in word_vectors]
        if missing:
            logger.warning("%s: no vectors for %d vocabulary words (first: %s)",
                           path, len(missing), missing[0])
    store = EmbeddingStore(
        dim=dim,
        word_vectors=word_vectors,
        sense_vectors=sense_vectors,
        source=source or str(path),
    )
    return store.validate()


def pool_missing_sense_vectors(lex, store, stopwords=STOPWORDS):
    """Fill store.sense_vectors for senses absent from the store by pooling.

    Returns the ids that could not be embedded (no in-store content words).
    """
    failures = []
    for s in lex.all_senses():
        if s.id in store.sense_vectors:
            continue
        try:
            store.sense_vectors[s.id] = sentence_embedding(s.definition, store, stopwords)
        except UnembeddableDefinition:
            failures.append(s.id)
    if failures:
        logger.warning("%d definitions could not be pooled into vectors", len(failures))
    return failures
