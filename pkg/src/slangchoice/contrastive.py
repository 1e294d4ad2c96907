"""Triplet construction and contrastive encoder training.

The encoder maps a sense vector through one hidden ReLU layer back to the
input dimension; it is trained with a max-margin triplet loss using
hand-derived gradients and single-example Adam updates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .embedding import is_degenerate
from .errors import DataError, NumericalError
from .lexicon import content_words, overlap_fraction
from .stopwords import STOPWORDS

logger = logging.getLogger(__name__)

# Negative-sampling constraints: a candidate word must not sit in the top
# 20% of the anchor word's neighbors, and its definition must share less
# than 20% content words with the anchor-side definitions.
NEGATIVE_RANK_MIN = 0.2
NEGATIVE_OVERLAP_MAX = 0.2


@dataclass(frozen=True)
class Triplet:
    anchor_id: str
    positive_id: str
    negative_id: str


@dataclass(frozen=True)
class TrainConfig:
    margin: float = 0.1
    learning_rate: float = 1e-4
    max_epochs: int = 20
    hidden: int = 1000
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    use_neighborhood_sampling: bool = False
    negative_attempts: int = 1000

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError(f"margin must be >= 0, got {self.margin}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass
class EncoderParams:
    W1: np.ndarray  # (hidden, dim)
    b1: np.ndarray  # (hidden,)
    W2: np.ndarray  # (dim, hidden)
    b2: np.ndarray  # (dim,)
    dim: int
    hidden: int
    train_log: list = field(default_factory=list)  # (train_loss, val_loss) per epoch

    def copy_weights(self):
        return EncoderParams(
            W1=self.W1.copy(), b1=self.b1.copy(),
            W2=self.W2.copy(), b2=self.b2.copy(),
            dim=self.dim, hidden=self.hidden,
            train_log=list(self.train_log),
        )

    def validate(self):
        shapes = {
            "W1": (self.hidden, self.dim), "b1": (self.hidden,),
            "W2": (self.dim, self.hidden), "b2": (self.dim,),
        }
        for name, want in shapes.items():
            arr = getattr(self, name)
            if arr.shape != want:
                raise DataError(f"encoder {name} has shape {arr.shape}, want {want}")
            if not np.isfinite(arr).all():
                raise DataError(f"encoder {name} has non-finite entries")
        return self


def encode(params, x):
    """W2·relu(W1·x + b1) + b2."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.dim,):
        raise ValueError(f"input has shape {x.shape}, encoder expects ({params.dim},)")
    return params.W2 @ np.maximum(params.W1 @ x + params.b1, 0.0) + params.b2


def encode_batch(params, X):
    X = np.asarray(X, dtype=float)
    if X.shape[1] != params.dim:
        raise ValueError(f"batch has {X.shape[1]} columns, encoder expects {params.dim}")
    return np.maximum(X @ params.W1.T + params.b1, 0.0) @ params.W2.T + params.b2


def triplet_loss(eS, eP, eN, margin):
    """max(0, margin + ||eS-eP||^2 - ||eS-eN||^2)."""
    dp = float(np.sum((np.asarray(eS) - np.asarray(eP)) ** 2))
    dn = float(np.sum((np.asarray(eS) - np.asarray(eN)) ** 2))
    return max(0.0, margin + dp - dn)


@dataclass
class Gradients:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray


def _loss_and_gradient(params, xS, xP, xN, margin):
    hS = params.W1 @ xS + params.b1
    hP = params.W1 @ xP + params.b1
    hN = params.W1 @ xN + params.b1
    aS, aP, aN = np.maximum(hS, 0.0), np.maximum(hP, 0.0), np.maximum(hN, 0.0)
    eS = params.W2 @ aS + params.b2
    eP = params.W2 @ aP + params.b2
    eN = params.W2 @ aN + params.b2

    dP = eS - eP
    dN = eS - eN
    loss = margin + float(dP @ dP) - float(dN @ dN)
    g = Gradients(
        W1=np.zeros_like(params.W1), b1=np.zeros_like(params.b1),
        W2=np.zeros_like(params.W2), b2=np.zeros_like(params.b2),
    )
    if loss <= 0.0:
        return 0.0, g

    # dL/de for each branch; relu subgradient is 0 at 0 (strict h > 0 mask).
    branches = (
        (2.0 * (dP - dN), hS, aS, xS),
        (-2.0 * dP, hP, aP, xP),
        (2.0 * dN, hN, aN, xN),
    )
    for ge, h, a, x in branches:
        g.W2 += np.outer(ge, a)
        g.b2 += ge
        gh = (params.W2.T @ ge) * (h > 0.0)
        g.W1 += np.outer(gh, x)
        g.b1 += gh
    return loss, g


def loss_gradient(params, xS, xP, xN, margin):
    """Exact gradient of triplet_loss∘encode w.r.t. all encoder parameters."""
    _, g = _loss_and_gradient(
        params,
        np.asarray(xS, dtype=float),
        np.asarray(xP, dtype=float),
        np.asarray(xN, dtype=float),
        margin,
    )
    return g


def build_positive_pairs(train_ids, lex, nbh=None, use_ns=False):
    """(anchor slang id, positive conventional id) pairs for training.

    One pair per conventional sense of the anchor's word; with
    neighborhood sampling, also per conventional sense of each neighbor.
    """
    if use_ns and nbh is None:
        raise ValueError("neighborhood sampling requires neighborhoods")
    pairs = []
    for sid in train_ids:
        s = lex.sense(sid)
        own = lex.conventional.get(s.word, ())
        if not own:
            logger.warning("slang sense %s has no conventional senses; skipped", sid)
            continue
        words = [s.word]
        if use_ns:
            words.extend(n for n, _ in nbh[s.word])
        for w in words:
            for c in lex.conventional.get(w, ()):
                pairs.append((sid, c.id))
    return pairs


class NegativeSampler:
    """Rejection sampler for negative conventional senses.

    Admissibility of a candidate word w' against anchor word w: w' must
    rank outside the top 20% of w's neighbors (cosine distance on raw
    word vectors), and the candidate definition must overlap < 20% in
    content words with the anchor definition, with every conventional
    definition of w, and (under neighborhood sampling) with those of
    w's neighbors.
    """

    def __init__(self, lex, store, nbh=None, use_ns=False,
                 max_attempts=1000, stopwords=STOPWORDS):
        self.lex = lex
        self.use_ns = use_ns
        self.max_attempts = max_attempts
        self.nbh = nbh
        if use_ns and nbh is None:
            raise ValueError("neighborhood sampling requires neighborhoods")
        self.vocabulary = lex.vocabulary
        self._windex = {w: i for i, w in enumerate(self.vocabulary)}
        self.pool = [(w, c.id) for w in self.vocabulary for c in lex.conventional[w]]
        self._content = {
            s.id: content_words(s.definition, stopwords) for s in lex.all_senses()
        }
        rows = np.stack([store.word_vectors[w] for w in self.vocabulary])
        self._unit = rows / np.linalg.norm(rows, axis=1, keepdims=True)
        self._admissible: dict[str, np.ndarray] = {}
        self._refs: dict[str, list] = {}

    def _admissible_words(self, w):
        cached = self._admissible.get(w)
        if cached is not None:
            return cached
        i = self._windex[w]
        dist = 1.0 - self._unit @ self._unit[i]
        order = [j for j in np.argsort(dist, kind="stable") if j != i]
        n = len(order)
        mask = np.zeros(len(self.vocabulary), dtype=bool)
        for rank0, j in enumerate(order):
            mask[j] = (rank0 + 1) / n > NEGATIVE_RANK_MIN
        self._admissible[w] = mask
        return mask

    def _reference_sets(self, anchor):
        cached = self._refs.get(anchor.id)
        if cached is not None:
            return cached
        refs = [self._content[anchor.id]]
        words = [anchor.word]
        if self.use_ns:
            words.extend(n for n, _ in self.nbh[anchor.word])
        for w in words:
            refs.extend(self._content[c.id] for c in self.lex.conventional.get(w, ()))
        self._refs[anchor.id] = refs
        return refs

    def sample(self, anchor_id, rng):
        anchor = self.lex.sense(anchor_id)
        mask = self._admissible_words(anchor.word)
        refs = self._reference_sets(anchor)
        for _ in range(self.max_attempts):
            w, cid = self.pool[int(rng.integers(len(self.pool)))]
            if not mask[self._windex[w]]:
                continue
            cand = self._content[cid]
            if any(overlap_fraction(cand, r) >= NEGATIVE_OVERLAP_MAX for r in refs):
                continue
            return cid
        raise DataError(
            f"no admissible negative found for anchor {anchor_id} "
            f"(word {anchor.word!r}) after {self.max_attempts} attempts"
        )


def sample_negative(pair, lex, store, nbh, rng, use_ns=False, max_attempts=1000):
    """One-off negative sample for a positive pair; see NegativeSampler."""
    sampler = NegativeSampler(lex, store, nbh, use_ns=use_ns, max_attempts=max_attempts)
    return sampler.sample(pair[0], rng)


def init_params(dim, hidden, rng):
    """Seeded Glorot-uniform weights, zero biases."""
    def glorot(fan_out, fan_in):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=(fan_out, fan_in))

    return EncoderParams(
        W1=glorot(hidden, dim), b1=np.zeros(hidden),
        W2=glorot(dim, hidden), b2=np.zeros(dim),
        dim=dim, hidden=hidden,
    )


class _Adam:
    def __init__(self, params, cfg):
        self.cfg = cfg
        self.t = 0
        self.m = {n: np.zeros_like(getattr(params, n)) for n in ("W1", "b1", "W2", "b2")}
        self.v = {n: np.zeros_like(getattr(params, n)) for n in ("W1", "b1", "W2", "b2")}

    def step(self, params, grads):
        c = self.cfg
        self.t += 1
        bc1 = 1.0 - c.beta1 ** self.t
        bc2 = 1.0 - c.beta2 ** self.t
        for name in ("W1", "b1", "W2", "b2"):
            g = getattr(grads, name)
            m = self.m[name]
            v = self.v[name]
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * g * g
            update = (m / bc1) / (np.sqrt(v / bc2) + c.epsilon)
            getattr(params, name)[...] -= c.learning_rate * update


def _mean_triplet_loss(params, XA, XP, XN, margin):
    eA = encode_batch(params, XA)
    eP = encode_batch(params, XP)
    eN = encode_batch(params, XN)
    dp = np.sum((eA - eP) ** 2, axis=1)
    dn = np.sum((eA - eN) ** 2, axis=1)
    return float(np.mean(np.maximum(margin + dp - dn, 0.0)))


def _usable_vector(store, sid):
    vec = store.sense_vectors.get(sid)
    if vec is None or is_degenerate(vec):
        return None
    return vec


def train(lex, split, store, nbh, cfg):
    """Train the contrastive encoder; returns the best-validation checkpoint.

    Negatives are resampled for every positive pair each epoch; validation
    triplets are drawn once so epoch losses are comparable. The initial
    (untrained) parameters count as the epoch-0 candidate.
    """
    vectors = {}
    dropped = 0
    for s in lex.all_senses():
        vec = _usable_vector(store, s.id)
        if vec is None:
            dropped += 1
        else:
            vectors[s.id] = vec
    if dropped:
        logger.warning("excluding %d senses without usable vectors from training", dropped)

    def usable(ids):
        return [i for i in ids if i in vectors]

    train_ids = usable(split.train)
    val_ids = usable(split.validation)
    if not train_ids or not val_ids:
        raise DataError("training requires non-empty train and validation sets")

    pairs = [
        (a, p) for a, p in build_positive_pairs(train_ids, lex, nbh, cfg.use_neighborhood_sampling)
        if p in vectors
    ]
    val_pairs = [
        (a, p) for a, p in build_positive_pairs(val_ids, lex, nbh, cfg.use_neighborhood_sampling)
        if p in vectors
    ]
    if not pairs or not val_pairs:
        raise DataError("no usable positive pairs for training/validation")

    rng = np.random.default_rng(cfg.seed)
    params = init_params(store.dim, cfg.hidden, rng)
    sampler = NegativeSampler(
        lex, store, nbh, use_ns=cfg.use_neighborhood_sampling,
        max_attempts=cfg.negative_attempts,
    )

    val_triplets = [Triplet(a, p, sampler.sample(a, rng)) for a, p in val_pairs]
    VA = np.stack([vectors[t.anchor_id] for t in val_triplets])
    VP = np.stack([vectors[t.positive_id] for t in val_triplets])
    VN = np.stack([vectors[t.negative_id] for t in val_triplets])

    val0 = _mean_triplet_loss(params, VA, VP, VN, cfg.margin)
    train_log = [(math.nan, val0)]
    best_val, best = val0, params.copy_weights()

    adam = _Adam(params, cfg)
    for epoch in range(1, cfg.max_epochs + 1):
        negatives = [sampler.sample(a, rng) for a, _ in pairs]
        order = rng.permutation(len(pairs))
        total = 0.0
        for idx in order:
            a, p = pairs[idx]
            loss, grads = _loss_and_gradient(
                params, vectors[a], vectors[p], vectors[negatives[idx]], cfg.margin
            )
            if not math.isfinite(loss):
                raise NumericalError(
                    f"non-finite loss at epoch {epoch} (anchor {a}, positive {p})"
                )
            total += loss
            adam.step(params, grads)
        val_loss = _mean_triplet_loss(params, VA, VP, VN, cfg.margin)
        if not math.isfinite(val_loss):
            raise NumericalError(f"non-finite validation loss at epoch {epoch}")
        train_log.append((total / len(pairs), val_loss))
        if val_loss < best_val:
            best_val, best = val_loss, params.copy_weights()

    best.train_log = train_log
    return best


def save_encoder(params, path, header_lines=()):
    """Flat text format: `dim hidden` header, then W1, b1, W2, b2 row-major."""
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(f"dim {params.dim} hidden {params.hidden}\n")
        for name in ("W1", "W2"):
            for row in getattr(params, name):
                f.write(" ".join(repr(float(x)) for x in row) + "\n")
        for name in ("b1", "b2"):
            f.write(" ".join(repr(float(x)) for x in getattr(params, name)) + "\n")
        for i, (tr, vl) in enumerate(params.train_log):
            f.write(f"# epoch {i} train {tr!r} val {vl!r}\n")


def load_encoder(path):
    rows = []
    header = None
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                parts = line.split()
                if len(parts) != 4 or parts[0] != "dim" or parts[2] != "hidden":
                    raise DataError(f"{path}: bad encoder header {line!r}")
                header = (int(parts[1]), int(parts[3]))
                continue
            rows.append(np.array([float(x) for x in line.split()], dtype=float))
    if header is None:
        raise DataError(f"{path}: missing encoder header")
    dim, hidden = header
    if len(rows) != hidden + dim + 2:
        raise DataError(f"{path}: expected {hidden + dim + 2} rows, got {len(rows)}")
    params = EncoderParams(
        W1=np.stack(rows[:hidden]),
        W2=np.stack(rows[hidden:hidden + dim]),
        b1=rows[hidden + dim],
        b2=rows[hidden + dim + 1],
        dim=dim,
        hidden=hidden,
    )
    return params.validate()
