"""Probabilistic word choice: kernel likelihoods, posteriors, kernel fitting."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .contrastive import EncoderParams, encode, encode_batch
from .embedding import cosine_distance
from .errors import DataError, NumericalError

logger = logging.getLogger(__name__)

KERNEL_BOUNDS = (1e-4, 1e4)
LIKELIHOODS = ("1nn", "prototype")


@dataclass(frozen=True)
class KernelParams:
    h_s: float = 1.0
    h_cf: float = 1.0

    def __post_init__(self):
        for name in ("h_s", "h_cf"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")


@dataclass(frozen=True)
class ChoiceModelConfig:
    likelihood: str = "prototype"
    use_cf: bool = False
    kernels: KernelParams = KernelParams()
    encoder: EncoderParams | None = None

    def __post_init__(self):
        if self.likelihood not in LIKELIHOODS:
            raise ValueError(f"likelihood must be one of {LIKELIHOODS}")


@dataclass(frozen=True)
class Posterior:
    probs: np.ndarray


def sense_similarity(eS, eW, h_s):
    """exp(-||eS - eW||^2 / h_s), in (0, 1]."""
    d2 = float(np.sum((np.asarray(eS, dtype=float) - np.asarray(eW, dtype=float)) ** 2))
    return math.exp(-d2 / h_s)


def likelihood_1nn(eS, senses, h_s):
    """Similarity to the closest sense (max over the set)."""
    senses = np.atleast_2d(np.asarray(senses, dtype=float))
    if senses.size == 0:
        raise ValueError("1NN likelihood needs at least one sense")
    d2 = np.sum((senses - np.asarray(eS, dtype=float)) ** 2, axis=1)
    return math.exp(-float(d2.min()) / h_s)


def likelihood_prototype(eS, senses, h_s):
    """Similarity to the mean (prototype) of the senses."""
    senses = np.atleast_2d(np.asarray(senses, dtype=float))
    if senses.size == 0:
        raise ValueError("prototype likelihood needs at least one sense")
    return sense_similarity(eS, senses.mean(axis=0), h_s)


@dataclass
class SenseSpace:
    """Per-word conventional sense vectors, optionally passed through the encoder."""

    vocabulary: list[str]
    matrices: list[np.ndarray]  # one (n_senses, dim) block per word
    prototypes: np.ndarray  # (V, dim)
    encoder: EncoderParams | None = None
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {w: i for i, w in enumerate(self.vocabulary)}

    def encode_query(self, eS):
        eS = np.asarray(eS, dtype=float)
        return encode(self.encoder, eS) if self.encoder is not None else eS

    def sq_distances(self, e, likelihood):
        """Per-word squared distance feeding the kernel, given an encoded query."""
        if likelihood == "prototype":
            diff = self.prototypes - e
            return np.sum(diff * diff, axis=1)
        out = np.empty(len(self.vocabulary))
        for i, block in enumerate(self.matrices):
            diff = block - e
            out[i] = np.min(np.sum(diff * diff, axis=1))
        return out


def prepare_sense_space(lex, store, encoder=None):
    """Stack each word's conventional sense vectors (encoded when asked)."""
    matrices = []
    for w in lex.vocabulary:
        rows = [store.sense_vectors[c.id] for c in lex.conventional[w]
                if c.id in store.sense_vectors]
        if not rows:
            raise DataError(f"word {w!r} has no conventional sense vectors")
        block = np.stack(rows)
        if encoder is not None:
            block = encode_batch(encoder, block)
        matrices.append(block)
    prototypes = np.stack([m.mean(axis=0) for m in matrices])
    return SenseSpace(
        vocabulary=list(lex.vocabulary),
        matrices=matrices,
        prototypes=prototypes,
        encoder=encoder,
    )


def _prior_probs(prior, size):
    probs = np.asarray(getattr(prior, "probs", prior), dtype=float)
    if probs.shape != (size,):
        raise ValueError(f"prior has shape {probs.shape}, vocabulary has {size} words")
    if (probs < 0).any():
        raise ValueError("prior has negative mass")
    return probs


def _log_posterior(d2, log_prior, h_s):
    logw = -d2 / h_s + log_prior
    norm = logsumexp(logw)
    if not np.isfinite(norm):
        raise NumericalError("posterior mass is zero everywhere; cannot normalize")
    return logw - norm


def posterior(eS, space, prior, cfg):
    """P(w | sense, context) over the vocabulary: likelihood x prior, normalized."""
    if cfg.encoder is not space.encoder:
        raise ValueError("config encoder does not match the prepared sense space")
    e = space.encode_query(eS)
    d2 = space.sq_distances(e, cfg.likelihood)
    with np.errstate(divide="ignore"):  # zero prior mass is a legal -inf
        log_prior = np.log(_prior_probs(prior, len(space.vocabulary)))
    return Posterior(np.exp(_log_posterior(d2, log_prior, cfg.kernels.h_s)))


def cf_weights(w, nbh, store, h_cf):
    """Normalized kernel weights over {w} ∪ L(w) by raw-vector cosine distance."""
    words = [w] + [n for n, _ in nbh[w]]
    wv = store.word_vectors[w]
    raw = np.array([
        math.exp(-(0.0 if x == w else cosine_distance(wv, store.word_vectors[x])) / h_cf)
        for x in words
    ])
    raw /= raw.sum()
    return dict(zip(words, raw))


class CfMixer:
    """Precomputed neighbor indices and cosine distances for CF mixing."""

    def __init__(self, vocabulary, nbh, store):
        index = {w: i for i, w in enumerate(vocabulary)}
        width = 1 + max((len(nbh[w]) for w in vocabulary), default=0)
        self.indices = np.zeros((len(vocabulary), width), dtype=int)
        self.distances = np.full((len(vocabulary), width), np.inf)
        for i, w in enumerate(vocabulary):
            self.indices[i, 0] = i
            self.distances[i, 0] = 0.0
            for j, (nw, d) in enumerate(nbh[w], start=1):
                self.indices[i, j] = index[nw]
                self.distances[i, j] = d

    def weights(self, h_cf):
        logw = -self.distances / h_cf
        logw -= logsumexp(logw, axis=1, keepdims=True)
        return np.exp(logw)

    def mix(self, base, h_cf):
        """base: (..., V) posterior rows -> CF-smoothed, renormalized rows."""
        base = np.asarray(base, dtype=float)
        if self.indices.shape[1] == 1:
            return base  # self-only neighborhoods: CF is the identity
        w = self.weights(h_cf)
        mixed = np.einsum("...vk,vk->...v", base[..., self.indices], w)
        total = mixed.sum(axis=-1, keepdims=True)
        if (total <= 0).any():
            raise NumericalError("collaborative-filtering mass is zero; cannot normalize")
        return mixed / total


def cf_posterior(eS, space, store, nbh, prior, cfg):
    """Posterior smoothed over each candidate's word neighborhood (then renormalized)."""
    base = posterior(eS, space, prior, cfg).probs
    mixer = CfMixer(space.vocabulary, nbh, store)
    return Posterior(mixer.mix(base, cfg.kernels.h_cf))


def _golden_section(f, lo, hi, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


class KernelObjective:
    """Cached negative log likelihood of true words over training queries.

    Distances and priors are precomputed once; evaluating at a candidate
    (h_s, h_cf) is a cheap vectorized pass, which also makes dense grid
    oracles affordable.
    """

    def __init__(self, train_ids, lex, store, nbh, prior_fn, cfg):
        space = prepare_sense_space(lex, store, cfg.encoder)
        queries = []
        for sid in train_ids:
            s = lex.sense(sid)
            if sid not in store.sense_vectors:
                raise DataError(f"train sense {sid} has no vector")
            queries.append(s)
        if not queries:
            raise DataError("kernel fitting requires a non-empty training set")
        E = np.stack([space.encode_query(store.sense_vectors[s.id]) for s in queries])
        self.d2 = np.stack([space.sq_distances(e, cfg.likelihood) for e in E])
        with np.errstate(divide="ignore"):
            self.log_prior = np.log(np.stack([
                _prior_probs(prior_fn(s), len(space.vocabulary)) for s in queries
            ]))
        self.true_idx = np.array([space.index[s.word] for s in queries])
        self.use_cf = cfg.use_cf
        self.mixer = CfMixer(space.vocabulary, nbh, store) if cfg.use_cf else None
        self.n = len(queries)
        self.space = space

    def nll(self, h_s, h_cf=1.0):
        logw = -self.d2 / h_s + self.log_prior
        norm = logsumexp(logw, axis=1, keepdims=True)
        if not np.isfinite(norm).all():
            return math.inf
        rows = np.arange(self.n)
        if not self.use_cf:
            return float(-np.sum(logw[rows, self.true_idx] - norm[:, 0]))
        base = np.exp(logw - norm)
        mixed = self.mixer.mix(base, h_cf)
        p = mixed[rows, self.true_idx]
        if (p <= 0).any():
            return math.inf
        return float(-np.sum(np.log(p)))


def fit_kernels(train_ids, lex, store, nbh, prior_fn, cfg, *,
                tol=1e-6, max_sweeps=100):
    """Fit kernel widths by coordinate descent with golden-section searches.

    Minimizes the summed negative log posterior of the true words over
    log-space widths in [1e-4, 1e4]; h_cf is only fitted when the model
    uses collaborative filtering. Deterministic.
    """
    obj = KernelObjective(train_ids, lex, store, nbh, prior_fn, cfg)
    lo, hi = math.log(KERNEL_BOUNDS[0]), math.log(KERNEL_BOUNDS[1])
    cur = [0.0, 0.0]  # log(1.0) starting point

    def value(v):
        return obj.nll(math.exp(v[0]), math.exp(v[1]))

    best = value(cur)
    coords = (0, 1) if cfg.use_cf else (0,)
    for _ in range(max_sweeps):
        moved = 0.0
        for i in coords:
            def line(x, i=i):
                probe = list(cur)
                probe[i] = x
                return value(probe)

            x, fx = _golden_section(line, lo, hi, tol)
            if fx < best - 1e-12:
                moved += abs(x - cur[i])
                cur[i] = x
                best = fx
        if moved < tol:
            break
    if not math.isfinite(best):
        raise NumericalError("kernel fit: objective is non-finite at every probe")
    return KernelParams(
        h_s=math.exp(cur[0]),
        h_cf=math.exp(cur[1]) if cfg.use_cf else 1.0,
    )


def save_kernels(cfg, path, header_lines=()):
    """Key-value text file for fitted kernels and the model selection."""
    with open(path, "w", encoding="utf-8") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(f"h_s {cfg.kernels.h_s!r}\n")
        f.write(f"h_cf {cfg.kernels.h_cf!r}\n")
        f.write(f"likelihood {cfg.likelihood}\n")
        f.write(f"use_cf {str(cfg.use_cf).lower()}\n")
        f.write(f"use_encoder {str(cfg.encoder is not None).lower()}\n")


def load_kernels(path):
    """Read the key-value kernel file back into (ChoiceModelConfig, use_encoder)."""
    fields = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition(" ")
            fields[key] = value
    try:
        cfg = ChoiceModelConfig(
            likelihood=fields["likelihood"],
            use_cf=fields["use_cf"] == "true",
            kernels=KernelParams(h_s=float(fields["h_s"]), h_cf=float(fields["h_cf"])),
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: bad kernel file: {exc}") from None
    return cfg, fields.get("use_encoder") == "true"
