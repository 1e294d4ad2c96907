"""End-to-end model assembly: priors, encoder training, kernel fitting, scoring."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import choice, contrastive, evaluation, priors
from .contrastive import TrainConfig
from .embedding import build_neighborhoods
from .errors import ConfigError, DataError, SlangChoiceError
from .lexicon import (
    DataSplit,
    conventional_tag_counts,
    historical_splits,
    pos_distribution,
)

logger = logging.getLogger(__name__)

PRIOR_KINDS = ("uniform", "ssp", "lcp", "ssp+lcp")


@dataclass
class PipelineConfig:
    likelihood: str = "prototype"
    use_cf: bool = True
    use_encoder: bool = True
    prior: str = "uniform"
    prior_only: bool = False  # rank by the prior alone (prior-baseline rows)
    epsilon: float = priors.DEFAULT_QUERY_EPSILON
    neighborhood_k: int = 5
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.prior not in PRIOR_KINDS:
            raise ConfigError(f"prior must be one of {PRIOR_KINDS}, got {self.prior!r}")


def make_prior_fn(kind, lex, *, transition=None, pos_dists=None, lm_table=None,
                  epsilon=priors.DEFAULT_QUERY_EPSILON):
    """Callable mapping a slang sense to its PriorVector for the chosen prior."""
    vocab = lex.vocabulary
    uniform = priors.uniform_prior(vocab)
    want_ssp = "ssp" in kind
    want_lcp = "lcp" in kind
    if want_ssp and (transition is None or pos_dists is None):
        raise ConfigError("syntactic prior needs a transition matrix and POS distributions")
    if want_lcp and lm_table is None:
        raise ConfigError("linguistic prior needs an LM score table")
    syntactic_cache: dict[str, priors.PriorVector] = {}

    def fn(sense):
        parts = []
        if want_ssp:
            cached = syntactic_cache.get(sense.pos)
            if cached is None:
                cached = priors.syntactic_prior(sense.pos, vocab, pos_dists, transition, epsilon)
                syntactic_cache[sense.pos] = cached
            parts.append(cached)
        if want_lcp:
            parts.append(priors.linguistic_prior(sense.id, lm_table, vocab))
        if not parts:
            return uniform
        return parts[0] if len(parts) == 1 else priors.combine_priors(parts)

    return fn


@dataclass
class FittedModel:
    cfg: choice.ChoiceModelConfig
    space: choice.SenseSpace
    nbh: dict
    prior_fn: object
    transition: priors.TransitionMatrix | None = None
    prior_only: bool = False
    _mixer: choice.CfMixer | None = None

    @property
    def vocabulary(self):
        return self.space.vocabulary

    def posterior_for(self, sense, store):
        if self.prior_only:
            return self.prior_fn(sense).probs
        if sense.id not in store.sense_vectors:
            raise DataError(f"sense {sense.id} has no vector")
        eS = store.sense_vectors[sense.id]
        prior = self.prior_fn(sense)
        base = choice.posterior(eS, self.space, prior, self.cfg).probs
        if self.cfg.use_cf:
            if self._mixer is None:
                raise DataError("collaborative filtering requested without a mixer")
            base = self._mixer.mix(base, self.cfg.kernels.h_cf)
        return base

    def rank(self, sense, store, k=5):
        probs = self.posterior_for(sense, store)
        return evaluation.rank_candidates(
            probs, sense.word, self.space.vocabulary, sense_id=sense.id, k=k
        )


def build_pos_dists(lex, pos_counts=None):
    fallback = conventional_tag_counts(lex)
    return {
        w: pos_distribution(w, pos_counts, fallback, tag_set=lex.tag_set)
        for w in lex.vocabulary
    }


def fit_model(lex, train_ids, val_ids, store, pcfg, *, lm_table=None,
              pos_counts=None, encoder=None, nbh=None):
    """Train/fit every component the configuration asks for.

    A pre-trained `encoder` (or prebuilt neighborhoods) short-circuits
    that stage, which the CLI uses to reuse artifacts.
    """
    if nbh is None:
        nbh = build_neighborhoods(store, lex.vocabulary, pcfg.neighborhood_k)

    transition = None
    pos_dists = None
    if "ssp" in pcfg.prior:
        transition = priors.estimate_transition_matrix(train_ids, lex)
        pos_dists = build_pos_dists(lex, pos_counts)
    prior_fn = make_prior_fn(
        pcfg.prior, lex, transition=transition, pos_dists=pos_dists,
        lm_table=lm_table, epsilon=pcfg.epsilon,
    )

    if pcfg.prior_only:
        space = choice.prepare_sense_space(lex, store, None)
        return FittedModel(cfg=choice.ChoiceModelConfig(), space=space, nbh=nbh,
                           prior_fn=prior_fn, transition=transition, prior_only=True)

    if pcfg.use_encoder and encoder is None:
        split = DataSplit(train=list(train_ids), validation=list(val_ids),
                          test=[], seed=pcfg.train.seed)
        encoder = contrastive.train(lex, split, store, nbh, pcfg.train)
    if not pcfg.use_encoder:
        encoder = None

    fit_cfg = choice.ChoiceModelConfig(
        likelihood=pcfg.likelihood, use_cf=pcfg.use_cf, encoder=encoder,
    )
    kernels = choice.fit_kernels(train_ids, lex, store, nbh, prior_fn, fit_cfg)
    cfg = choice.ChoiceModelConfig(
        likelihood=pcfg.likelihood, use_cf=pcfg.use_cf, kernels=kernels, encoder=encoder,
    )
    space = choice.prepare_sense_space(lex, store, encoder)
    mixer = choice.CfMixer(space.vocabulary, nbh, store) if pcfg.use_cf else None
    return FittedModel(cfg=cfg, space=space, nbh=nbh, prior_fn=prior_fn,
                       transition=transition, _mixer=mixer)


def evaluate_ranks(model, lex, store, test_ids, k=5):
    return [model.rank(lex.sense(sid), store, k=k) for sid in test_ids]


def evaluate(model, lex, store, test_ids, label="", k=5):
    ranks = evaluate_ranks(model, lex, store, test_ids, k=k)
    v = len(lex.vocabulary)
    return evaluation.EvalReport(
        auc=evaluation.auc(ranks, v),
        roc=evaluation.roc_curve(ranks, v),
        n=len(ranks),
        label=label,
    )


def carve_validation(train_ids, seed):
    """Deterministically set aside 5% (at least one entry) for validation."""
    ids = list(train_ids)
    if len(ids) < 2:
        raise DataError("cannot carve a validation set from fewer than 2 entries")
    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in order]
    n_val = max(1, len(ids) * 5 // 100)
    return shuffled[n_val:], shuffled[:n_val]


def historical_eval(lex, store, start_decade, end_decade, pcfg, *,
                    lm_table=None, pos_counts=None, k=5):
    """Retrain and evaluate per decade; failures are recorded, not fatal."""
    reports = []
    for decade, train_ids, test_ids in historical_splits(lex, start_decade, end_decade):
        label = f"{decade}s"
        if not test_ids:
            reports.append(evaluation.EvalReport(
                auc=math.nan, roc=[], n=0, label=label, error="no test entries",
            ))
            continue
        try:
            tr, val = carve_validation(train_ids, pcfg.train.seed)
            model = fit_model(lex, tr, val, store, pcfg,
                              lm_table=lm_table, pos_counts=pos_counts)
            reports.append(evaluate(model, lex, store, test_ids, label=label))
        except SlangChoiceError as exc:
            logger.warning("decade %s failed: %s", label, exc)
            reports.append(evaluation.EvalReport(
                auc=math.nan, roc=[], n=len(test_ids), label=label, error=str(exc),
            ))
    return reports
