"""Command-line front end: config-driven, artifact-based, deterministic."""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import choice, contrastive, evaluation, pipeline, priors, synthetic
from .contrastive import TrainConfig
from .embedding import build_neighborhoods, load_vector_file, pool_missing_sense_vectors
from .errors import ConfigError, DataError, SlangChoiceError
from .lexicon import (
    DEFAULT_TAG_SET,
    GDOS_TAG_SET,
    DataSplit,
    FilterConfig,
    ingest,
    load_lexicon,
    load_pos_counts,
    load_records,
    save_lexicon,
    split as make_split,
)

logger = logging.getLogger(__name__)

TAG_SETS = {"default": DEFAULT_TAG_SET, "gdos": GDOS_TAG_SET}


@dataclass
class ExperimentConfig:
    paths: dict
    filter_cfg: FilterConfig
    tag_set: tuple
    train_cfg_fields: dict
    model: dict
    prior: dict
    eval_opts: dict
    seed: int
    config_hash: str
    output_dir: Path


def _get(parser, section, option, convert, default, errors):
    if not parser.has_option(section, option):
        return default
    raw = parser.get(section, option)
    try:
        return convert(raw)
    except (TypeError, ValueError):
        errors.append(f"[{section}] {option} = {raw!r}")
        return default


def _bool(raw):
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(raw)


def load_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = path.read_bytes()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(raw.decode("utf-8"))
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None

    errors: list[str] = []
    known = {"paths", "filter", "train", "model", "prior", "eval", "run"}
    for section in parser.sections():
        if section not in known:
            errors.append(f"unknown section [{section}]")

    paths = {k: parser.get("paths", k) for k in parser.options("paths")} \
        if parser.has_section("paths") else {}
    out_dir = Path(paths.get("output_dir", "out"))

    filter_kwargs = {}
    for name, conv in (("dedup_overlap_threshold", float),
                       ("ud_min_vote_margin", int),
                       ("ud_cross_dict_overlap", float),
                       ("drop_acronyms", _bool),
                       ("drop_informal_conventional", _bool)):
        value = _get(parser, "filter", name, conv, None, errors)
        if value is not None:
            filter_kwargs[name] = value
    try:
        filter_cfg = FilterConfig(**filter_kwargs)
    except ValueError as exc:
        raise ConfigError(f"[filter] {exc}") from None

    tag_name = _get(parser, "filter", "tag_set", str, "default", errors)
    if tag_name not in TAG_SETS:
        errors.append(f"[filter] tag_set = {tag_name!r}")
        tag_name = "default"

    seed = _get(parser, "run", "seed", int, None, errors)
    if seed is None and not any(e.endswith("seed") for e in errors):
        errors.append("[run] seed is mandatory")

    train_fields = {"seed": seed if seed is not None else 0}
    for name, conv in (("margin", float), ("learning_rate", float),
                       ("max_epochs", int), ("hidden", int),
                       ("use_neighborhood_sampling", _bool),
                       ("negative_attempts", int)):
        value = _get(parser, "train", name, conv, None, errors)
        if value is not None:
            train_fields[name] = value

    model = {
        "likelihood": _get(parser, "model", "likelihood", str, "prototype", errors),
        "use_cf": _get(parser, "model", "use_cf", _bool, True, errors),
        "use_encoder": _get(parser, "model", "use_encoder", _bool, True, errors),
        "prior_only": _get(parser, "model", "prior_only", _bool, False, errors),
        "neighborhood_k": _get(parser, "model", "neighborhood_k", int, 5, errors),
    }
    if model["likelihood"] not in choice.LIKELIHOODS:
        errors.append(f"[model] likelihood = {model['likelihood']!r}")

    prior = {
        "kind": _get(parser, "prior", "kind", str, "uniform", errors),
        "epsilon": _get(parser, "prior", "epsilon", float, priors.DEFAULT_QUERY_EPSILON, errors),
    }
    if prior["kind"] not in pipeline.PRIOR_KINDS:
        errors.append(f"[prior] kind = {prior['kind']!r}")

    eval_opts = {
        "topk": _get(parser, "eval", "topk", int, 5, errors),
        "start_decade": _get(parser, "eval", "start_decade", int, None, errors),
        "end_decade": _get(parser, "eval", "end_decade", int, None, errors),
        "synthetic_seed": _get(parser, "eval", "synthetic_seed", int, None, errors),
    }

    if errors:
        raise ConfigError("bad config fields: " + "; ".join(errors))

    return ExperimentConfig(
        paths=paths,
        filter_cfg=filter_cfg,
        tag_set=TAG_SETS[tag_name],
        train_cfg_fields=train_fields,
        model=model,
        prior=prior,
        eval_opts=eval_opts,
        seed=seed,
        config_hash=hashlib.sha256(raw).hexdigest()[:12],
        output_dir=out_dir,
    )


def _provenance(cfg, command):
    return [f"slangchoice {command} config={cfg.config_hash} seed={cfg.seed}"]


def _artifact(cfg, name):
    return cfg.output_dir / name


def _require(path):
    if not Path(path).exists():
        raise DataError(f"missing artifact: {path}")
    return Path(path)


def _input_path(cfg, key):
    if key not in cfg.paths:
        raise ConfigError(f"[paths] {key} is required for this command")
    return _require(cfg.paths[key])


def _pipeline_config(cfg):
    return pipeline.PipelineConfig(
        likelihood=cfg.model["likelihood"],
        use_cf=cfg.model["use_cf"],
        use_encoder=cfg.model["use_encoder"],
        prior=cfg.prior["kind"],
        prior_only=cfg.model["prior_only"],
        epsilon=cfg.prior["epsilon"],
        neighborhood_k=cfg.model["neighborhood_k"],
        train=TrainConfig(**cfg.train_cfg_fields),
    )


def _load_built_lexicon(cfg):
    path = _require(_artifact(cfg, "lexicon.jsonl"))
    return load_lexicon(path, cfg=cfg.filter_cfg, tag_set=cfg.tag_set)


def _load_store(cfg, lex):
    path = _input_path(cfg, "word_vectors")
    sense_ids = [s.id for s in lex.all_senses()]
    store = load_vector_file(path, vocabulary=lex.vocabulary, sense_ids=sense_ids)
    failures = pool_missing_sense_vectors(lex, store)
    if failures:
        raise DataError(
            f"{len(failures)} definitions have no vector and cannot be pooled "
            f"(first: {failures[0]})"
        )
    return store


def _load_split(cfg):
    parts = {}
    for name in ("train", "validation", "test"):
        path = _require(_artifact(cfg, f"split_{name}.txt"))
        with open(path, encoding="utf-8") as f:
            parts[name] = [ln.strip() for ln in f
                           if ln.strip() and not ln.startswith("#")]
    return DataSplit(train=parts["train"], validation=parts["validation"],
                     test=parts["test"], seed=cfg.seed)


def _load_side_tables(cfg):
    lm_table = None
    if "lcp" in cfg.prior["kind"]:
        lm_table = priors.load_lm_scores(_input_path(cfg, "lm_scores"))
    pos_counts = None
    if "pos_counts" in cfg.paths and Path(cfg.paths["pos_counts"]).exists():
        pos_counts = load_pos_counts(cfg.paths["pos_counts"])
    return lm_table, pos_counts


def _write_ids(cfg, name, ids, command):
    path = _artifact(cfg, name)
    with open(path, "w", encoding="utf-8") as f:
        for line in _provenance(cfg, command):
            f.write(f"# {line}\n")
        for sid in ids:
            f.write(sid + "\n")


def _write_csv(cfg, name, command, fieldnames, rows):
    path = _artifact(cfg, name)
    with open(path, "w", encoding="utf-8", newline="") as f:
        for line in _provenance(cfg, command):
            f.write(f"# {line}\n")
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def cmd_ingest(cfg, args):
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    if args.synthetic:
        seed = cfg.eval_opts["synthetic_seed"]
        data = synthetic.generate(seed=cfg.seed if seed is None else seed,
                                  pos_shift=args.synthetic_pos_shift)
        data.write_files(cfg.output_dir, header_lines=_provenance(cfg, "ingest"))
        slang_records = data.slang_records
        conventional_records = data.conventional_records
    else:
        slang_records = load_records(_input_path(cfg, "slang"))
        conventional_records = load_records(_input_path(cfg, "conventional")) \
            if "conventional" in cfg.paths else ()
    lex = ingest(slang_records, conventional_records,
                 cfg=cfg.filter_cfg, tag_set=cfg.tag_set)
    save_lexicon(lex, _artifact(cfg, "lexicon.jsonl"),
                 header_lines=_provenance(cfg, "ingest"))
    print(f"ingest: {len(lex.slang)} slang senses, "
          f"{sum(len(v) for v in lex.conventional.values())} conventional senses, "
          f"{len(lex.vocabulary)} words -> {_artifact(cfg, 'lexicon.jsonl')}")
    return 0


def cmd_split(cfg, args):
    lex = _load_built_lexicon(cfg)
    result = make_split(lex, cfg.seed)
    for name in ("train", "validation", "test"):
        _write_ids(cfg, f"split_{name}.txt", getattr(result, name), "split")
    print(f"split: train={len(result.train)} validation={len(result.validation)} "
          f"test={len(result.test)} seed={cfg.seed}")
    return 0


def cmd_train(cfg, args):
    lex = _load_built_lexicon(cfg)
    store = _load_store(cfg, lex)
    sp = _load_split(cfg)
    pcfg = _pipeline_config(cfg)
    nbh = build_neighborhoods(store, lex.vocabulary, pcfg.neighborhood_k)
    params = contrastive.train(lex, sp, store, nbh, pcfg.train)
    contrastive.save_encoder(params, _artifact(cfg, "encoder.txt"),
                             header_lines=_provenance(cfg, "train"))
    best = min(v for _, v in params.train_log)
    print(f"train: {len(params.train_log) - 1} epochs, best validation loss "
          f"{best:.6f} -> {_artifact(cfg, 'encoder.txt')}")
    return 0


def _assemble_model(cfg, lex, store, sp):
    """Rebuild a FittedModel from artifacts without refitting anything."""
    pcfg = _pipeline_config(cfg)
    nbh = build_neighborhoods(store, lex.vocabulary, pcfg.neighborhood_k)
    lm_table, pos_counts = _load_side_tables(cfg)

    transition = None
    pos_dists = None
    if "ssp" in pcfg.prior:
        transition = priors.load_transition_matrix(
            _require(_artifact(cfg, "transition.txt")))
        pos_dists = pipeline.build_pos_dists(lex, pos_counts)
    prior_fn = pipeline.make_prior_fn(
        pcfg.prior, lex, transition=transition, pos_dists=pos_dists,
        lm_table=lm_table, epsilon=pcfg.epsilon)

    if pcfg.prior_only:
        space = choice.prepare_sense_space(lex, store, None)
        return pipeline.FittedModel(cfg=choice.ChoiceModelConfig(), space=space,
                                    nbh=nbh, prior_fn=prior_fn,
                                    transition=transition, prior_only=True)

    fitted_cfg, used_encoder = choice.load_kernels(
        _require(_artifact(cfg, "kernels.txt")))
    if used_encoder != pcfg.use_encoder:
        raise DataError(
            "kernels.txt was fitted with use_encoder="
            f"{str(used_encoder).lower()} but the config says "
            f"{str(pcfg.use_encoder).lower()}; rerun fit"
        )
    encoder = None
    if pcfg.use_encoder:
        encoder = contrastive.load_encoder(_require(_artifact(cfg, "encoder.txt")))
    model_cfg = choice.ChoiceModelConfig(
        likelihood=fitted_cfg.likelihood, use_cf=fitted_cfg.use_cf,
        kernels=fitted_cfg.kernels, encoder=encoder)
    space = choice.prepare_sense_space(lex, store, encoder)
    mixer = choice.CfMixer(space.vocabulary, nbh, store) if model_cfg.use_cf else None
    return pipeline.FittedModel(cfg=model_cfg, space=space, nbh=nbh,
                                prior_fn=prior_fn, transition=transition,
                                _mixer=mixer)


def cmd_fit(cfg, args):
    lex = _load_built_lexicon(cfg)
    store = _load_store(cfg, lex)
    sp = _load_split(cfg)
    pcfg = _pipeline_config(cfg)
    if pcfg.prior_only:
        if "ssp" in pcfg.prior:
            transition = priors.estimate_transition_matrix(sp.train, lex)
            priors.save_transition_matrix(
                transition, _artifact(cfg, "transition.txt"),
                header_lines=_provenance(cfg, "fit"))
            print(f"fit: prior-only model; transition matrix "
                  f"-> {_artifact(cfg, 'transition.txt')}")
        else:
            print("fit: prior-only model needs no kernels; nothing to do")
        return 0
    lm_table, pos_counts = _load_side_tables(cfg)
    encoder = None
    if pcfg.use_encoder:
        encoder = contrastive.load_encoder(_require(_artifact(cfg, "encoder.txt")))
    nbh = build_neighborhoods(store, lex.vocabulary, pcfg.neighborhood_k)

    transition = None
    pos_dists = None
    if "ssp" in pcfg.prior:
        transition = priors.estimate_transition_matrix(sp.train, lex)
        priors.save_transition_matrix(transition, _artifact(cfg, "transition.txt"),
                                      header_lines=_provenance(cfg, "fit"))
        pos_dists = pipeline.build_pos_dists(lex, pos_counts)
    prior_fn = pipeline.make_prior_fn(
        pcfg.prior, lex, transition=transition, pos_dists=pos_dists,
        lm_table=lm_table, epsilon=pcfg.epsilon)

    fit_cfg = choice.ChoiceModelConfig(
        likelihood=pcfg.likelihood, use_cf=pcfg.use_cf, encoder=encoder)
    kernels = choice.fit_kernels(sp.train, lex, store, nbh, prior_fn, fit_cfg)
    out_cfg = choice.ChoiceModelConfig(
        likelihood=pcfg.likelihood, use_cf=pcfg.use_cf, kernels=kernels,
        encoder=encoder)
    choice.save_kernels(out_cfg, _artifact(cfg, "kernels.txt"),
                        header_lines=_provenance(cfg, "fit"))
    print(f"fit: h_s={kernels.h_s:.6g} h_cf={kernels.h_cf:.6g} "
          f"-> {_artifact(cfg, 'kernels.txt')}")
    return 0


def cmd_predict(cfg, args):
    lex = _load_built_lexicon(cfg)
    store = _load_store(cfg, lex)
    sp = _load_split(cfg)
    model = _assemble_model(cfg, lex, store, sp)
    k = args.topk or cfg.eval_opts["topk"]
    path = _artifact(cfg, "posteriors.tsv")
    with open(path, "w", encoding="utf-8") as f:
        for line in _provenance(cfg, "predict"):
            f.write(f"# {line}\n")
        f.write("sense_id\tword\tprobability\trank\n")
        for sid in sp.test:
            result = model.rank(lex.sense(sid), store, k=k)
            for rank, (word, prob) in enumerate(result.topk, start=1):
                f.write(f"{sid}\t{word}\t{prob!r}\t{rank}\n")
    print(f"predict: top-{k} posteriors for {len(sp.test)} test senses -> {path}")
    return 0


def cmd_eval(cfg, args):
    lex = _load_built_lexicon(cfg)
    store = _load_store(cfg, lex)
    sp = _load_split(cfg)
    model = _assemble_model(cfg, lex, store, sp)
    report = pipeline.evaluate(model, lex, store, sp.test,
                               label=cfg.model["likelihood"],
                               k=cfg.eval_opts["topk"])
    _write_csv(cfg, "report.csv", "eval", ["label", "auc", "n"],
               [{"label": report.label, "auc": repr(report.auc), "n": report.n}])
    _write_csv(cfg, "roc.csv", "eval", ["fpr", "tpr"],
               [{"fpr": repr(x), "tpr": repr(y)} for x, y in report.roc])
    print(f"eval: AUC {report.auc:.2f} over {report.n} test senses "
          f"-> {_artifact(cfg, 'report.csv')}")
    return 0


def _analyze_fewshot(cfg, lex, store, sp, model):
    few, zero = evaluation.partition_few_zero(sp, lex)
    rows = []
    v = len(lex.vocabulary)
    for label, ids in (("few-shot", few), ("zero-shot", zero)):
        if ids:
            ranks = pipeline.evaluate_ranks(model, lex, store, ids)
            rows.append({"stratum": label, "auc": repr(evaluation.auc(ranks, v)),
                         "n": len(ids)})
        else:
            rows.append({"stratum": label, "auc": "", "n": 0})
    return _write_csv(cfg, "analyze_fewshot.csv", "analyze",
                      ["stratum", "auc", "n"], rows)


def _analyze_synonymy(cfg, lex, store, sp, model):
    train_senses = [lex.sense(i) for i in sp.train]
    v = len(lex.vocabulary)
    binned: dict[str, list] = {}
    for sid in sp.test:
        degree = evaluation.synonymy_degree(lex.sense(sid), train_senses)
        binned.setdefault(evaluation.synonymy_bin(degree), []).append(sid)
    rows = []
    for label in sorted(binned):
        ranks = pipeline.evaluate_ranks(model, lex, store, binned[label])
        rows.append({"synonymy_bin": label,
                     "auc": repr(evaluation.auc(ranks, v)),
                     "n": len(binned[label])})
    return _write_csv(cfg, "analyze_synonymy.csv", "analyze",
                      ["synonymy_bin", "auc", "n"], rows)


def _analyze_distance(cfg, lex, store, sp, model):
    encoder = model.cfg.encoder
    rows = []
    for subset, ids in (("train", sp.train), ("test", sp.test)):
        for label, enc in (("baseline", None), ("encoded", encoder)):
            if label == "encoded" and encoder is None:
                continue
            report = evaluation.semantic_distance_report(ids, lex, store, enc)
            rows.append({"subset": subset, "space": label,
                         "mean_normalized_rank": repr(report.mean),
                         "stderr": repr(report.stderr), "n": len(ids)})
    return _write_csv(cfg, "analyze_distance.csv", "analyze",
                      ["subset", "space", "mean_normalized_rank", "stderr", "n"], rows)


def _analyze_historical(cfg, lex, store):
    start = cfg.eval_opts["start_decade"]
    end = cfg.eval_opts["end_decade"]
    if start is None or end is None:
        raise ConfigError("[eval] start_decade and end_decade are required "
                          "for historical analysis")
    lm_table, pos_counts = _load_side_tables(cfg)
    reports = pipeline.historical_eval(lex, store, start, end, _pipeline_config(cfg),
                                       lm_table=lm_table, pos_counts=pos_counts)
    rows = [{"decade": r.label, "auc": "" if r.error else repr(r.auc),
             "n": r.n, "error": r.error or ""} for r in reports]
    return _write_csv(cfg, "analyze_historical.csv", "analyze",
                      ["decade", "auc", "n", "error"], rows)


def _analyze_examples(cfg, lex, store, sp, model):
    k = cfg.eval_opts["topk"]
    models = [(cfg.model["likelihood"], lambda s, kk: model.rank(s, store, k=kk))]
    rows = evaluation.prediction_report(sp.test, lex, models, k=k)
    name = cfg.model["likelihood"]
    return _write_csv(cfg, "analyze_examples.csv", "analyze",
                      ["sense_id", "true_word", "definition",
                       f"{name}_top{k}", f"{name}_rank"], rows)


def cmd_analyze(cfg, args):
    lex = _load_built_lexicon(cfg)
    store = _load_store(cfg, lex)
    if args.what == "historical":
        path = _analyze_historical(cfg, lex, store)
    else:
        sp = _load_split(cfg)
        model = _assemble_model(cfg, lex, store, sp)
        path = {
            "fewshot": _analyze_fewshot,
            "synonymy": _analyze_synonymy,
            "distance": _analyze_distance,
            "examples": _analyze_examples,
        }[args.what](cfg, lex, store, sp, model)
    print(f"analyze {args.what}: -> {path}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="slangchoice",
                     description="Rank vocabulary words for novel slang senses.")
    parser.add_argument("--config", required=True, help="experiment config (INI)")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="filter raw records into a lexicon")
    p_ingest.add_argument("--synthetic", action="store_true",
                          help="generate the built-in toy dataset instead of reading inputs")
    p_ingest.add_argument("--synthetic-pos-shift", action="store_true",
                          help="toy variant with a deterministic noun/verb shift")
    sub.add_parser("split", help="deterministic train/validation/test split")
    sub.add_parser("train", help="train the contrastive encoder")
    sub.add_parser("fit", help="fit kernel widths")
    p_predict = sub.add_parser("predict", help="write ranked predictions")
    p_predict.add_argument("--topk", type=int, default=None)
    sub.add_parser("eval", help="AUC/ROC on the test split")
    p_an = sub.add_parser("analyze", help="reporting suites")
    p_an.add_argument("what", choices=["fewshot", "synonymy", "distance",
                                       "historical", "examples"])
    return parser


COMMANDS = {
    "ingest": cmd_ingest,
    "split": cmd_split,
    "train": cmd_train,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args)
    except SlangChoiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
