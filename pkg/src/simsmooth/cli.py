"""Command-line front-end: ingest, neighbors, prob, evaluate, synth.

All randomness flows from one ``--seed`` through labeled substreams
(split, folds, RAND weights, synthetic sampling), so toggling one method
never perturbs another's draws.  Exit codes: 0 success, 1 internal
error, 2 I/O or parse error, 3 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

from . import errors
from .basemodel import KatzModel, MleModel
from .corpus import (
    SplitSpec,
    load_pairs,
    make_folds,
    save_snapshot,
    split_unseen_test,
    strip_singletons,
)
from .errors import ConfigError
from .estimator import SimEstimator
from .evaluation import BASE_MODELS, METHODS, evaluate_grid
from .report import paired_section, render_json, render_tsv
from .similarity import MEASURES, Neighborhood, ProfileBuilder, WeightConfig
from .synthetic import BlockSpec, demo_corpus

DEFAULT_BETA_GRID = "0.5:30:0.5"


@dataclass
class RunConfig:
    """Everything an ``evaluate`` run needs; embedded in its reports."""

    input: str
    out: str = "reports"
    train_fraction: float = 0.8
    folds: int = 5
    seed: int = 0
    models: tuple = ("MLE-1", "MLE-o1")
    methods: tuple = ("RAND", "CONFUSION", "L1", "AVG")
    beta_grid: str = DEFAULT_BETA_GRID
    neighborhood: str = "all"
    gamma: float = 0.0
    gt_cutoff: int = 5
    jobs: int = 1
    format: str = "tsv"
    figures: bool = True

    def validate(self):
        if not os.path.exists(self.input):
            raise FileNotFoundError(self.input)
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train fraction must lie in (0, 1)")
        if self.folds < 2:
            raise ConfigError("need at least 2 folds")
        for m in self.models:
            if m not in BASE_MODELS:
                raise ConfigError("unknown base model %r" % m)
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError("unknown method %r" % m)
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma must lie in [0, 1]")
        if self.format not in ("tsv", "json"):
            raise ConfigError("format must be tsv or json")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        Neighborhood.parse(self.neighborhood)
        if any(m in ("KL", "AVG", "L1") for m in self.methods):
            if not parse_beta_grid(self.beta_grid):
                raise ConfigError("tunable methods need a non-empty beta grid")

    def to_dict(self):
        d = asdict(self)
        d["models"] = list(self.models)
        d["methods"] = list(self.methods)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        data = dict(data)
        for key in ("models", "methods"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def parse_beta_grid(spec):
    """Grid syntax: ``lo:hi:step`` or a comma list; sorted and deduplicated."""
    spec = spec.strip()
    if not spec:
        return ()
    try:
        if ":" in spec:
            lo, hi, step = (float(x) for x in spec.split(":"))
            if step <= 0 or hi < lo:
                raise ValueError
            values = []
            v = lo
            while v <= hi + 1e-9:
                values.append(round(v, 10))
                v += step
        else:
            values = [float(x) for x in spec.split(",")]
    except ValueError:
        raise ConfigError("bad beta grid spec: %r" % spec) from None
    return tuple(sorted(set(values)))


def _split_list(text, canonical):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        match = next((c for c in canonical if c.upper() == part.upper()), None)
        if match is None:
            raise ConfigError("unknown name %r" % part)
        if match not in out:
            out.append(match)
    if not out:
        raise ConfigError("empty name list %r" % text)
    return tuple(out)


class _Parser(argparse.ArgumentParser):
    # route usage errors through the exit-code mapping instead of exiting(2)
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="simsmooth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse a pair TSV and print stats")
    p_ingest.add_argument("--input", required=True)
    p_ingest.add_argument("--strip-singletons", action="store_true")
    p_ingest.add_argument("--out", help="write a corpus snapshot here")

    p_nb = sub.add_parser("neighbors", help="dump a word's similarity profile")
    p_nb.add_argument("--input", required=True)
    p_nb.add_argument("--word", required=True)
    p_nb.add_argument("--measures", default="AVG")
    p_nb.add_argument("--top", type=int, default=10)
    p_nb.add_argument("--beta", type=float, default=1.0)
    p_nb.add_argument("--neighborhood", default="all")
    p_nb.add_argument("--gt-cutoff", type=int, default=5)
    p_nb.add_argument("--seed", type=int, default=0)

    p_prob = sub.add_parser("prob", help="query one pair probability")
    p_prob.add_argument("--input", required=True)
    p_prob.add_argument("--noun", required=True)
    p_prob.add_argument("--verb", required=True)
    p_prob.add_argument("--measure", default="AVG")
    p_prob.add_argument("--beta", type=float, default=4.0)
    p_prob.add_argument("--gamma", type=float, default=0.0)
    p_prob.add_argument("--neighborhood", default="all")
    p_prob.add_argument("--gt-cutoff", type=int, default=5)
    p_prob.add_argument("--seed", type=int, default=0)
    p_prob.add_argument("--summary", action="store_true",
                        help="also print back-off model diagnostics as JSON")

    p_eval = sub.add_parser("evaluate", help="run the full method grid")
    p_eval.add_argument("--config", help="JSON config file; flags override it")
    p_eval.add_argument("--input")
    p_eval.add_argument("--out")
    p_eval.add_argument("--train-fraction", type=float, dest="train_fraction")
    p_eval.add_argument("--folds", type=int)
    p_eval.add_argument("--seed", type=int)
    p_eval.add_argument("--models")
    p_eval.add_argument("--methods")
    p_eval.add_argument("--beta-grid", dest="beta_grid")
    p_eval.add_argument("--neighborhood")
    p_eval.add_argument("--gamma", type=float)
    p_eval.add_argument("--gt-cutoff", type=int, dest="gt_cutoff")
    p_eval.add_argument("--jobs", type=int)
    p_eval.add_argument("--format", choices=("tsv", "json"))
    p_eval.add_argument("--figures", dest="figures", action="store_true", default=None)
    p_eval.add_argument("--no-figures", dest="figures", action="store_false")

    p_synth = sub.add_parser("synth", help="write a synthetic demo corpus")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--classes", type=int, default=4)
    p_synth.add_argument("--nouns-per-class", type=int, default=15)
    p_synth.add_argument("--verbs-per-class", type=int, default=8)
    p_synth.add_argument("--boost", type=float, default=10.0)
    p_synth.add_argument("--size", type=int, default=12000)
    p_synth.add_argument("--noun-zipf", type=float, default=0.8)
    return parser


def cmd_ingest(args):
    corpus = load_pairs(args.input)
    singletons = corpus.singleton_count()
    print("nouns\t%d" % len(corpus.v1))
    print("verbs\t%d" % len(corpus.v2))
    print("pairs\t%d" % corpus.total_pairs)
    print("pair_types\t%d" % corpus.type_count())
    print("singletons\t%d" % singletons)
    if args.strip_singletons:
        corpus = strip_singletons(corpus)
        print("pairs_no_singletons\t%d" % corpus.total_pairs)
    if args.out:
        save_snapshot(corpus, args.out)
        print("snapshot\t%s" % args.out)
    return 0


def _builder_for(measure, corpus, mle, katz, neighborhood, beta, seed):
    config = WeightConfig(
        measure=measure, beta=beta, neighborhood=neighborhood, seed=seed
    )
    if measure == "KL" and katz is None:
        katz = KatzModel(corpus, 5)
    return ProfileBuilder(mle, config, katz=katz, mle=mle)


def cmd_neighbors(args):
    corpus = load_pairs(args.input)
    word_id = corpus.v1.id_of(args.word)
    measures = _split_list(args.measures, MEASURES)
    neighborhood = Neighborhood.parse(args.neighborhood)
    mle = MleModel(corpus)
    katz = KatzModel(corpus, args.gt_cutoff) if "KL" in measures else None
    print("measure\trank\tword\traw\tweight")
    for measure in measures:
        builder = _builder_for(
            measure, corpus, mle, katz, neighborhood, args.beta, args.seed
        )
        profile = builder.profile(word_id)
        for rank, nb in enumerate(profile.neighbors[: args.top], start=1):
            print(
                "%s\t%d\t%s\t%s\t%s"
                % (measure, rank, corpus.v1.word(nb.word_id), repr(nb.raw), repr(nb.weight))
            )
    return 0


def cmd_prob(args):
    corpus = load_pairs(args.input)
    noun = corpus.v1.id_of(args.noun)
    verb = corpus.v2.id_of(args.verb)
    mle = MleModel(corpus)
    katz = KatzModel(corpus, args.gt_cutoff)
    neighborhood = Neighborhood.parse(args.neighborhood)
    measure = _split_list(args.measure, MEASURES)[0]
    builder = _builder_for(
        measure, corpus, mle, katz, neighborhood, args.beta, args.seed
    )
    est = SimEstimator(mle, builder, gamma=args.gamma, katz=katz)
    value, branch = est.query(noun, verb)
    print("P(%s|%s) = %s\t[%s]" % (args.verb, args.noun, repr(value), branch))
    if args.summary:
        print(json.dumps(katz.summary(), sort_keys=True, indent=2))
    return 0


def _merge_config(args):
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            data = json.load(f)
    overrides = {}
    for name in (
        "input",
        "out",
        "train_fraction",
        "folds",
        "seed",
        "beta_grid",
        "neighborhood",
        "gamma",
        "gt_cutoff",
        "jobs",
        "format",
        "figures",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.models is not None:
        overrides["models"] = _split_list(args.models, BASE_MODELS)
    if args.methods is not None:
        overrides["methods"] = _split_list(args.methods, METHODS)
    data.update(overrides)
    if "input" not in data:
        raise ConfigError("evaluate needs --input (or an input in the config file)")
    return RunConfig.from_dict(data)


def cmd_evaluate(args):
    config = _merge_config(args)
    config.validate()
    corpus = load_pairs(config.input)
    spec = SplitSpec(
        train_fraction=config.train_fraction, fold_count=config.folds, seed=config.seed
    )
    train, test = split_unseen_test(corpus, spec)
    folds = make_folds(test, config.folds, config.seed)
    reports, meta = evaluate_grid(
        train,
        folds,
        base_models=config.models,
        methods=config.methods,
        beta_grid=parse_beta_grid(config.beta_grid),
        gt_cutoff=config.gt_cutoff,
        seed=config.seed,
        neighborhood=Neighborhood.parse(config.neighborhood),
        gamma=config.gamma,
        jobs=config.jobs,
    )
    meta["train_pairs"] = train.total_pairs
    meta["unseen_test_occurrences"] = len(test)
    config_dict = config.to_dict()
    paired = paired_section(reports)
    tsv_text = render_tsv(reports, config_dict, meta)
    json_text = render_json(reports, config_dict, meta, paired)

    os.makedirs(config.out, exist_ok=True)
    tsv_path = os.path.join(config.out, "report.tsv")
    json_path = os.path.join(config.out, "report.json")
    with open(tsv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(tsv_text)
    with open(json_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json_text)
    written = [tsv_path, json_path]
    if config.figures:
        from .figures import render_error_bars

        written.extend(render_error_bars(reports, config.out))
    sys.stdout.write(tsv_text if config.format == "tsv" else json_text)
    for path in written:
        print("wrote\t%s" % path, file=sys.stderr)
    return 0


def cmd_synth(args):
    spec = BlockSpec(
        noun_classes=args.classes,
        nouns_per_class=args.nouns_per_class,
        verb_classes=args.classes,
        verbs_per_class=args.verbs_per_class,
        within_boost=args.boost,
        train_size=args.size,
        noun_zipf=args.noun_zipf,
    )
    corpus = demo_corpus(spec, args.seed)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for (n, v), c in sorted(corpus.pairs()):
            f.write("%s\t%s\t%d\n" % (corpus.v1.word(n), corpus.v2.word(v), c))
    print("nouns\t%d" % len(corpus.v1))
    print("verbs\t%d" % len(corpus.v2))
    print("pairs\t%d" % corpus.total_pairs)
    print("wrote\t%s" % args.out)
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "neighbors": cmd_neighbors,
    "prob": cmd_prob,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (errors.ParseError, FileNotFoundError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ConfigError, errors.UnknownWordError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3
    except errors.Error as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
