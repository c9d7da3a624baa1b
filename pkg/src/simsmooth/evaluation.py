"""Pseudo-word disambiguation: trials, error rate, cross-validated method grid.

Each trial presents a noun and the two verbs of a pseudo-word; the scorer
under test must say which verb the noun actually occurred with.  Scores
are compared strictly, exact equality is a tie, and the error rate is
(incorrect + ties/2) / N.  Tunable measures pick their exponent per fold
by grid search on the remaining folds.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .basemodel import KatzModel, MleModel
from .corpus import strip_singletons
from .errors import ConfigError, TrialError
from .similarity import (
    AFFINITY_MEASURES,
    Neighborhood,
    ProfileBuilder,
    TUNABLE_MEASURES,
    WeightConfig,
    _weights_vec,
)

METHODS = ("MLE", "KATZ", "RAND", "KL", "AVG", "L1", "CONFUSION")
BASE_MODELS = ("MLE-1", "MLE-o1", "BO-1", "BO-o1")

CORRECT = "CORRECT"
INCORRECT = "INCORRECT"
TIE = "TIE"


@dataclass(frozen=True)
class PseudoWordMap:
    """Frequency-matched verb pairs; every covered verb has one partner."""

    pairs: tuple
    dropped: int | None

    @cached_property
    def lookup(self):
        table = {}
        for a, b in self.pairs:
            table[a] = b
            table[b] = a
        return table

    def partner_of(self, verb):
        try:
            return self.lookup[verb]
        except KeyError:
            raise ConfigError(
                "verb id %d is not covered by any pseudo-word" % verb
            ) from None

    def covered(self):
        return frozenset(self.lookup)


def build_pseudowords(col_totals):
    """Pair verbs of adjacent frequency rank into pseudo-words.

    Verbs are sorted by descending count (ties by ascending id) and
    paired (1st, 2nd), (3rd, 4th), ...; an odd leftover verb is dropped
    from testing and recorded.  Deterministic.
    """
    verbs = sorted(col_totals, key=lambda v: (-col_totals[v], v))
    if len(verbs) < 2:
        raise ConfigError("need at least 2 verbs to build pseudo-words")
    dropped = verbs[-1] if len(verbs) % 2 else None
    pairs = tuple(
        (verbs[i], verbs[i + 1]) for i in range(0, len(verbs) - 1, 2)
    )
    return PseudoWordMap(pairs=pairs, dropped=dropped)


@dataclass(frozen=True)
class TrialOutcome:
    noun: int
    correct_verb: int
    decoy_verb: int
    decision: str
    scores: tuple


def run_trial(noun, correct_verb, pwmap, scorer):
    """Score both verbs of the pseudo-word and decide by strict comparison."""
    decoy = pwmap.partner_of(correct_verb)
    try:
        score_correct = scorer(noun, correct_verb)
        score_decoy = scorer(noun, decoy)
    except Exception as exc:
        raise TrialError(
            "scoring trial (noun=%d, verbs=%d/%d) failed: %s"
            % (noun, correct_verb, decoy, exc)
        ) from exc
    if score_correct > score_decoy:
        decision = CORRECT
    elif score_correct < score_decoy:
        decision = INCORRECT
    else:
        decision = TIE
    return TrialOutcome(noun, correct_verb, decoy, decision, (score_correct, score_decoy))


def error_rate(outcomes):
    """(incorrect + ties/2) / N."""
    if not outcomes:
        raise ConfigError("cannot compute the error rate of zero trials")
    incorrect = sum(1 for o in outcomes if o.decision == INCORRECT)
    ties = sum(1 for o in outcomes if o.decision == TIE)
    return (incorrect + ties / 2) / len(outcomes)


@dataclass(frozen=True)
class FoldReport:
    fold: int
    method: str
    base_model: str
    beta: float | None
    error_rate: float
    n_trials: int
    incorrect: int
    ties: int


@dataclass(frozen=True)
class PairedDifference:
    """Per-fold error differences between two method runs on shared folds."""

    fold_diffs: tuple
    mean: float
    t_stat: float | None
    zero_variance: bool


def paired_difference(reports_a, reports_b):
    """Fold-wise error differences (a - b) with the paired t statistic.

    Requires reports over the same folds and base model.  With zero
    variance across folds the t statistic is undefined and reported as
    None with ``zero_variance`` set.
    """
    if len(reports_a) != len(reports_b):
        raise ConfigError("fold report lists differ in length")
    for ra, rb in zip(reports_a, reports_b):
        if ra.fold != rb.fold or ra.base_model != rb.base_model:
            raise ConfigError("paired reports must share folds and base model")
    diffs = tuple(ra.error_rate - rb.error_rate for ra, rb in zip(reports_a, reports_b))
    k = len(diffs)
    mean = sum(diffs) / k
    var = sum((d - mean) ** 2 for d in diffs) / (k - 1) if k > 1 else 0.0
    if var == 0.0:
        return PairedDifference(diffs, mean, None, True)
    t = mean / (var**0.5 / k**0.5)
    return PairedDifference(diffs, mean, float(t), False)


class BaseBundle:
    """One cell of the base-model grid: a corpus variant plus its models.

    ``rows`` supplies the conditional rows P(. | .) that the similarity
    measures and the combination scorer read; it is the MLE model for
    MLE-* names and the Katz model for BO-* names.
    """

    def __init__(self, name, corpus, gt_cutoff, need_katz):
        self.name = name
        self.corpus = corpus
        self.mle = MleModel(corpus)
        self.katz = (
            KatzModel(corpus, gt_cutoff) if (need_katz or name.startswith("BO")) else None
        )
        self.rows = self.katz if name.startswith("BO") else self.mle


def build_bundles(train, names, gt_cutoff, methods=()):
    """Base-model bundles for the requested grid names, in canonical order."""
    names = list(names)
    for name in names:
        if name not in BASE_MODELS:
            raise ConfigError("unknown base model %r" % name)
    need_katz = bool({"KATZ", "KL"} & set(methods))
    stripped = None
    bundles = []
    for name in BASE_MODELS:
        if name not in names:
            continue
        if name.endswith("-o1"):
            if stripped is None:
                stripped = strip_singletons(train)
            corpus = stripped
        else:
            corpus = train
        bundles.append(BaseBundle(name, corpus, gt_cutoff, need_katz))
    return bundles


class _MleScorer:
    def __init__(self, mle):
        self.mle = mle

    def score(self, noun, verb, beta=None):
        return self.mle.prob(noun, verb)


class _KatzBackoffScorer:
    """Back-off baseline: alpha(noun) * P(verb), the redistribution branch."""

    def __init__(self, katz):
        self.katz = katz

    def score(self, noun, verb, beta=None):
        return self.katz.alpha(noun) * self.katz.unigram_verb(verb)


class _CombinationScorer:
    """Weighted-combination scorer with cached raw vectors and verb columns.

    Scores are the plain weighted sums (no weight normalizer): both verbs
    of a trial share the noun, so the normalizer cancels from the
    comparison.  With ``gamma`` > 0 the normalized blend with the verb
    unigram is used instead, since the shortcut is no longer sound.
    """

    def __init__(self, builder, rows_model, gamma=0.0):
        self.builder = builder
        self.rows = rows_model
        self.measure = builder.config.measure
        self.gamma = gamma
        self._pvecs = {}

    def _pvec(self, verb):
        vec = self._pvecs.get(verb)
        if vec is None:
            vec = np.array(
                [self.rows.prob(int(c), verb) for c in self.builder.candidates]
            )
            self._pvecs[verb] = vec
        return vec

    def score(self, noun, verb, beta=None):
        idx, raws = self.builder.selection(noun)
        weights = _weights_vec(self.measure, raws[idx], beta)
        value = float(np.dot(weights, self._pvec(verb)[idx]))
        if self.gamma > 0.0:
            total = float(weights.sum())
            if total <= 0.0:
                return self.gamma * self.rows.unigram_verb(verb)
            return (
                self.gamma * self.rows.unigram_verb(verb)
                + (1.0 - self.gamma) * value / total
            )
        return value

    def grid_scores(self, noun, verb, betas):
        """Scores at every exponent in ``betas`` at once."""
        idx, raws = self.builder.selection(noun)
        selected = raws[idx]
        if self.measure in ("KL", "AVG"):
            weights = 10.0 ** (-np.outer(betas, selected))
        elif self.measure == "L1":
            weights = np.clip(2.0 - selected, 0.0, None) ** betas[:, None]
        else:
            weights = np.broadcast_to(selected, (len(betas), selected.size))
        values = weights @ self._pvec(verb)[idx]
        if self.gamma > 0.0:
            totals = weights.sum(axis=1)
            unigram = self.gamma * self.rows.unigram_verb(verb)
            safe = totals > 0.0
            out = np.full(len(betas), unigram)
            out[safe] += (1.0 - self.gamma) * values[safe] / totals[safe]
            return out
        return values


def make_scorer(bundle, method, *, seed=0, neighborhood=None, gamma=0.0):
    """Scorer for one (base model, method) grid cell."""
    if method == "MLE":
        return _MleScorer(MleModel(bundle.corpus))
    if method == "KATZ":
        if bundle.katz is None:
            raise ConfigError("method KATZ needs back-off tables in the bundle")
        return _KatzBackoffScorer(bundle.katz)
    if method not in METHODS:
        raise ConfigError("unknown method %r" % method)
    config = WeightConfig(
        measure=method,
        neighborhood=neighborhood if neighborhood is not None else Neighborhood(),
        seed=seed,
    )
    builder = ProfileBuilder(
        bundle.rows, config, katz=bundle.katz, mle=bundle.mle
    )
    return _CombinationScorer(builder, bundle.rows, gamma=gamma)


def _outcomes(scorer, trials, pwmap, beta):
    score = lambda n, v: scorer.score(n, v, beta)
    return [run_trial(noun, verb, pwmap, score) for noun, verb in trials]


def _fold_report(fold, method, base_model, beta, outcomes):
    incorrect = sum(1 for o in outcomes if o.decision == INCORRECT)
    ties = sum(1 for o in outcomes if o.decision == TIE)
    return FoldReport(
        fold=fold,
        method=method,
        base_model=base_model,
        beta=beta,
        error_rate=(incorrect + ties / 2) / len(outcomes),
        n_trials=len(outcomes),
        incorrect=incorrect,
        ties=ties,
    )


def _grid_errors(scorer, trials, pwmap, betas):
    """Error rate at every exponent over a trial list, vectorized."""
    incorrect = np.zeros(betas.size)
    ties = np.zeros(betas.size)
    for noun, verb in trials:
        decoy = pwmap.partner_of(verb)
        sc = scorer.grid_scores(noun, verb, betas)
        sd = scorer.grid_scores(noun, decoy, betas)
        incorrect += sc < sd
        ties += sc == sd
    return (incorrect + ties / 2) / len(trials)


def _cell_reports(bundle, method, folds, pwmap, beta_grid, seed, neighborhood, gamma):
    scorer = make_scorer(
        bundle, method, seed=seed, neighborhood=neighborhood, gamma=gamma
    )
    reports = []
    if method in TUNABLE_MEASURES:
        betas = np.asarray(beta_grid, dtype=np.float64)
        for i, fold in enumerate(folds):
            tuning = [occ for j, other in enumerate(folds) if j != i for occ in other]
            if not tuning:
                raise ConfigError("tuning set for fold %d is empty" % i)
            errors = _grid_errors(scorer, tuning, pwmap, betas)
            best = float(betas[int(np.argmin(errors))])  # first index: smallest beta
            outcomes = _outcomes(scorer, fold, pwmap, best)
            reports.append(_fold_report(i, method, bundle.name, best, outcomes))
    else:
        for i, fold in enumerate(folds):
            outcomes = _outcomes(scorer, fold, pwmap, None)
            reports.append(_fold_report(i, method, bundle.name, None, outcomes))
    return reports


def normalize_beta_grid(beta_grid):
    grid = sorted(set(float(b) for b in beta_grid))
    if any(b <= 0 for b in grid):
        raise ConfigError("beta grid values must be positive")
    return tuple(grid)


def cross_validate(
    folds,
    methods,
    bundles,
    beta_grid,
    pwmap,
    *,
    seed=0,
    neighborhood=None,
    gamma=0.0,
    jobs=1,
):
    """Run the (base model x method) grid with per-fold exponent tuning.

    For each tunable method and fold i, the exponent minimizing the error
    on the union of the other folds is selected (ties to the smallest
    value) and then evaluated on fold i.  Non-tunable methods are
    evaluated directly.  The report order and contents are deterministic
    and independent of ``jobs``.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ConfigError("unknown method %r" % m)
    if any(len(fold) == 0 for fold in folds):
        raise ConfigError("every fold must contain at least one trial")
    if any(m in TUNABLE_MEASURES for m in methods):
        if not beta_grid:
            raise ConfigError("tunable methods need a non-empty beta grid")
    beta_grid = normalize_beta_grid(beta_grid) if beta_grid else ()
    ordered_methods = [m for m in METHODS if m in methods]
    cells = [(bundle, method) for bundle in bundles for method in ordered_methods]
    results = {}
    if jobs > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(
                    _cell_reports,
                    bundle,
                    method,
                    folds,
                    pwmap,
                    beta_grid,
                    seed,
                    neighborhood,
                    gamma,
                ): (bundle.name, method)
                for bundle, method in cells
            }
            for future, key in futures.items():
                results[key] = future.result()
    else:
        for bundle, method in cells:
            results[(bundle.name, method)] = _cell_reports(
                bundle, method, folds, pwmap, beta_grid, seed, neighborhood, gamma
            )
    return [
        report
        for bundle, method in cells
        for report in results[(bundle.name, method)]
    ]


def evaluate_grid(
    train,
    folds,
    *,
    base_models=("MLE-1",),
    methods=("RAND", "L1", "AVG", "CONFUSION"),
    beta_grid=(),
    gt_cutoff=5,
    seed=0,
    neighborhood=None,
    gamma=0.0,
    jobs=1,
):
    """Full experiment over prebuilt folds: bundles, pseudo-words, grid.

    The pseudo-word map is built once from the unstripped training
    totals and shared by every base model, so verb pairings stay stable
    across the singleton ablation.  Fold occurrences whose verb is not
    covered (the odd dropped verb) are filtered out up front.

    Returns (reports, meta) where meta records the pseudo-word map, the
    dropped verb and how many occurrences were skipped.
    """
    totals = {j: train.col_total(j) for j in range(len(train.v2))}
    pwmap = build_pseudowords(totals)
    covered = pwmap.covered()
    filtered = [[occ for occ in fold if occ[1] in covered] for fold in folds]
    skipped = sum(len(a) - len(b) for a, b in zip(folds, filtered))
    bundles = build_bundles(train, base_models, gt_cutoff, methods)
    reports = cross_validate(
        filtered,
        methods,
        bundles,
        beta_grid,
        pwmap,
        seed=seed,
        neighborhood=neighborhood,
        gamma=gamma,
        jobs=jobs,
    )
    meta = {
        "pseudoword_pairs": len(pwmap.pairs),
        "dropped_verb": pwmap.dropped,
        "skipped_occurrences": skipped,
        "trials_per_fold": [len(f) for f in filtered],
    }
    return reports, meta
