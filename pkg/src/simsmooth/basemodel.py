"""Base bigram models: maximum likelihood and Good-Turing discounted back-off."""

from __future__ import annotations

import warnings
from collections import Counter

import numpy as np

from .errors import ConfigError, ModelError, UnknownWordError
from .similarity import SparseDistribution

FORWARD = "forward"
REVERSE = "reverse"


def good_turing_adjusted_count(count_of_counts, r):
    """Raw Good-Turing adjusted count r* = (r+1) * n_{r+1} / n_r."""
    n_r = count_of_counts.get(r, 0)
    n_r1 = count_of_counts.get(r + 1, 0)
    if n_r <= 0:
        raise ModelError("count-of-counts n_%d is zero" % r)
    return (r + 1) * n_r1 / n_r


class _CorpusModel:
    """Shared vocabulary checks and unigram estimates for both model kinds."""

    def __init__(self, corpus):
        self.corpus = corpus
        n = corpus.total_pairs
        if n == 0:
            raise ModelError("cannot build a model over an empty corpus")
        self._noun_unigrams = np.array(
            [corpus.row_total(i) / n for i in range(len(corpus.v1))]
        )
        self._verb_unigrams = np.array(
            [corpus.col_total(j) / n for j in range(len(corpus.v2))]
        )

    def _check_pair(self, w1, w2):
        if not 0 <= w1 < len(self.corpus.v1):
            raise UnknownWordError("noun id %r out of range" % (w1,))
        if not 0 <= w2 < len(self.corpus.v2):
            raise UnknownWordError("verb id %r out of range" % (w2,))

    def unigram_noun(self, w1):
        if not 0 <= w1 < len(self.corpus.v1):
            raise UnknownWordError("noun id %r out of range" % (w1,))
        return float(self._noun_unigrams[w1])

    def unigram_verb(self, w2):
        if not 0 <= w2 < len(self.corpus.v2):
            raise UnknownWordError("verb id %r out of range" % (w2,))
        return float(self._verb_unigrams[w2])

    def verb_unigrams(self, ids):
        return self._verb_unigrams[np.asarray(ids, dtype=np.int64)]


class MleModel(_CorpusModel):
    """Maximum-likelihood conditional estimates over a pair corpus.

    ``forward`` conditions on the noun (P(verb | noun)); ``reverse``
    conditions on the verb (P(noun | verb)).  ``prob`` always takes
    (noun id, verb id).  Unseen pairs get probability zero; conditioning
    on a zero-count word raises ModelError rather than falling back.
    """

    def __init__(self, corpus, direction=FORWARD):
        super().__init__(corpus)
        if direction not in (FORWARD, REVERSE):
            raise ConfigError("direction must be 'forward' or 'reverse'")
        self.direction = direction
        self._rows = {}
        self._cols = None

    @property
    def context_ids(self):
        """Ids with a defined conditional row, in increasing order."""
        if self.direction == FORWARD:
            side, vocab = self.corpus.row_total, self.corpus.v1
        else:
            side, vocab = self.corpus.col_total, self.corpus.v2
        return np.array([i for i in range(len(vocab)) if side(i) > 0], dtype=np.int64)

    def prob(self, w1, w2):
        self._check_pair(w1, w2)
        if self.direction == FORWARD:
            total = self.corpus.row_total(w1)
            if total == 0:
                raise ModelError("undefined conditional: c(noun %d) = 0" % w1)
        else:
            total = self.corpus.col_total(w2)
            if total == 0:
                raise ModelError("undefined conditional: c(verb %d) = 0" % w2)
        return self.corpus.count(w1, w2) / total

    def _col(self, w2):
        if self._cols is None:
            cols = {}
            for (i, j), c in self.corpus.pairs():
                cols.setdefault(j, {})[i] = c
            self._cols = cols
        return self._cols.get(w2, {})

    def row(self, context):
        """Conditional distribution given ``context`` as a SparseDistribution."""
        dist = self._rows.get(context)
        if dist is not None:
            return dist
        if self.direction == FORWARD:
            counts = self.corpus.row(context)
            total = self.corpus.row_total(context)
        else:
            counts = self._col(context)
            total = self.corpus.col_total(context)
        if total == 0:
            raise ModelError("undefined conditional row for id %d" % context)
        items = sorted(counts.items())
        dist = SparseDistribution(
            [wid for wid, _ in items], [c / total for _, c in items]
        )
        self._rows[context] = dist
        return dist


class KatzModel(_CorpusModel):
    """Good-Turing discounted bigram model with unigram redistribution.

    Pair counts at or below the cutoff are discounted with the standard
    normalization that leaves higher counts untouched; the reserved row
    mass backs off to the verb unigram distribution scaled by a per-row
    factor alpha.  The effective cutoff is the largest k not above the
    requested one for which n_1..n_{k+1} are all positive,
    (k+1)*n_{k+1}/n_1 < 1, and every discount coefficient lies in (0, 1];
    a lowered cutoff is reported as a warning.  (A cutoff of 1 is always
    degenerate: its single coefficient is identically zero.)

    Rows that already cover every positive-count verb keep their plain
    MLE estimates, since there is nothing to reserve mass for.
    """

    def __init__(self, corpus, gt_cutoff=5):
        super().__init__(corpus)
        if gt_cutoff < 1:
            raise ConfigError("gt_cutoff must be >= 1, got %d" % gt_cutoff)
        self.requested_cutoff = gt_cutoff
        self.count_of_counts = Counter(c for _, c in corpus.pairs())
        self.gt_cutoff, self.discounts = self._fit_discounts(gt_cutoff)
        self._positive_verbs = np.array(
            [j for j in range(len(corpus.v2)) if corpus.col_total(j) > 0],
            dtype=np.int64,
        )
        self._discounted_rows = {}
        self._leftover = {}
        self._alpha = {}
        self._build_rows()
        self._row_cache = {}
        self.direction = FORWARD

    def _fit_discounts(self, requested):
        n = self.count_of_counts
        for k in range(requested, 0, -1):
            if any(n.get(r, 0) <= 0 for r in range(1, k + 2)):
                continue
            big = (k + 1) * n[k + 1] / n[1]
            if big >= 1.0:
                continue
            discounts = {}
            for r in range(1, k + 1):
                r_star = good_turing_adjusted_count(n, r)
                d = (r_star / r - big) / (1.0 - big)
                if not 0.0 < d <= 1.0:
                    discounts = None
                    break
                discounts[r] = d
            if discounts is None:
                continue
            if k < requested:
                warnings.warn(
                    "lowered Good-Turing cutoff from %d to %d: "
                    "count-of-counts too sparse" % (requested, k),
                    stacklevel=3,
                )
            return k, discounts
        raise ModelError(
            "count-of-counts too sparse for Good-Turing discounting"
        )

    def _build_rows(self):
        corpus = self.corpus
        n_positive = int(self._positive_verbs.size)
        for w1 in range(len(corpus.v1)):
            row = corpus.row(w1)
            if not row:
                continue
            total = corpus.row_total(w1)
            if len(row) == n_positive:
                # nothing unseen to reserve mass for: keep MLE counts
                drow = {j: float(c) for j, c in row.items()}
                self._discounted_rows[w1] = drow
                self._leftover[w1] = 0.0
                self._alpha[w1] = 0.0
                continue
            drow = {}
            for j, c in row.items():
                d = self.discounts.get(c, 1.0) if c <= self.gt_cutoff else 1.0
                drow[j] = d * c
            self._discounted_rows[w1] = drow
            discounted_mass = sum(drow.values()) / total
            leftover = 1.0 - discounted_mass
            seen_unigram = sum(self._verb_unigrams[j] for j in row)
            denom = 1.0 - seen_unigram
            self._leftover[w1] = max(0.0, leftover)
            self._alpha[w1] = self._leftover[w1] / denom if denom > 0 else 0.0

    @property
    def context_ids(self):
        return np.array(sorted(self._discounted_rows), dtype=np.int64)

    @property
    def positive_verb_ids(self):
        return self._positive_verbs

    def discounted_count(self, w1, w2):
        row = self._discounted_rows.get(w1)
        return row.get(w2, 0.0) if row else 0.0

    def leftover(self, w1):
        """Probability mass reserved in row ``w1`` for unseen verbs."""
        try:
            return self._leftover[w1]
        except KeyError:
            raise ModelError("undefined conditional: c(noun %d) = 0" % w1) from None

    def alpha(self, w1):
        """Row normalizer for the back-off branch."""
        try:
            return self._alpha[w1]
        except KeyError:
            raise ModelError("undefined conditional: c(noun %d) = 0" % w1) from None

    def prob(self, w1, w2):
        self._check_pair(w1, w2)
        drow = self._discounted_rows.get(w1)
        if drow is None:
            raise ModelError("undefined conditional: c(noun %d) = 0" % w1)
        dc = drow.get(w2)
        if dc is not None:
            return dc / self.corpus.row_total(w1)
        return self._alpha[w1] * float(self._verb_unigrams[w2])

    def row(self, w1):
        """Smoothed conditional distribution over all positive-count verbs."""
        dist = self._row_cache.get(w1)
        if dist is not None:
            return dist
        drow = self._discounted_rows.get(w1)
        if drow is None:
            raise ModelError("undefined conditional: c(noun %d) = 0" % w1)
        total = self.corpus.row_total(w1)
        ids = self._positive_verbs
        probs = self._alpha[w1] * self._verb_unigrams[ids]
        pos = np.searchsorted(ids, np.array(sorted(drow), dtype=np.int64))
        probs[pos] = np.array([drow[j] for j in sorted(drow)]) / total
        keep = probs > 0.0
        dist = SparseDistribution(ids[keep], probs[keep])
        self._row_cache[w1] = dist
        return dist

    def summary(self):
        """Diagnostics: sizes, count-of-counts, discounts, leftover quantiles."""
        leftovers = sorted(self._leftover.values())
        quantiles = {}
        if leftovers:
            quantiles = {
                "min": leftovers[0],
                "median": leftovers[len(leftovers) // 2],
                "max": leftovers[-1],
            }
        return {
            "nouns": len(self.corpus.v1),
            "verbs": len(self.corpus.v2),
            "total_pairs": self.corpus.total_pairs,
            "pair_types": self.corpus.type_count(),
            "count_of_counts": dict(sorted(self.count_of_counts.items())),
            "requested_cutoff": self.requested_cutoff,
            "effective_cutoff": self.gt_cutoff,
            "discounts": {str(r): d for r, d in sorted(self.discounts.items())},
            "leftover_mass": quantiles,
        }
