"""Similarity-weighted estimates and the discounting/back-off composite.

``p_sim`` averages the conditional rows of a noun's similar neighbors,
weighted by their profile weights; ``p_r`` optionally blends in the verb
unigram; ``p_hat`` keeps discounted estimates for seen pairs and routes
the reserved row mass through ``p_r`` for unseen ones, with the row
normalizer recomputed against whatever redistribution is plugged in.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DegenerateProfileError

NORMALIZED = "normalized"
UNNORMALIZED = "unnormalized"


class SimEstimator:
    """Combines similar-noun evidence into conditional verb estimates.

    ``base_model`` provides the neighbor rows P(verb | neighbor);
    ``profiles`` yields a SimilarityProfile per noun (a ProfileBuilder
    fits).  ``katz`` supplies the discount tables and reserved mass that
    ``p_hat`` needs.  ``mode`` may pin the estimator to normalized or
    unnormalized scoring; queries requesting the other mode then fail,
    which keeps one evaluation run from silently mixing the two.
    """

    def __init__(self, base_model, profiles, gamma=0.0, katz=None, mode=None):
        if not 0.0 <= gamma <= 1.0:
            raise ConfigError("gamma must lie in [0, 1], got %r" % (gamma,))
        if mode not in (None, NORMALIZED, UNNORMALIZED):
            raise ConfigError("mode must be 'normalized' or 'unnormalized'")
        self.base = base_model
        self.profiles = profiles
        self.gamma = gamma
        self.katz = katz
        self.mode = mode
        self._alpha_cache = {}

    def _check_mode(self, normalized):
        wanted = NORMALIZED if normalized else UNNORMALIZED
        if self.mode is not None and self.mode != wanted:
            raise ConfigError(
                "estimator is pinned to %s scoring; refusing a %s query"
                % (self.mode, wanted)
            )

    def _neighbor_terms(self, w1, w2):
        profile = self.profiles.profile(w1)
        if not profile.neighbors:
            raise DegenerateProfileError("empty neighborhood for noun %d" % w1)
        weights = np.array([nb.weight for nb in profile.neighbors])
        total = float(weights.sum())
        if total <= 0.0:
            raise DegenerateProfileError("zero total weight for noun %d" % w1)
        probs = np.array(
            [self.base.prob(nb.word_id, w2) for nb in profile.neighbors]
        )
        return weights, probs, total

    def p_sim(self, w1, w2, normalized=True):
        """Weighted combination of the neighbors' P(w2 | neighbor).

        With ``normalized=False`` the weight normalizer is skipped; the
        result is then only meaningful for comparisons sharing ``w1``.
        """
        self._check_mode(normalized)
        weights, probs, total = self._neighbor_terms(w1, w2)
        value = float(np.dot(weights, probs))
        return value / total if normalized else value

    def p_r(self, w1, w2):
        """Redistribution estimate: gamma-blend of unigram and p_sim."""
        if self.gamma == 1.0:
            return self.base.unigram_verb(w2)
        if self.gamma == 0.0:
            return self.p_sim(w1, w2)
        return self.gamma * self.base.unigram_verb(w2) + (
            1.0 - self.gamma
        ) * self.p_sim(w1, w2)

    def _alpha_sim(self, w1):
        alpha = self._alpha_cache.get(w1)
        if alpha is not None:
            return alpha
        leftover = self.katz.leftover(w1)
        if leftover <= 0.0:
            alpha = 0.0
        else:
            seen = sum(self.p_r(w1, j) for j in self.base.corpus.row(w1))
            denom = 1.0 - seen
            alpha = leftover / denom if denom > 0 else 0.0
        self._alpha_cache[w1] = alpha
        return alpha

    def query(self, w1, w2):
        """(estimate, branch) where branch is which side of the split fired."""
        if self.katz is None:
            raise ConfigError("p_hat needs back-off discount tables")
        self._check_mode(True)
        if self.base.corpus.count(w1, w2) > 0:
            return self.katz.prob(w1, w2), "seen-discounted"
        alpha = self._alpha_sim(w1)
        if alpha == 0.0:
            return 0.0, "unseen-similarity"
        return alpha * self.p_r(w1, w2), "unseen-similarity"

    def p_hat(self, w1, w2):
        """Discounted estimate for seen pairs, redistributed p_r otherwise."""
        return self.query(w1, w2)[0]
