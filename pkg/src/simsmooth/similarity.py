"""Distributional dissimilarity measures and combination-weight profiles.

All measures operate on sparse conditional verb distributions.  The
divergence-to-average and L1 measures use grouped forms that touch only
the two supports, never the full vocabulary; KL needs a smoothed
denominator row; confusion probability needs Bayes-consistent base
estimates (MLE) to be a proper affinity.
"""

from __future__ import annotations

import math
from collections import namedtuple
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError, DomainError
from .rng import substream

LN2 = math.log(2.0)
TWO_LN2 = 2.0 * LN2

MEASURES = ("KL", "AVG", "L1", "CONFUSION", "RAND")
#: measures where a *small* raw value means similar (weight decreasing in raw)
DISSIMILARITY_MEASURES = frozenset({"KL", "AVG", "L1"})
#: measures where a *large* raw value means similar (weight equals raw)
AFFINITY_MEASURES = frozenset({"CONFUSION", "RAND"})
#: measures whose weight depends on the tunable exponent
TUNABLE_MEASURES = frozenset({"KL", "AVG", "L1"})

_RAW_RANGES = {
    "KL": (0.0, math.inf),
    "AVG": (0.0, TWO_LN2),
    "L1": (0.0, 2.0),
    "CONFUSION": (0.0, 1.0),
    "RAND": (0.0, 1.0),
}


class SparseDistribution:
    """A probability distribution stored as (sorted ids, positive probs)."""

    __slots__ = ("ids", "probs")

    def __init__(self, ids, probs):
        ids = np.asarray(ids, dtype=np.int64)
        probs = np.asarray(probs, dtype=np.float64)
        if ids.shape != probs.shape or ids.ndim != 1:
            raise ValueError("ids and probs must be 1-d arrays of equal length")
        if ids.size and np.any(np.diff(ids) <= 0):
            raise ValueError("ids must be strictly increasing")
        if np.any(probs <= 0.0):
            raise ValueError("probabilities must be strictly positive")
        if abs(float(probs.sum()) - 1.0) > 1e-10:
            raise ValueError("probabilities must sum to 1 within 1e-10")
        self.ids = ids
        self.probs = probs

    @classmethod
    def from_mapping(cls, mapping):
        items = sorted(mapping.items())
        return cls([i for i, _ in items], [p for _, p in items])

    def prob_of(self, wid):
        pos = int(np.searchsorted(self.ids, wid))
        if pos < self.ids.size and self.ids[pos] == wid:
            return float(self.probs[pos])
        return 0.0

    def __len__(self):
        return int(self.ids.size)


class TouchCounter:
    """Counts sparse entries examined by the measure kernels."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


_active_counter = None


@contextmanager
def count_touches():
    """Context manager exposing a TouchCounter for the enclosed measure calls."""
    global _active_counter
    counter = TouchCounter()
    previous = _active_counter
    _active_counter = counter
    try:
        yield counter
    finally:
        _active_counter = previous


def _touch(n):
    if _active_counter is not None:
        _active_counter.count += int(n)


def _identical(p, q):
    if p is q:
        return True
    return (
        p.ids.size == q.ids.size
        and np.array_equal(p.ids, q.ids)
        and np.array_equal(p.probs, q.probs)
    )


def _aligned_common(p, q):
    """Probabilities of p and q restricted to their common support."""
    _touch(len(p) + len(q))
    common, ia, ib = np.intersect1d(
        p.ids, q.ids, assume_unique=True, return_indices=True
    )
    _touch(common.size)
    return p.probs[ia], q.probs[ib], common


def probs_on(dist, ids):
    """Evaluate ``dist`` on an arbitrary sorted-or-not id array (0 off support)."""
    ids = np.asarray(ids, dtype=np.int64)
    pos = np.searchsorted(dist.ids, ids)
    pos = np.minimum(pos, max(len(dist) - 1, 0))
    out = np.zeros(ids.shape, dtype=np.float64)
    if len(dist):
        hit = dist.ids[pos] == ids
        out[hit] = dist.probs[pos[hit]]
    return out


def kl_divergence(p, q_probs):
    """KL divergence of ``p`` from a smoothed row evaluated on p's support.

    ``q_probs`` must hold the denominator probabilities aligned with
    ``p.ids``; every entry must be strictly positive, otherwise the
    divergence is undefined and a DivergenceError names the offender.
    Natural log; the sum runs over p's support only.
    """
    q = np.asarray(q_probs, dtype=np.float64)
    if q.shape != p.probs.shape:
        raise ValueError("q_probs must align with p's support")
    bad = np.nonzero(q <= 0.0)[0]
    if bad.size:
        wid = int(p.ids[bad[0]])
        raise DivergenceError(
            "denominator is zero at supported word id %d" % wid, word_id=wid
        )
    _touch(2 * len(p))
    return float(np.dot(p.probs, np.log(p.probs / q)))


def total_divergence_to_average(p, q):
    """Total KL divergence of two distributions to their equal mixture.

    Computed with the grouped form over the common support C:
    ``sum_C {H(p+q) - H(p) - H(q)} + 2*ln(2)`` with ``H(x) = -x ln x``,
    which equals the direct two-term definition.  Bounded by [0, 2 ln 2];
    the maximum is attained exactly when the supports are disjoint.
    Identical inputs return exactly 0.
    """
    if _identical(p, q):
        _touch(2 * len(p))
        return 0.0
    pc, qc, _ = _aligned_common(p, q)
    if pc.size == 0:
        return TWO_LN2
    m = pc + qc
    grouped = float(np.dot(pc, np.log(pc)) + np.dot(qc, np.log(qc)) - np.dot(m, np.log(m)))
    # provably >= 0; clamp float dust just below zero
    return max(0.0, grouped + TWO_LN2)


def l1_distance(p, q):
    """L1 distance via the grouped common-support form; range [0, 2].

    Equals 2 exactly when no outcome has positive probability under both
    distributions.  Identical inputs return exactly 0.
    """
    if _identical(p, q):
        _touch(2 * len(p))
        return 0.0
    pc, qc, _ = _aligned_common(p, q)
    value = 2.0 - float(pc.sum()) - float(qc.sum()) + float(np.abs(pc - qc).sum())
    return max(0.0, value)


def confusion_probability(model, w1, w1_prime):
    """Substitutability of w1_prime for w1 under a Bayes-consistent model.

    Uses the common-support form
    ``sum_w2 P(w2|w1)/P(w2) * P(w2|w1') * P(w1')`` over the two forward
    rows.  Rows of this affinity sum to one over all candidates when the
    base estimates are MLE; a word need not be its own closest neighbor.
    """
    from .errors import ModelError

    if getattr(model, "direction", "forward") != "forward":
        raise ConfigError("confusion probability needs a forward conditional model")
    p = model.row(w1)
    q = model.row(w1_prime)
    pc, qc, common = _aligned_common(p, q)
    if pc.size == 0:
        return 0.0
    u = model.verb_unigrams(common)
    if np.any(u <= 0.0):
        raise ModelError(
            "zero unigram inside a summed support; base estimates inconsistent"
        )
    return float(np.dot(pc / u, qc)) * model.unigram_noun(w1_prime)


@dataclass(frozen=True)
class Neighborhood:
    """Candidate-set policy: all words, the closest k, and/or a raw cutoff.

    For dissimilarity measures the cutoff keeps raw values strictly below
    ``threshold``; for affinity measures, strictly above it.
    """

    k: int | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise ConfigError("neighborhood k must be >= 1, got %r" % (self.k,))

    def describe(self):
        parts = []
        if self.k is not None:
            parts.append("top=%d" % self.k)
        if self.threshold is not None:
            parts.append("thresh=%s" % repr(self.threshold))
        return ",".join(parts) if parts else "all"

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text in ("", "all"):
            return cls()
        k = None
        threshold = None
        for part in text.split(","):
            key, _, value = part.partition("=")
            try:
                if key == "top":
                    k = int(value)
                elif key == "thresh":
                    threshold = float(value)
                else:
                    raise ValueError
            except ValueError:
                raise ConfigError("bad neighborhood spec: %r" % text) from None
        return cls(k=k, threshold=threshold)


@dataclass(frozen=True)
class WeightConfig:
    """Measure choice plus the knobs that turn raw values into weights."""

    measure: str
    beta: float = 1.0
    neighborhood: Neighborhood = field(default_factory=Neighborhood)
    seed: int = 0  # RAND draws only

    def __post_init__(self):
        measure = self.measure.upper()
        if measure not in MEASURES:
            raise ConfigError("unknown measure %r" % (self.measure,))
        object.__setattr__(self, "measure", measure)
        if measure in TUNABLE_MEASURES and not self.beta > 0:
            raise ConfigError("beta must be positive for %s" % measure)
        t = self.neighborhood.threshold
        if t is not None:
            lo, hi = _RAW_RANGES[measure]
            if not lo <= t <= hi:
                raise ConfigError(
                    "threshold %r outside %s range [%g, %g]" % (t, measure, lo, hi)
                )


def _rand_weight(seed, w1, w1_prime):
    # one draw per ordered pair, in (0, 1]
    return 1.0 - float(substream(seed, "rand-weight", w1, w1_prime).random())


def weight(config, raw, pair=None):
    """Turn one raw measure value into a combination weight.

    KL and AVG use ``10**(-beta*raw)``; L1 uses ``(2-raw)**beta``;
    CONFUSION uses the raw affinity itself; RAND ignores ``raw`` and
    draws once per (w1, w1') pair, which must be supplied.
    """
    if raw < -1e-12:
        raise DomainError("raw value %r is negative" % (raw,))
    raw = max(0.0, raw)
    m = config.measure
    if m in ("KL", "AVG"):
        return 10.0 ** (-config.beta * raw)
    if m == "L1":
        base = 2.0 - raw
        if base < -1e-12:
            raise DomainError("L1 raw value %r exceeds 2" % (raw,))
        return max(0.0, base) ** config.beta
    if m == "CONFUSION":
        return raw
    if pair is None:
        raise ConfigError("RAND weights need the (w1, w1') pair ids")
    return _rand_weight(config.seed, pair[0], pair[1])


def _weights_vec(measure, raws, beta):
    if measure in ("KL", "AVG"):
        return 10.0 ** (-beta * raws)
    if measure == "L1":
        return np.clip(2.0 - raws, 0.0, None) ** beta
    return raws  # CONFUSION, RAND: the raw value is the weight


Neighbor = namedtuple("Neighbor", ["word_id", "raw", "weight"])


@dataclass
class SimilarityProfile:
    """Ranked neighbors of a target noun: (word id, raw value, weight)."""

    target: int
    measure: str
    neighbors: list

    def total_weight(self):
        return sum(nb.weight for nb in self.neighbors)


class ProfileBuilder:
    """Computes similarity profiles of nouns against all candidate nouns.

    Candidates are the nouns with a defined conditional row in the base
    model; the target itself is a candidate.  Raw values are memoized per
    target, so repeated profile or selection queries are cheap.  All
    methods are pure once the models are built, and the caches tolerate
    concurrent fills (last write wins with identical values).

    ``base_model`` supplies the conditional rows being compared.  KL
    additionally needs ``mle`` (unsmoothed numerator rows) and ``katz``
    (smoothed denominator rows).
    """

    def __init__(self, base_model, config, katz=None, mle=None):
        self.base = base_model
        self.config = config
        self.katz = katz
        self.mle = mle if mle is not None else base_model
        if config.measure == "KL" and katz is None:
            raise ConfigError("KL profiles need a smoothed denominator model")
        self.candidates = np.asarray(base_model.context_ids, dtype=np.int64)
        self._raws = {}
        self._selections = {}

    def raw_values(self, target):
        """Raw measure values of ``target`` against every candidate."""
        cached = self._raws.get(target)
        if cached is not None:
            return cached
        m = self.config.measure
        values = np.empty(self.candidates.size, dtype=np.float64)
        if m in ("AVG", "L1"):
            fn = total_divergence_to_average if m == "AVG" else l1_distance
            p = self.base.row(target)
            for i, cand in enumerate(self.candidates):
                values[i] = fn(p, self.base.row(int(cand)))
        elif m == "KL":
            p = self.mle.row(target)
            for i, cand in enumerate(self.candidates):
                q = probs_on(self.katz.row(int(cand)), p.ids)
                values[i] = kl_divergence(p, q)
        elif m == "CONFUSION":
            for i, cand in enumerate(self.candidates):
                values[i] = confusion_probability(self.base, target, int(cand))
        else:  # RAND
            for i, cand in enumerate(self.candidates):
                values[i] = _rand_weight(self.config.seed, target, int(cand))
        self._raws[target] = values
        return values

    def selection(self, target):
        """(indices into candidates in rank order, full raw vector)."""
        cached = self._selections.get(target)
        if cached is not None:
            return cached
        raws = self.raw_values(target)
        affinity = self.config.measure in AFFINITY_MEASURES
        sort_key = -raws if affinity else raws
        order = np.lexsort((self.candidates, sort_key))
        nb = self.config.neighborhood
        if nb.threshold is not None:
            ranked = raws[order]
            keep = ranked > nb.threshold if affinity else ranked < nb.threshold
            order = order[keep]
        if nb.k is not None:
            order = order[: nb.k]
        result = (order, raws)
        self._selections[target] = result
        return result

    def profile(self, target):
        idx, raws = self.selection(target)
        selected = raws[idx]
        if self.config.measure == "RAND":
            weights = selected
        else:
            weights = _weights_vec(self.config.measure, selected, self.config.beta)
        neighbors = [
            Neighbor(int(self.candidates[j]), float(raws[j]), float(w))
            for j, w in zip(idx, weights)
        ]
        return SimilarityProfile(target, self.config.measure, neighbors)


def build_profile(target, builder):
    """Profile of ``target`` under the builder's measure and neighborhood."""
    return builder.profile(target)
