"""Synthetic block-structured pair corpora with controlled unseen test sets.

Nouns and verbs carry latent classes; matching classes pair more often
than mismatched ones by a fixed boost.  Verb ids double as designed
frequency ranks.  Every noun withholds one verb of each class (chosen by
the noun's within-block index); because verb classes interleave ids, the
withheld ids form one contiguous run per noun.  Runs are separated by a
wide frequency gap while ids inside a run stay close, so frequency-
adjacent pseudo-word pairing always pairs verbs within one run, and test
decoys are therefore unseen with the trial's noun, exactly like the test
verbs themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .corpus import PairCorpus, Vocabulary
from .errors import ConfigError
from .rng import substream


@dataclass(frozen=True)
class BlockSpec:
    """Shape and skew of a synthetic block corpus."""

    noun_classes: int = 4
    nouns_per_class: int = 10
    verb_classes: int = 4
    verbs_per_class: int = 5
    within_boost: float = 10.0
    train_size: int = 20000
    test_size: int = 2000
    run_gap: float = 2.56  # frequency ratio between consecutive withheld runs
    within_run_gap: float = 1.05  # frequency ratio between neighbors in a run
    noun_zipf: float = 0.0  # exponent over within-block noun rank
    train_noise: float = 0.0  # train-mass fraction spread uniformly over cells
    noun_class_sizes: tuple | None = None  # unequal class sizes, else equal
    noun_tilt: float = 0.0  # per-noun lognormal jitter of within-class cells

    def __post_init__(self):
        if self.verb_classes % 2:
            raise ConfigError("verb_classes must be even so pairs interleave classes")
        if self.within_boost <= 1.0:
            raise ConfigError("within_boost must exceed 1")
        if self.train_size < 1 or self.test_size < 0:
            raise ConfigError("sizes must be positive")
        if self.noun_class_sizes is not None:
            if len(self.noun_class_sizes) != self.noun_classes:
                raise ConfigError("need one size per noun class")
            if any(s < 1 for s in self.noun_class_sizes):
                raise ConfigError("noun class sizes must be positive")

    @property
    def class_sizes(self):
        if self.noun_class_sizes is not None:
            return tuple(self.noun_class_sizes)
        return (self.nouns_per_class,) * self.noun_classes

    @property
    def n_nouns(self):
        return sum(self.class_sizes)

    @property
    def n_verbs(self):
        return self.verb_classes * self.verbs_per_class


def noun_class(spec, noun):
    offset = 0
    for b, size in enumerate(spec.class_sizes):
        if noun < offset + size:
            return b
        offset += size
    raise ConfigError("noun id %d out of range" % noun)


def _noun_block_index(spec, noun):
    offset = 0
    for size in spec.class_sizes:
        if noun < offset + size:
            return noun - offset
        offset += size
    raise ConfigError("noun id %d out of range" % noun)


def verb_class(spec, verb):
    return verb % spec.verb_classes


def withheld_verbs(spec, noun):
    """Verb ids never paired with ``noun`` in training (test cells)."""
    m = _noun_block_index(spec, noun) % spec.verbs_per_class
    start = spec.verb_classes * m
    return list(range(start, start + spec.verb_classes))


def _withheld_mask(spec):
    mask = np.zeros((spec.n_nouns, spec.n_verbs), dtype=bool)
    for n in range(spec.n_nouns):
        mask[n, withheld_verbs(spec, n)] = True
    return mask


def _design_weights(spec):
    """Joint cell weights whose post-holdout verb totals follow the ladder.

    Withheld cells remove different noun mass from different verbs, so
    each verb's factor is rescaled to make its expected training total
    exactly proportional to its designed frequency-ladder value.  That
    keeps the observed frequency ranking equal to the designed one with
    overwhelming probability, which pins down the pseudo-word pairing.
    """
    nouns = np.ones(spec.n_nouns)
    if spec.noun_zipf > 0:
        parts = [
            (1.0 + np.arange(size)) ** -spec.noun_zipf for size in spec.class_sizes
        ]
        nouns = np.concatenate(parts)
    # frequency ladder by withheld run: consecutive runs are separated by a
    # wide ratio (so observed ranks never cross a run boundary), while ids
    # inside a run stay close (their relative order is free to fluctuate:
    # any within-run pairing keeps test decoys unseen)
    ladder = np.empty(spec.n_verbs)
    for j in range(spec.n_verbs):
        run, slot = divmod(j, spec.verb_classes)
        ladder[j] = spec.run_gap**-run * spec.within_run_gap**-slot
    boost = np.ones((spec.n_nouns, spec.n_verbs))
    for n in range(spec.n_nouns):
        for v in range(spec.n_verbs):
            if noun_class(spec, n) == verb_class(spec, v):
                boost[n, v] = spec.within_boost
    allowed = ~_withheld_mask(spec)
    surviving = nouns[:, None] * boost * allowed
    verbs = ladder / surviving.sum(axis=0)
    return nouns[:, None] * boost * verbs[None, :]


def _vocabularies(spec):
    v1 = Vocabulary("n%03d" % i for i in range(spec.n_nouns))
    v2 = Vocabulary("v%03d" % j for j in range(spec.n_verbs))
    return v1, v2


def _corpus_from_counts(spec, v1, v2, counts):
    flat = []
    for n in range(spec.n_nouns):
        for v in range(spec.n_verbs):
            c = int(counts[n, v])
            if c > 0:
                flat.append(((n, v), c))
    return PairCorpus.from_counts(v1, v2, flat)


def block_corpus(spec, seed):
    """Sample (train corpus, unseen test occurrences) for one seed.

    Training pairs are drawn from the block joint with every noun's
    withheld cells zeroed; test occurrences are drawn from the withheld
    cells in proportion to their unzeroed weights.  Both draws are
    deterministic given the seed.
    """
    joint = _design_weights(spec)
    mask = _withheld_mask(spec)
    if spec.noun_tilt > 0:
        # per-noun idiosyncrasy: each noun's within-class verb preferences
        # get a lognormal tilt that is part of the true joint (it shapes
        # both training counts and test draws); columns are re-pinned to
        # the frequency ladder afterwards so the verb ranking stays fixed
        rng = substream(seed, "synth-tilt")
        tilt = np.exp(spec.noun_tilt * rng.standard_normal(joint.shape))
        before = (joint * ~mask).sum(axis=0)
        for n in range(spec.n_nouns):
            for v in range(spec.n_verbs):
                if noun_class(spec, n) == verb_class(spec, v):
                    joint[n, v] *= tilt[n, v]
        after = (joint * ~mask).sum(axis=0)
        joint = joint * (before / after)[None, :]
    train_weights = np.where(mask, 0.0, joint)
    if spec.train_noise > 0:
        # column-matched co-occurrence noise: spreads each verb's extra mass
        # evenly over its allowed nouns, so rows blur but the expected verb
        # frequency ranking is untouched
        allowed = ~mask
        col_mass = train_weights.sum(axis=0)
        floor = spec.train_noise * col_mass / allowed.sum(axis=0)
        train_weights = train_weights + allowed * floor[None, :]
    test_weights = np.where(mask, joint, 0.0)

    v1, v2 = _vocabularies(spec)
    rng = substream(seed, "synth-train")
    train_counts = rng.multinomial(
        spec.train_size, (train_weights / train_weights.sum()).ravel()
    ).reshape(joint.shape)
    train = _corpus_from_counts(spec, v1, v2, train_counts)

    rng = substream(seed, "synth-test")
    test_counts = rng.multinomial(
        spec.test_size, (test_weights / test_weights.sum()).ravel()
    ).reshape(joint.shape)
    test = []
    for n in range(spec.n_nouns):
        for v in range(spec.n_verbs):
            test.extend([(n, v)] * int(test_counts[n, v]))
    return train, test


def zipf_variant(spec=None):
    """Long-tail version of the block spec: many rare pair types."""
    base = spec if spec is not None else BlockSpec()
    return replace(
        base,
        nouns_per_class=15,
        verbs_per_class=5,
        train_size=2600,
        test_size=1200,
        noun_zipf=1.1,
        run_gap=1.8,
        within_run_gap=1.1,
        noun_class_sizes=None,
        train_noise=0.0,
    )


def demo_corpus(spec, seed):
    """A plain sample of the block joint with no withheld cells.

    Suitable as CLI demo input: sparse enough that an 80/20 occurrence
    split leaves unseen test pairs.
    """
    joint = _design_weights(spec)
    v1, v2 = _vocabularies(spec)
    rng = substream(seed, "synth-demo")
    counts = rng.multinomial(
        spec.train_size, (joint / joint.sum()).ravel()
    ).reshape(joint.shape)
    return _corpus_from_counts(spec, v1, v2, counts)
