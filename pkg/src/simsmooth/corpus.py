"""Pair-count corpora: ingestion, vocabulary interning, marginals, splits.

A corpus is a sparse table of non-negative integer counts ``c(w1, w2)``
over interned noun and verb vocabularies, together with always-consistent
row/column marginals.  Corpora are built once (single-threaded) and
treated as immutable afterwards.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ConfigError, ParseError, UnknownWordError
from .rng import substream

SNAPSHOT_VERSION = "1"


class Vocabulary:
    """Append-only bijection between surface strings and dense integer ids.

    Ids are assigned in first-occurrence order and never change once
    assigned, so they stay stable across derived corpora (splits,
    singleton-stripped variants).
    """

    def __init__(self, words=()):
        self._words = []
        self._index = {}
        for w in words:
            self.intern(w)

    def intern(self, word):
        """Return the id for ``word``, assigning a fresh one if needed."""
        wid = self._index.get(word)
        if wid is None:
            wid = len(self._words)
            self._index[word] = wid
            self._words.append(word)
        return wid

    def id_of(self, word):
        try:
            return self._index[word]
        except KeyError:
            raise UnknownWordError("unknown word: %r" % (word,)) from None

    def word(self, wid):
        if not 0 <= wid < len(self._words):
            raise UnknownWordError("word id %r out of range" % (wid,))
        return self._words[wid]

    def __len__(self):
        return len(self._words)

    def __contains__(self, word):
        return word in self._index

    def __iter__(self):
        return iter(self._words)

    def __eq__(self, other):
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self._words == other._words


class PairCorpus:
    """Sparse joint counts over (noun, verb) pairs with consistent marginals."""

    def __init__(self, v1=None, v2=None):
        self.v1 = v1 if v1 is not None else Vocabulary()
        self.v2 = v2 if v2 is not None else Vocabulary()
        self._rows = {}  # w1_id -> {w2_id: count}
        self._row_totals = {}
        self._col_totals = {}
        self.total_pairs = 0

    def _add(self, w1, w2, count):
        # builder-only; count must be positive
        row = self._rows.setdefault(w1, {})
        row[w2] = row.get(w2, 0) + count
        self._row_totals[w1] = self._row_totals.get(w1, 0) + count
        self._col_totals[w2] = self._col_totals.get(w2, 0) + count
        self.total_pairs += count

    def count(self, w1, w2):
        row = self._rows.get(w1)
        return row.get(w2, 0) if row else 0

    def row(self, w1):
        """Sparse counts for noun ``w1``; treat the mapping as read-only."""
        return self._rows.get(w1, {})

    def row_total(self, w1):
        return self._row_totals.get(w1, 0)

    def col_total(self, w2):
        return self._col_totals.get(w2, 0)

    def pairs(self):
        """Yield ((w1, w2), count) over all stored (non-zero) entries."""
        for w1, row in self._rows.items():
            for w2, c in row.items():
                yield (w1, w2), c

    def singleton_count(self):
        """Number of pair types occurring exactly once."""
        return sum(1 for _, c in self.pairs() if c == 1)

    def type_count(self):
        return sum(len(row) for row in self._rows.values())

    def validate(self):
        """Check marginal consistency; raises AssertionError on violation."""
        row_sums = {}
        col_sums = {}
        total = 0
        for (w1, w2), c in self.pairs():
            assert c > 0, "stored zero entry at (%d, %d)" % (w1, w2)
            row_sums[w1] = row_sums.get(w1, 0) + c
            col_sums[w2] = col_sums.get(w2, 0) + c
            total += c
        assert row_sums == {k: v for k, v in self._row_totals.items() if v}
        assert col_sums == {k: v for k, v in self._col_totals.items() if v}
        assert total == self.total_pairs

    def __eq__(self, other):
        if not isinstance(other, PairCorpus):
            return NotImplemented
        return (
            self.v1 == other.v1
            and self.v2 == other.v2
            and dict(self.pairs()) == dict(other.pairs())
        )

    @classmethod
    def from_counts(cls, v1, v2, counts):
        """Build a corpus over existing vocabularies from an id-count mapping."""
        corpus = cls(v1, v2)
        for (w1, w2), c in counts:
            if c > 0:
                corpus._add(w1, w2, c)
        return corpus


def parse_pairs(lines):
    """Parse ``noun<TAB>verb[<TAB>count]`` lines into a PairCorpus.

    Repeated lines accumulate.  The count, when present, must be a
    positive integer; a missing count means 1.  Empty lines are skipped.
    Raises ParseError (with the 1-based line number) on malformed lines.
    """
    corpus = PairCorpus()
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) == 2:
            noun, verb = fields
            count = 1
        elif len(fields) == 3:
            noun, verb, raw = fields
            try:
                count = int(raw)
            except ValueError:
                raise ParseError("count %r is not an integer" % raw, lineno) from None
            if count <= 0:
                raise ParseError("count must be positive, got %d" % count, lineno)
        else:
            raise ParseError(
                "expected 2 or 3 tab-separated fields, got %d" % len(fields), lineno
            )
        if not noun or not verb:
            raise ParseError("empty word field", lineno)
        corpus._add(corpus.v1.intern(noun), corpus.v2.intern(verb), count)
    return corpus


def load_pairs(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_pairs(f)


def strip_singletons(corpus):
    """Drop every pair type with count 1; keep vocabularies (ids stay stable).

    Marginals are recomputed from the surviving pairs, so rows or columns
    may end up with total zero.  Idempotent.
    """
    out = PairCorpus(corpus.v1, corpus.v2)
    for (w1, w2), c in corpus.pairs():
        if c > 1:
            out._add(w1, w2, c)
    return out


@dataclass(frozen=True)
class SplitSpec:
    """Seeded train/test split parameters."""

    train_fraction: float = 0.8
    fold_count: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(
                "train_fraction must lie in (0, 1), got %r" % (self.train_fraction,)
            )
        if self.fold_count < 2:
            raise ConfigError("fold_count must be >= 2, got %d" % self.fold_count)


def split_unseen_test(corpus, spec):
    """Split pair occurrences into a training corpus and an unseen test list.

    Occurrences (a type with count 3 contributes 3 items) are shuffled
    with the split substream of ``spec.seed`` and cut at
    ``train_fraction``.  Test occurrences whose type also landed in the
    training part are discarded, so train types and test types are
    disjoint.  The returned test list may repeat types.
    """
    if corpus.total_pairs == 0:
        raise ConfigError("cannot split an empty corpus")
    occurrences = []
    for (w1, w2), c in sorted(corpus.pairs()):
        occurrences.extend([(w1, w2)] * c)
    rng = substream(spec.seed, "split")
    perm = rng.permutation(len(occurrences))
    n_train = int(len(occurrences) * spec.train_fraction + 1e-9)
    train = PairCorpus(corpus.v1, corpus.v2)
    for k in perm[:n_train]:
        w1, w2 = occurrences[k]
        train._add(w1, w2, 1)
    seen = {(w1, w2) for (w1, w2), _ in train.pairs()}
    test = [occurrences[k] for k in perm[n_train:] if occurrences[k] not in seen]
    return train, test


def make_folds(test, k, seed):
    """Partition test occurrences into k shuffled folds of near-equal size.

    Sizes differ by at most one; the remainder goes to the lowest-indexed
    folds.  Deterministic given the seed.
    """
    if k < 2:
        raise ConfigError("fold count must be >= 2, got %d" % k)
    if len(test) < k:
        raise ConfigError("need at least %d test occurrences, got %d" % (k, len(test)))
    rng = substream(seed, "folds")
    perm = rng.permutation(len(test))
    shuffled = [test[i] for i in perm]
    base, rem = divmod(len(shuffled), k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        folds.append(shuffled[start : start + size])
        start += size
    return folds


def save_snapshot(corpus, path):
    """Write a versioned snapshot that round-trips exactly via load_snapshot."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("#simsmooth-corpus\t%s\n" % SNAPSHOT_VERSION)
        for w in corpus.v1:
            f.write("#n\t%s\n" % w)
        for w in corpus.v2:
            f.write("#v\t%s\n" % w)
        for (w1, w2), c in sorted(corpus.pairs()):
            f.write("%s\t%s\t%d\n" % (corpus.v1.word(w1), corpus.v2.word(w2), c))


def load_snapshot(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    v1 = Vocabulary()
    v2 = Vocabulary()
    counts = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\r\n")
        if header != "#simsmooth-corpus\t%s" % SNAPSHOT_VERSION:
            raise ParseError("not a simsmooth corpus snapshot: %r" % header, 1)
        for lineno, line in enumerate(f, start=2):
            line = line.rstrip("\r\n")
            if not line:
                continue
            if line.startswith("#n\t"):
                v1.intern(line[3:])
            elif line.startswith("#v\t"):
                v2.intern(line[3:])
            else:
                fields = line.split("\t")
                if len(fields) != 3:
                    raise ParseError("bad snapshot data line", lineno)
                try:
                    c = int(fields[2])
                except ValueError:
                    raise ParseError("bad snapshot count %r" % fields[2], lineno) from None
                counts.append(((v1.id_of(fields[0]), v2.id_of(fields[1])), c))
    return PairCorpus.from_counts(v1, v2, counts)
