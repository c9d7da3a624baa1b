"""Deterministic random substreams derived from a single top-level seed."""

import zlib

import numpy as np


def substream(seed, label, *ids):
    """Return a fresh generator for the ``(label, *ids)`` substream of ``seed``.

    Streams with distinct labels or ids are statistically independent, so
    consuming one never perturbs the draws of another.  ``ids`` must be
    non-negative integers (word ids, fold indices, ...).
    """
    key = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode("utf-8"))]
    key.extend(int(i) for i in ids)
    return np.random.default_rng(np.random.SeedSequence(key))
