"""Exception types shared across the package."""


class Error(Exception):
    """Base class for all simsmooth errors."""


class ParseError(Error):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message, line_number):
        super().__init__("line %d: %s" % (line_number, message))
        self.line_number = line_number


class ConfigError(Error):
    """Invalid run or operation configuration."""


class UnknownWordError(Error):
    """Word (or word id) not present in the relevant vocabulary."""


class ModelError(Error):
    """Model construction or query failed (degenerate row, bad discounts)."""


class DomainError(Error):
    """A raw similarity value fell outside the measure's valid range."""


class DivergenceError(Error):
    """KL divergence undefined: the denominator vanishes on the support.

    ``word_id`` names the offending outcome when known.
    """

    def __init__(self, message, word_id=None):
        super().__init__(message)
        self.word_id = word_id


class DegenerateProfileError(Error):
    """Similarity profile has no usable neighbors or zero total weight."""


class TrialError(Error):
    """A disambiguation trial could not be scored; wraps the cause."""
