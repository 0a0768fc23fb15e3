"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: TransportError -> 4, everything else
derived from DescrankError -> 3 (usage errors are argparse's native 2).
"""


class DescrankError(Exception):
    """Base class for all descrank errors."""


class DataError(DescrankError):
    """A file or record violates its documented format or bounds."""


class EmptyInputError(DataError):
    """An operation that needs at least one element got none."""


class NotFoundError(DescrankError):
    """The requested entity or article does not exist."""


class TransportError(DescrankError):
    """HTTP failure or timeout that survived the bounded retries."""


class MalformedResponseError(DescrankError):
    """The API answered with something we cannot parse."""


class SourceExhaustedError(DescrankError):
    """Fixture mode ran out of unscanned records before the target count."""


class BadRatiosError(DataError):
    """Split ratios are negative or do not sum to one."""


class TopicExhaustionError(DescrankError):
    """Topic-exclusive split cannot produce three disjoint non-empty sets."""


class DimensionMismatchError(DataError):
    """Two vectors (or a vector and a projection) disagree on dimension."""


class ZeroVectorError(DataError):
    """Cosine similarity is undefined for a zero-norm vector."""


class MissingEmbeddingError(DataError):
    """No embedding is stored for the requested text."""


class NonFiniteLossError(DescrankError):
    """Training produced a NaN or infinite loss (diverged)."""


class BadAlphaError(DataError):
    """Significance level outside the open interval (0, 1)."""


class WrongRaterCountError(DataError):
    """A two-rater coefficient was asked of a matrix without exactly two raters."""


class MissingCellsError(DataError):
    """Missing ratings where the coefficient does not allow them."""


class UnequalRatersError(DataError):
    """Items carry different rater counts where equal counts are required."""


class DegenerateChanceError(DescrankError):
    """Chance agreement is 1 (or expected disagreement is 0); the coefficient is undefined."""


class InsufficientDataError(DataError):
    """Too few pairable ratings to estimate agreement."""
