"""Exception types shared across the package.

Everything raised on bad input or degenerate data derives from
:class:`CardsharpeError`, so the CLI can map any of them to exit code 1.
"""


class CardsharpeError(Exception):
    """Base class for all cardsharpe errors."""


class ValidationError(CardsharpeError, ValueError):
    """A value violates a documented invariant (plan, window, config, ...)."""


class PanelParseError(CardsharpeError):
    """A price CSV could not be parsed under the declared layout."""


class MissingCellError(CardsharpeError):
    """A (ticker, date) hole in the price panel with strict alignment."""


class NonPositivePriceError(CardsharpeError):
    """A price cell is zero, negative, or not finite."""


class NonMonotoneDatesError(CardsharpeError):
    """Date rows are not strictly increasing."""


class DegenerateSpecError(CardsharpeError):
    """Synthetic panel spec too small to produce a valid panel."""


class KTooLargeError(CardsharpeError):
    """Requested portfolio cardinality exceeds the universe size."""


class ZeroVarianceError(CardsharpeError):
    """Portfolio return series has zero variance over the window."""


class SamplingExhaustedError(CardsharpeError):
    """Redraw cap hit while replacing zero-variance portfolios."""


class EmptyInputError(CardsharpeError):
    """Quantile of an empty sample requested."""


class SingularDesignError(CardsharpeError):
    """Regression design matrix is singular (e.g. constant predictor)."""


class MismatchedFitsError(CardsharpeError):
    """Model comparison fed fits that do not come from the same data."""


class TooShortError(CardsharpeError):
    """Panel has fewer days than one analysis window."""


class MissingColumnError(CardsharpeError):
    """A records CSV lacks a column required by the operation."""
