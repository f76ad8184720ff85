"""Exception types raised by the estimation entry points.

Precondition violations (wrong dimensions, empty conditioning set, a
threshold outside its admissible range) are raised. Degenerate data at an
otherwise valid threshold (tied top order statistics, a nonpositive tail
index estimate) is reported in-band on the returned estimate instead, so
that threshold sweeps can skip over it.
"""

from __future__ import annotations


class FrontierError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(FrontierError, ValueError):
    pass


class EmptyConditioningSet(FrontierError, ValueError):
    """No observation is dominated by the query point (N_x = 0)."""

    def __init__(self, x=None):
        self.x = x
        msg = "no observation satisfies X_i <= x"
        if x is not None:
            msg += f" at x={list(map(float, x))}"
        super().__init__(msg)


class ThresholdOutOfRange(FrontierError, ValueError):
    """Requested threshold k is outside the admissible range for this estimator."""

    def __init__(self, k, lo, hi, what="k"):
        self.k, self.lo, self.hi = k, lo, hi
        super().__init__(f"{what}={k} outside admissible range [{lo}, {hi}]")


class NonpositiveThresholdValue(FrontierError, ValueError):
    """The order statistic used as log-spacing reference is <= 0."""


class InsufficientStableRange(FrontierError, ValueError):
    """No rolling window of successful estimates is available for k selection."""


class InvalidParameter(FrontierError, ValueError):
    pass


class CsvParseError(FrontierError, ValueError):
    def __init__(self, message, line, column=None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.message = message


class ConfigError(FrontierError, ValueError):
    pass


# In-band failure codes carried on estimates.
DEGENERATE_SPACINGS = "DegenerateSpacings"
NONPOSITIVE_ESTIMATE = "NonpositiveEstimate"
NONPOSITIVE_THRESHOLD = "NonpositiveThresholdValue"
