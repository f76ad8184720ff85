"""Conditional tail index estimation from the top of the transformed sample.

Two estimators of the regular-variation exponent ``rho_x > 0`` of the
conditional distribution of ``Y`` near the frontier:

* Pickands type, from three upper order statistics at ranks ``k, 2k, 4k``::

      Q_j = Z_(n-j+1)
      rho = log 2 / log((Q_2k - Q_4k) / (Q_k - Q_2k))

* moment type, from the first two moments of the top ``k`` log-spacings
  above ``Z_(n-k)``::

      gamma = M1 + 1 - 1/2 * (1 - M1**2 / M2) ** -1,   rho = -1 / gamma

Both are root-k asymptotically normal; :func:`rho_confidence_interval`
builds the plug-in normal interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.special import ndtri

from .core import TransformedSample
from .errors import (
    DEGENERATE_SPACINGS,
    NONPOSITIVE_ESTIMATE,
    EmptyConditioningSet,
    InvalidParameter,
    NonpositiveThresholdValue,
    ThresholdOutOfRange,
)

PICKANDS = "Pickands"
MOMENT = "Moment"

LOG2 = math.log(2.0)


def z_quantile(level: float) -> float:
    """Two-sided standard normal critical value ``z_{(1+level)/2}``."""
    if not 0 < level < 1:
        raise InvalidParameter(f"confidence level must lie in (0, 1), got {level}")
    return float(ndtri(0.5 * (1.0 + level)))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    level: float
    variance_id: str = ""

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


@dataclass(frozen=True)
class TailIndexEstimate:
    """Outcome of a tail index estimator at threshold ``k``.

    ``rho`` is ``None`` when the estimate failed; ``raw`` keeps whatever the
    closed form produced (possibly nonpositive or nan) for diagnostics.
    """

    kind: str
    k: int
    rho: Optional[float]
    variance: float
    raw: float = math.nan
    failure: Optional[str] = None
    ci: Optional[Interval] = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def value(self) -> float:
        return self.rho if self.rho is not None else math.nan


@dataclass(frozen=True)
class MomentSums:
    m1: float
    m2: float
    k: int


def pickands_variance(rho: float) -> float:
    """Asymptotic variance of ``sqrt(k) (rho_hat - rho)`` for the Pickands estimator."""
    if not rho > 0:
        raise InvalidParameter(f"rho must be > 0, got {rho}")
    a = 2.0 ** (-1.0 / rho) - 1.0
    return rho * rho * (2.0 ** (1.0 - 2.0 / rho) + 1.0) / (a * math.log(4.0)) ** 2


def moment_variance(rho: float) -> float:
    """Asymptotic variance of ``sqrt(k) (rho_tilde - rho)`` for the moment estimator."""
    if not rho > 0:
        raise InvalidParameter(f"rho must be > 0, got {rho}")
    r = rho
    brace = 4.0 - 8.0 * (2.0 + r) / (3.0 + r) + (11.0 + 5.0 * r) * (2.0 + r) / ((3.0 + r) * (4.0 + r))
    return r * (2.0 + r) * (1.0 + r) ** 2 * brace


def _check_pickands_k(ts: TransformedSample, k: int) -> None:
    if ts.n_x == 0:
        raise EmptyConditioningSet(ts.query)
    hi = (ts.n_x + 1) // 4
    if not 1 <= k <= hi:
        raise ThresholdOutOfRange(k, 1, hi)


def _pickands_from_quantiles(q1: float, q2: float, q4: float) -> tuple[float, Optional[str]]:
    near, far = q1 - q2, q2 - q4
    if near <= 0 or far <= 0:
        return math.nan, DEGENERATE_SPACINGS
    ratio = far / near
    if ratio == 1.0:
        return math.nan, DEGENERATE_SPACINGS
    raw = LOG2 / math.log(ratio)
    if not raw > 0:
        return raw, NONPOSITIVE_ESTIMATE
    return raw, None


def pickands_rho(ts: TransformedSample, k: int) -> TailIndexEstimate:
    """Pickands-type estimate from ``Q_k, Q_2k, Q_4k``; requires ``4k - 1 <= N_x``."""
    _check_pickands_k(ts, k)
    raw, failure = _pickands_from_quantiles(ts.top(k), ts.top(2 * k), ts.top(4 * k))
    if failure:
        return TailIndexEstimate(PICKANDS, k, None, math.nan, raw, failure)
    return TailIndexEstimate(PICKANDS, k, raw, pickands_variance(raw), raw)


def pickands_gamma(ts: TransformedSample, k: int) -> float:
    """Pickands estimate of the extreme value index ``gamma = -1/rho`` (negative here)."""
    _check_pickands_k(ts, k)
    q1, q2, q4 = ts.top(k), ts.top(2 * k), ts.top(4 * k)
    return math.log((q1 - q2) / (q2 - q4)) / LOG2


def moment_sums(ts: TransformedSample, k: int) -> MomentSums:
    if ts.n_x == 0:
        raise EmptyConditioningSet(ts.query)
    if not 1 <= k <= ts.n_x - 1:
        raise ThresholdOutOfRange(k, 1, ts.n_x - 1)
    top = ts.top_values(k + 1)
    ref = float(top[k])
    if not ref > 0:
        raise NonpositiveThresholdValue(
            f"Z_(n-k) = {ref} at k={k}; log-spacings need a positive reference value"
        )
    logs = ts.log_desc
    d = logs[:k] - logs[k]
    return MomentSums(float(d.mean()), float(np.mean(d * d)), k)


def _moment_from_sums(s: MomentSums) -> tuple[float, Optional[str]]:
    m1, m2 = s.m1, s.m2
    if not m2 > 0:
        return math.nan, DEGENERATE_SPACINGS
    shape = 1.0 - m1 * m1 / m2
    if shape == 0:
        return math.nan, DEGENERATE_SPACINGS
    brace = m1 + 1.0 - 0.5 / shape
    if brace == 0:
        return math.nan, DEGENERATE_SPACINGS
    raw = -1.0 / brace
    if not raw > 0:
        return raw, NONPOSITIVE_ESTIMATE
    return raw, None


def moment_rho_from_sums(s: MomentSums) -> TailIndexEstimate:
    raw, failure = _moment_from_sums(s)
    if failure:
        return TailIndexEstimate(MOMENT, s.k, None, math.nan, raw, failure)
    return TailIndexEstimate(MOMENT, s.k, raw, moment_variance(raw), raw)


def moment_rho(ts: TransformedSample, k: int) -> TailIndexEstimate:
    """Moment-type estimate; raises if ``Z_(n-k) <= 0``, flags degenerate algebra in-band."""
    return moment_rho_from_sums(moment_sums(ts, k))


def rho_confidence_interval(est: TailIndexEstimate, level: float = 0.95) -> Interval:
    """Plug-in normal interval ``rho +/- z * sqrt(variance(rho) / k)``.

    The variance is evaluated at the estimate itself. Raises on a failed estimate.
    """
    if not est.ok or est.rho is None:
        raise InvalidParameter(f"no confidence interval for a failed estimate ({est.failure})")
    if est.k < 1:
        raise ThresholdOutOfRange(est.k, 1, math.inf)
    half = z_quantile(level) * math.sqrt(est.variance / est.k)
    vid = "sigma2_pickands" if est.kind == PICKANDS else "var_moment"
    return Interval(est.rho - half, est.rho + half, level, vid)


def with_ci(est: TailIndexEstimate, level: float = 0.95) -> TailIndexEstimate:
    """Attach a confidence interval when the estimate succeeded, else return it unchanged."""
    if not est.ok:
        return est
    return replace(est, ci=rho_confidence_interval(est, level))


def pickands_plot(ts: TransformedSample) -> list[tuple[int, TailIndexEstimate]]:
    """Pickands estimates at every ``k`` with ``1 <= k < N_x / 4``."""
    if ts.n_x < 5:
        raise ThresholdOutOfRange(ts.n_x, 5, math.inf, what="N_x")
    ks = [k for k in range(1, ts.n_x) if 4 * k < ts.n_x and 4 * k - 1 <= ts.n_x]
    return [(k, pickands_rho(ts, k)) for k in ks]
