"""Frontier estimators built on upper order statistics of the transformed sample.

Notation: ``Q_j = Z_(n-j+1)`` is the j-th largest transformed output, so that
``Q_k`` is the empirical conditional quantile at level ``1 - (k-1)/N_x``.

* :func:`pickands_star` and :func:`known_rho_star` extrapolate from ``Q_k``
  by ``(Q_k - Q_2k) / (2**(1/rho) - 1)`` with estimated or known ``rho``;
* :func:`moment_endpoint` extrapolates from ``Z_(n-k)`` with the log-spacing
  moments;
* :func:`known_ell_ci` corrects ``Q_k`` by ``(k / (n ell))**(1/rho)`` when the
  whole tail ``F_X(x)[1 - F(y|x)] ~ ell (phi(x) - y)**rho`` is known.

All intervals are normal with plug-in variance evaluated at the ``rho`` used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import TransformedSample, order_stat_quantile
from .errors import (
    DEGENERATE_SPACINGS,
    EmptyConditioningSet,
    InvalidParameter,
    ThresholdOutOfRange,
)
from .tail_index import (
    MOMENT,
    PICKANDS,
    Interval,
    moment_rho_from_sums,
    moment_sums,
    pickands_rho,
    moment_rho,
    z_quantile,
)

FDH = "FDH"
ORDER_STAT = "OrderStat"
PICKANDS_STAR = "PickandsStar"
KNOWN_RHO_STAR = "KnownRhoStar"
MOMENT_ENDPOINT = "MomentEndpoint"
EXTREME_QUANTILE = "ExtremeQuantile"
KNOWN_ELL = "KnownEll"

_FLOOR_SNAP = 1e-9


@dataclass(frozen=True)
class FrontierEstimate:
    kind: str
    x: tuple[float, ...]
    value: float
    k: int
    rho_used: Optional[float] = None
    ci: Optional[Interval] = None
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _check_positive(name, v):
    if not (v > 0 and math.isfinite(v)):
        raise InvalidParameter(f"{name} must be finite and > 0, got {v}")


def v1(rho: float) -> float:
    """Variance for the extreme-quantile interval centred at ``Q_k``."""
    _check_positive("rho", rho)
    return rho ** -2 * 2.0 ** (1.0 - 2.0 / rho) / (2.0 ** (-1.0 / rho) - 1.0) ** 2


def v2(rho: float) -> float:
    """Variance of the Pickands endpoint estimator (estimated rho)."""
    _check_positive("rho", rho)
    return 3.0 * rho ** -2 * 2.0 ** (-1.0 - 2.0 / rho) / (2.0 ** (-1.0 / rho) - 1.0) ** 6


def v3(rho: float) -> float:
    """Variance of the endpoint estimator with known rho."""
    _check_positive("rho", rho)
    return rho ** -2 * 2.0 ** (-2.0 / rho) / (2.0 ** (-1.0 / rho) - 1.0) ** 4


def v4(rho: float) -> float:
    _check_positive("rho", rho)
    return (1.0 + 1.0 / rho) ** 2


def v5(rho: float) -> float:
    """Variance of the moment endpoint estimator."""
    _check_positive("rho", rho)
    r = rho
    brace = 4.0 - 8.0 * (2.0 + r) / (3.0 + r) + (11.0 + 5.0 * r) * (2.0 + r) / ((3.0 + r) * (4.0 + r))
    return r * r * (r / (2.0 + r) + r * (2.0 + r) * brace - 4.0 * r / (3.0 + r))


def floor_rank(t: float) -> int:
    """``[t]`` with products like ``(k/n) * n`` snapped back to ``k``."""
    return math.floor(t + _FLOOR_SNAP * max(1.0, abs(t)))


def _require_nx(ts: TransformedSample) -> None:
    if ts.n_x == 0:
        raise EmptyConditioningSet(ts.query)


def _check_k_for_double(ts: TransformedSample, k: int) -> None:
    # Q_2k must exist: 2k - 1 <= N_x
    _require_nx(ts)
    hi = (ts.n_x + 1) // 2
    if not 1 <= k <= hi:
        raise ThresholdOutOfRange(k, 1, hi)


def fdh_estimate(ts: TransformedSample) -> FrontierEstimate:
    return FrontierEstimate(FDH, ts.query, order_stat_quantile(ts, 0), 0)


def robust_frontier(ts: TransformedSample, k: int) -> FrontierEstimate:
    """Order-statistic frontier ``Z_(n-k)``; no interval (non-normal limit)."""
    return FrontierEstimate(ORDER_STAT, ts.query, order_stat_quantile(ts, k), k)


def _extrapolated(kind, ts, k, rho, variance, variance_id, level, rho_used=None):
    q1, q2 = ts.top(k), ts.top(2 * k)
    spacing = q1 - q2
    if not spacing > 0:
        return FrontierEstimate(kind, ts.query, q1, k, rho_used, None, DEGENERATE_SPACINGS)
    value = q1 + spacing / (2.0 ** (1.0 / rho) - 1.0)
    half = z_quantile(level) * math.sqrt(variance) * spacing / math.sqrt(2 * k)
    ci = Interval(value - half, value + half, level, variance_id)
    return FrontierEstimate(kind, ts.query, value, k, rho_used, ci)


def pickands_star(ts: TransformedSample, k: int, level: float = 0.95) -> FrontierEstimate:
    """Endpoint estimator with the Pickands estimate of rho at the same ``k``."""
    est = pickands_rho(ts, k)
    if not est.ok:
        return FrontierEstimate(PICKANDS_STAR, ts.query, math.nan, k, None, None, est.failure)
    return _extrapolated(PICKANDS_STAR, ts, k, est.rho, v2(est.rho), "V2", level, est.rho)


def known_rho_star(ts: TransformedSample, k: int, rho: float, level: float = 0.95) -> FrontierEstimate:
    """Endpoint estimator with a known (or externally supplied) tail index ``rho``.

    The estimate is ``a * Q_k + b * Q_2k`` with weights depending only on
    ``rho``, hence location-scale equivariant in ``Y``. With tied ``Q_k = Q_2k``
    the point estimate ``Q_k`` is returned flagged and without interval.
    """
    _check_positive("rho", rho)
    _check_k_for_double(ts, k)
    return _extrapolated(KNOWN_RHO_STAR, ts, k, rho, v3(rho), "V3", level, rho)


def moment_endpoint(ts: TransformedSample, k: int, level: float = 0.95) -> FrontierEstimate:
    """``Z_(n-k) * (1 + M1 * (1 + rho_tilde))`` with the V5 interval."""
    sums = moment_sums(ts, k)
    est = moment_rho_from_sums(sums)
    if not est.ok:
        return FrontierEstimate(MOMENT_ENDPOINT, ts.query, math.nan, k, None, None, est.failure)
    rho = est.rho
    base = order_stat_quantile(ts, k)
    value = base * (1.0 + sums.m1 * (1.0 + rho))
    half = z_quantile(level) * math.sqrt(v5(rho)) * sums.m1 * (1.0 + 1.0 / rho) * base / math.sqrt(k)
    return FrontierEstimate(
        MOMENT_ENDPOINT, ts.query, value, k, rho, Interval(value - half, value + half, level, "V5")
    )


def known_ell_ci(
    ts: TransformedSample, k: int, rho: float, ell: float, level: float = 0.95
) -> FrontierEstimate:
    """Bias-corrected ``Q_k`` and its normal interval when ``ell`` and ``rho`` are known.

    The correction ``(k / (n * ell)) ** (1/rho)`` uses the FULL sample size
    ``n``: ``ell`` already absorbs ``F_X(x)``. Using ``N_x`` here is wrong.
    """
    _check_positive("rho", rho)
    _check_positive("ell", ell)
    _require_nx(ts)
    if not 1 <= k <= ts.n_x:
        raise ThresholdOutOfRange(k, 1, ts.n_x)
    shift = (k / (ts.n * ell)) ** (1.0 / rho)
    value = ts.top(k) + shift
    half = z_quantile(level) * shift / (rho * math.sqrt(k))
    return FrontierEstimate(
        KNOWN_ELL, ts.query, value, k, rho, Interval(value - half, value + half, level, "known_ell")
    )


def known_ell_statistic(ts: TransformedSample, k: int, rho: float, ell: float, truth: float) -> float:
    """Standardized statistic ``rho sqrt(k) / s * (Q_k + s - truth)``, ``s = (k/(n ell))**(1/rho)``.

    Asymptotically standard normal.
    """
    est = known_ell_ci(ts, k, rho, ell)
    shift = (k / (ts.n * ell)) ** (1.0 / rho)
    return rho * math.sqrt(k) / shift * (est.value - truth)


def _tail_rank(ts: TransformedSample, p_n: float) -> int:
    if not 0 < p_n < 1:
        raise InvalidParameter(f"p_n must lie in (0, 1), got {p_n}")
    return floor_rank(ts.n * p_n)


def extreme_quantile_ci_pickands(ts: TransformedSample, p_n: float, level: float = 0.95) -> FrontierEstimate:
    """Interval for the high quantile frontier ``phi_{1 - p_n / F_X(x)}(x)``.

    ``k_n = [n p_n]``; centre ``Q_{k_n}``, variance V1 at the Pickands
    estimate of rho at ``k_n``.
    """
    k = _tail_rank(ts, p_n)
    est = pickands_rho(ts, k)
    center = ts.top(k)
    if not est.ok:
        return FrontierEstimate(EXTREME_QUANTILE, ts.query, center, k, None, None, est.failure)
    spacing = center - ts.top(2 * k)
    half = z_quantile(level) * math.sqrt(v1(est.rho)) * spacing / math.sqrt(2 * k)
    return FrontierEstimate(
        EXTREME_QUANTILE, ts.query, center, k, est.rho, Interval(center - half, center + half, level, "V1")
    )


def extreme_quantile_ci_moment(ts: TransformedSample, p_n: float, level: float = 0.95) -> FrontierEstimate:
    """Interval for ``phi_{1 - p_n / F_X(x)}(x)`` centred at ``Z_(n-k_n)`` with variance V4."""
    k = _tail_rank(ts, p_n)
    sums = moment_sums(ts, k)
    center = order_stat_quantile(ts, k)
    est = moment_rho_from_sums(sums)
    if not est.ok or not sums.m1 > 0:
        failure = est.failure or DEGENERATE_SPACINGS
        return FrontierEstimate(EXTREME_QUANTILE, ts.query, center, k, None, None, failure)
    half = z_quantile(level) * math.sqrt(v4(est.rho)) * sums.m1 * center / math.sqrt(k)
    return FrontierEstimate(
        EXTREME_QUANTILE, ts.query, center, k, est.rho, Interval(center - half, center + half, level, "V4")
    )


def two_step_known_rho(
    ts: TransformedSample,
    k_rho: int,
    k_front: int,
    rho_source: str = MOMENT,
    level: float = 0.95,
) -> FrontierEstimate:
    """Estimate rho at ``k_rho``, then use it as if known at ``k_front``."""
    if rho_source == PICKANDS:
        est = pickands_rho(ts, k_rho)
    elif rho_source == MOMENT:
        est = moment_rho(ts, k_rho)
    else:
        raise InvalidParameter(f"unknown rho source {rho_source!r}")
    if not est.ok:
        _check_k_for_double(ts, k_front)
        return FrontierEstimate(KNOWN_RHO_STAR, ts.query, math.nan, k_front, None, None, est.failure)
    return known_rho_star(ts, k_front, est.rho, level)
