"""Data-driven choice of the threshold ``k_n(x)`` by rolling-window stability.

An estimator is swept over a grid of thresholds; the sample standard
deviation of the estimates is computed over every run of ``2m`` successive
grid entries, and the window with the smallest deviation wins. The chosen
threshold is the smaller of the two centre entries of that window.

Grids and window half-widths ``m``:

==============  ==================================  ============================
target          grid (in sweep order)               m
==============  ==================================  ============================
Pickands rho    ``[N_x/4] - j + 1``, j = 1..[N_x/4]  ``[sqrt(N_x/4)]``
moment rho      ``N_x - j``, j = 1..N_x              ``[sqrt(N_x)]``
frontier        ``j``, j = 1..[sqrt(N_x)]            ``max(3, [sqrt(N_x)/20])``
==============  ==================================  ============================

Windows holding any failed estimate are disqualified. Ties go to the first
window in sweep order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import TransformedSample
from .errors import FrontierError, InsufficientStableRange
from .estimators import FrontierEstimate
from .tail_index import TailIndexEstimate, moment_rho, pickands_rho

PICKANDS_RHO = "PickandsRho"
MOMENT_RHO = "MomentRho"
FRONTIER = "Frontier"

FrontierEvaluator = Callable[[int], Union[FrontierEstimate, TailIndexEstimate, float, None]]


@dataclass(frozen=True, eq=False)
class KSelection:
    target: str
    ks: np.ndarray
    estimates: np.ndarray
    window_halfwidth: int
    rolling_sd: np.ndarray
    chosen_index: int
    chosen_k: int

    @property
    def window(self) -> int:
        return 2 * self.window_halfwidth

    @property
    def ok(self) -> np.ndarray:
        return np.isfinite(self.estimates)

    @property
    def grid(self) -> list[tuple[int, float]]:
        return [(int(k), float(v)) for k, v in zip(self.ks, self.estimates)]

    @property
    def chosen_estimate(self) -> float:
        return float(self.estimates[self.chosen_index])


def _as_value(result) -> float:
    if result is None:
        return math.nan
    if isinstance(result, (FrontierEstimate, TailIndexEstimate)):
        return float(result.value) if result.ok else math.nan
    return float(result)


def rolling_sd(values: np.ndarray, window: int) -> np.ndarray:
    """Unbiased SD over every run of ``window`` successive values; nan if any is nan."""
    values = np.asarray(values, dtype=float)
    if window < 2 or window > values.shape[0]:
        return np.empty(0)
    windows = sliding_window_view(values, window)
    out = np.full(windows.shape[0], np.nan)
    good = np.all(np.isfinite(windows), axis=1)
    if good.any():
        out[good] = np.std(windows[good], axis=1, ddof=1)
    return out


def select_from_grid(target: str, ks: Sequence[int], estimates: Sequence[float], halfwidth: int) -> KSelection:
    ks = np.asarray(ks, dtype=int)
    est = np.asarray(estimates, dtype=float)
    window = 2 * halfwidth
    sds = rolling_sd(est, window)
    if sds.size == 0 or not np.isfinite(sds).any():
        raise InsufficientStableRange(
            f"{target}: no window of {window} successive successful estimates among {ks.size} grid points"
        )
    start = int(np.nanargmin(sds))
    centre = start + halfwidth - 1
    pick = centre if ks[centre] <= ks[centre + 1] else centre + 1
    for a in (ks, est, sds):
        a.setflags(write=False)
    return KSelection(target, ks, est, halfwidth, sds, pick, int(ks[pick]))


def _sweep(ks, evaluate) -> list[float]:
    out = []
    for k in ks:
        try:
            out.append(_as_value(evaluate(int(k))))
        except FrontierError:
            out.append(math.nan)
    return out


def pickands_grid(n_x: int) -> np.ndarray:
    top = n_x // 4
    return top - np.arange(1, top + 1) + 1


def moment_grid(n_x: int) -> np.ndarray:
    return n_x - np.arange(1, n_x + 1)


def frontier_grid(n_x: int) -> np.ndarray:
    return np.arange(1, math.isqrt(n_x) + 1)


def select_k_pickands_rho(ts: TransformedSample) -> KSelection:
    if ts.n_x < 16:
        raise InsufficientStableRange(f"Pickands selection needs N_x >= 16, got {ts.n_x}")
    ks = pickands_grid(ts.n_x)
    m = math.isqrt(ts.n_x // 4)
    return select_from_grid(PICKANDS_RHO, ks, _sweep(ks, lambda k: pickands_rho(ts, k)), m)


def select_k_moment_rho(ts: TransformedSample) -> KSelection:
    if ts.n_x < 9:
        raise InsufficientStableRange(f"moment selection needs N_x >= 9, got {ts.n_x}")
    ks = moment_grid(ts.n_x)
    m = math.isqrt(ts.n_x)
    return select_from_grid(MOMENT_RHO, ks, _sweep(ks, lambda k: moment_rho(ts, k)), m)


def select_k_frontier(ts: TransformedSample, estimator: FrontierEvaluator) -> KSelection:
    """Stability selection for any frontier evaluator ``k -> estimate``.

    The evaluator may return a :class:`FrontierEstimate`, a plain float (nan
    meaning failure) or ``None``; package errors raised at a given ``k`` count
    as failures at that ``k``.
    """
    ks = frontier_grid(ts.n_x)
    m = max(3, math.isqrt(ts.n_x) // 20)
    return select_from_grid(FRONTIER, ks, _sweep(ks, estimator), m)
