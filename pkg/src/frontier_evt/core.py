"""Datasets, componentwise dominance, conditional empirical quantiles and FDH.

For a query point ``x`` every estimator in this package works on the
transformed sample ``Z_i = Y_i * 1(X_i <= x)``. Its upper order statistics
coincide with the empirical conditional quantiles of ``Y`` given ``X <= x``::

    conditional_quantile(ds, 1 - k / N_x, x) == Z_(n-k),   0 <= k <= N_x - 1

and its maximum is the FDH frontier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyConditioningSet, InvalidParameter, ThresholdOutOfRange

# Quantile levels within this relative distance of a grid point j/N_x snap to it,
# so that 1 - k/N_x evaluated in floating point still selects rank N_x - k.
_LEVEL_SNAP = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Observation:
    x: tuple[float, ...]
    y: float

    def __post_init__(self):
        xs = tuple(float(v) for v in np.atleast_1d(self.x))
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "y", float(self.y))
        if not xs:
            raise InvalidParameter("observation needs at least one input component")
        if not all(math.isfinite(v) and v >= 0 for v in xs):
            raise InvalidParameter(f"inputs must be finite and >= 0, got {xs}")
        if not (math.isfinite(self.y) and self.y >= 0):
            raise InvalidParameter(f"output must be finite and >= 0, got {self.y}")


class Dataset:
    """Immutable sample of ``n`` observations ``(X_i, Y_i)`` with ``X_i`` in R_+^p.

    Inputs are stored as an ``(n, p)`` float array and outputs as an ``(n,)``
    array; both are read-only.
    """

    __slots__ = ("_x", "_y")

    def __init__(self, x, y):
        x = np.array(x, dtype=float)
        y = np.array(y, dtype=float).reshape(-1)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise DimensionMismatch(f"inputs must be a 2-d array, got shape {x.shape}")
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"{x.shape[0]} input rows but {y.shape[0]} outputs")
        if y.shape[0] < 1:
            raise InvalidParameter("dataset needs at least one observation")
        if x.shape[1] < 1:
            raise InvalidParameter("dataset needs at least one input dimension")
        if not (np.all(np.isfinite(x)) and np.all(x >= 0)):
            raise InvalidParameter("inputs must be finite and >= 0")
        if not (np.all(np.isfinite(y)) and np.all(y >= 0)):
            raise InvalidParameter("outputs must be finite and >= 0")
        self._x = _frozen(x)
        self._y = _frozen(y)

    @classmethod
    def from_observations(cls, observations: Iterable[Observation]) -> "Dataset":
        obs = list(observations)
        if not obs:
            raise InvalidParameter("dataset needs at least one observation")
        p = len(obs[0].x)
        if any(len(o.x) != p for o in obs):
            raise DimensionMismatch("observations have differing input dimensions")
        return cls([o.x for o in obs], [o.y for o in obs])

    @property
    def x(self) -> np.ndarray:
        return self._x

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def n(self) -> int:
        return self._y.shape[0]

    @property
    def input_dim(self) -> int:
        return self._x.shape[1]

    @property
    def observations(self) -> list[Observation]:
        return [Observation(tuple(xi), yi) for xi, yi in zip(self._x, self._y)]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, p={self.input_dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self._x, other._x) and np.array_equal(self._y, other._y)

    __hash__ = None


def _query(ds: Dataset, x) -> np.ndarray:
    q = np.atleast_1d(np.asarray(x, dtype=float))
    if q.ndim != 1 or q.shape[0] != ds.input_dim:
        raise DimensionMismatch(f"query point has {q.size} components, dataset has p={ds.input_dim}")
    return q


def dominates(x: Sequence[float], xi: Sequence[float]) -> bool:
    """True iff ``xi <= x`` componentwise (``x`` dominates ``xi``)."""
    a = np.atleast_1d(np.asarray(x, dtype=float))
    b = np.atleast_1d(np.asarray(xi, dtype=float))
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(b <= a))


def dominated_mask(ds: Dataset, x) -> np.ndarray:
    q = _query(ds, x)
    return np.all(ds.x <= q, axis=1)


def empirical_fx(ds: Dataset, x) -> float:
    """Empirical joint CDF of the inputs, ``#{i : X_i <= x} / n``."""
    return int(np.count_nonzero(dominated_mask(ds, x))) / ds.n


def _dominated_outputs(ds: Dataset, x) -> np.ndarray:
    mask = dominated_mask(ds, x)
    if not mask.any():
        raise EmptyConditioningSet(_query(ds, x))
    return ds.y[mask]


def conditional_cdf(ds: Dataset, y: float, x) -> float:
    ys = _dominated_outputs(ds, x)
    return int(np.count_nonzero(ys <= y)) / ys.shape[0]


def quantile_rank(alpha: float, n_x: int) -> int:
    """Rank ``j`` (1-based) of the inf-quantile: smallest j with ``j / n_x >= alpha``."""
    if not (0 < alpha <= 1):
        raise InvalidParameter(f"quantile level must lie in (0, 1], got {alpha}")
    t = alpha * n_x
    j = math.ceil(t - _LEVEL_SNAP * max(1.0, t))
    return min(max(j, 1), n_x)


def conditional_quantile(ds: Dataset, alpha: float, x) -> float:
    """Empirical conditional ``alpha``-quantile ``inf{y >= 0 : F(y|x) >= alpha}``.

    Realized as the ``ceil(alpha * N_x)``-th smallest output among dominated
    observations; never interpolated.
    """
    ys = np.sort(_dominated_outputs(ds, x))
    return float(ys[quantile_rank(alpha, ys.shape[0]) - 1])


def fdh(ds: Dataset, x) -> float:
    """Free disposal hull frontier: ``max{Y_i : X_i <= x}``."""
    return float(_dominated_outputs(ds, x).max())


@dataclass(frozen=True, eq=False)
class TransformedSample:
    """Sorted transformed outputs ``Z_i = Y_i 1(X_i <= x)`` at one query point.

    ``z_sorted`` is ascending with length ``n``; ``n_x`` is the number of
    dominated observations.
    """

    query: tuple[float, ...]
    z_sorted: np.ndarray
    n_x: int

    @property
    def n(self) -> int:
        return self.z_sorted.shape[0]

    def order_stat(self, i: int) -> float:
        """``Z_(i)``, the i-th smallest value, 1-based."""
        return float(self.z_sorted[i - 1])

    def top(self, j: int) -> float:
        """The j-th largest value ``Z_(n-j+1)``, ``1 <= j <= n_x + 1``.

        ``j = n_x + 1`` is the empirical quantile at level 0, which is 0; it
        equals ``Z_(n-n_x)`` whenever that order statistic exists.
        """
        if not 1 <= j <= self.n_x + 1:
            raise ThresholdOutOfRange(j, 1, self.n_x + 1, what="upper rank")
        if j > self.n:
            return 0.0
        return float(self.z_sorted[self.n - j])

    def top_values(self, count: int) -> np.ndarray:
        """Largest ``count`` values in descending order (a view)."""
        return self.z_sorted[::-1][:count]

    @cached_property
    def log_desc(self) -> np.ndarray:
        """``log`` of the values in descending order; ``-inf`` for zeros."""
        with np.errstate(divide="ignore"):
            return _frozen(np.log(self.z_sorted[::-1]))


def transform(ds: Dataset, x) -> TransformedSample:
    q = _query(ds, x)
    mask = np.all(ds.x <= q, axis=1)
    z = np.where(mask, ds.y, 0.0)
    z.sort(kind="stable")
    return TransformedSample(tuple(float(v) for v in q), _frozen(z), int(np.count_nonzero(mask)))


def order_stat_quantile(ts: TransformedSample, k: int) -> float:
    """``Z_(n-k)``: the empirical conditional quantile at level ``1 - k / N_x``."""
    if ts.n_x == 0:
        raise EmptyConditioningSet(ts.query)
    if not 0 <= k <= ts.n_x - 1:
        raise ThresholdOutOfRange(k, 0, ts.n_x - 1)
    return float(ts.z_sorted[ts.n - 1 - k])


DEFAULT_GRID_LEVELS = tuple(round(0.05 * i, 2) for i in range(1, 20))


def input_quantile_grid(ds: Dataset, levels: Sequence[float] = DEFAULT_GRID_LEVELS) -> list[tuple[float, ...]]:
    """Query points at empirical quantiles of the observed inputs (``p = 1`` only).

    Uses the same inf-definition as :func:`conditional_quantile`, so every grid
    point is an observed input value and has ``N_x >= 1``. Duplicates are dropped.
    """
    if ds.input_dim != 1:
        raise DimensionMismatch("a default input grid exists only for p = 1; pass explicit query points")
    xs = np.sort(ds.x[:, 0])
    out: list[tuple[float, ...]] = []
    for a in levels:
        v = (float(xs[quantile_rank(a, xs.shape[0]) - 1]),)
        if v not in out:
            out.append(v)
    return out
