"""Seeded generators for the two analytic scenarios and their exact truths.

Random numbers come from numpy's ``PCG64`` bit generator (PCG XSL RR 128/64),
seeded through ``SeedSequence``. Replication ``r`` of base seed ``s`` uses
``SeedSequence(s, spawn_key=(r,))`` so every replication has an independent,
index-derived stream and results do not depend on execution order.

Scenarios (one input, ``p = 1``):

``triangle``
    ``(X, Y)`` uniform on ``{0 <= y <= x <= 1}``. Sampled as
    ``X = max(U1, U2)`` (density ``2x``) and ``Y = X * U3``. Frontier
    ``phi(x) = x``; ``F_X(x)[1 - F(y|x)] = (x - y)**2`` so ``ell = 1``,
    ``rho = 2``.
``cobb-douglas``
    ``Y = sqrt(X) * exp(-U)``, ``X ~ U[0, 1]``, ``U ~ Exp(3)`` drawn by
    inverse CDF ``-log(1 - V) / 3``. Frontier ``sqrt(x)``,
    ``F(y|x) = 3 y**2 / x - 2 y**3 / x**1.5``, ``rho = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Dataset
from .errors import ConfigError, InvalidParameter

TRIANGLE = "triangle"
COBB_DOUGLAS = "cobb-douglas"
SCENARIOS = (TRIANGLE, COBB_DOUGLAS)

_ALIASES = {
    "triangle": TRIANGLE,
    "uniform-triangle": TRIANGLE,
    "uniformtriangle": TRIANGLE,
    "cobb-douglas": COBB_DOUGLAS,
    "cobbdouglas": COBB_DOUGLAS,
    "cobb_douglas": COBB_DOUGLAS,
}


def scenario_kind(name: str) -> str:
    try:
        return _ALIASES[name.strip().lower()]
    except KeyError:
        raise ConfigError(f"unknown scenario {name!r}; choose one of {', '.join(SCENARIOS)}") from None


def make_rng(seed: int, replication: Optional[int] = None) -> np.random.Generator:
    if replication is None:
        ss = np.random.SeedSequence(int(seed))
    else:
        ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.PCG64(ss))


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidParameter(f"sample size must be a positive integer, got {n}")
    return int(n)


def sample_uniform_triangle(n: int, rng: np.random.Generator) -> Dataset:
    n = _check_n(n)
    u = rng.random((n, 3))
    x = np.maximum(u[:, 0], u[:, 1])
    return Dataset(x, x * u[:, 2])


def sample_cobb_douglas(n: int, rng: np.random.Generator) -> Dataset:
    n = _check_n(n)
    u = rng.random((n, 2))
    x = u[:, 0]
    expo = -np.log1p(-u[:, 1]) / 3.0
    return Dataset(x, np.sqrt(x) * np.exp(-expo))


def gen_uniform_triangle(n: int, seed: int) -> Dataset:
    return sample_uniform_triangle(n, make_rng(seed))


def gen_cobb_douglas(n: int, seed: int) -> Dataset:
    return sample_cobb_douglas(n, make_rng(seed))


def inject_outlier(ds: Dataset, x0, y0: float) -> Dataset:
    """Return a copy of ``ds`` with one extra observation ``(x0, y0)`` appended."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape[0] != ds.input_dim:
        raise InvalidParameter(f"outlier has {x0.shape[0]} inputs, dataset has {ds.input_dim}")
    if np.any(x0 < 0) or y0 < 0:
        raise InvalidParameter("outlier coordinates must be >= 0")
    return Dataset(np.vstack([ds.x, x0]), np.append(ds.y, float(y0)))


@dataclass(frozen=True)
class GroundTruth:
    """Exact model quantities for a scenario (scalar input ``x``)."""

    frontier: Callable[[float], float]
    rho: Callable[[float], float]
    ell: Callable[[float], Optional[float]]
    conditional_cdf: Callable[[float, float], float]
    fx: Callable[[float], float]
    # Slowly varying factor L_x(z) in F_X(x)[1 - F(phi(x) - 1/z | x)] = L_x(z) z**-rho
    slowly_varying: Callable[[float, float], float]
    # phi_{1 - p / F_X(x)}(x)
    tail_quantile: Callable[[float, float], float]


def _scalar(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.reshape(-1)[0]) if x.size == 1 else float(x)


def _tri_frontier(x):
    return min(max(_scalar(x), 0.0), 1.0)


def _tri_fx(x):
    return _tri_frontier(x) ** 2


def _tri_cdf(y, x):
    t = _tri_frontier(x)
    if t <= 0:
        raise InvalidParameter("conditional distribution undefined where F_X(x) = 0")
    if y < 0:
        return 0.0
    if y >= t:
        return 1.0
    return 1.0 - (t - y) ** 2 / t ** 2


def _tri_tail_quantile(p, x):
    t = _tri_frontier(x)
    if not 0 < p <= t * t:
        raise InvalidParameter(f"tail probability p must lie in (0, F_X(x)], got {p}")
    return t - math.sqrt(p)


def _cd_frontier(x):
    return math.sqrt(min(max(_scalar(x), 0.0), 1.0))


def _cd_fx(x):
    return min(max(_scalar(x), 0.0), 1.0)


def _cd_cdf(y, x):
    xx = _cd_fx(x)
    if xx <= 0:
        raise InvalidParameter("conditional distribution undefined where F_X(x) = 0")
    if y < 0:
        return 0.0
    if y >= math.sqrt(xx):
        return 1.0
    return 3.0 * y * y / xx - 2.0 * y ** 3 / xx ** 1.5


def _cd_L(x, z):
    phi = _cd_frontier(x)
    return _cd_fx(x) * (3.0 * phi - 2.0 / z) / phi ** 3


def _cd_tail_quantile(p, x):
    from scipy.optimize import brentq

    fx = _cd_fx(x)
    if not 0 < p <= fx:
        raise InvalidParameter(f"tail probability p must lie in (0, F_X(x)], got {p}")
    phi = math.sqrt(fx)
    target = 1.0 - p / fx
    if target <= 0:
        return 0.0
    return brentq(lambda y: _cd_cdf(y, x) - target, 0.0, phi, xtol=1e-15, rtol=1e-15)


TRUTHS = {
    TRIANGLE: GroundTruth(
        frontier=_tri_frontier,
        rho=lambda x: 2.0,
        ell=lambda x: 1.0,
        conditional_cdf=_tri_cdf,
        fx=_tri_fx,
        slowly_varying=lambda x, z: 1.0,
        tail_quantile=_tri_tail_quantile,
    ),
    COBB_DOUGLAS: GroundTruth(
        frontier=_cd_frontier,
        rho=lambda x: 2.0,
        ell=lambda x: None,
        conditional_cdf=_cd_cdf,
        fx=_cd_fx,
        slowly_varying=_cd_L,
        tail_quantile=_cd_tail_quantile,
    ),
}

_SAMPLERS = {TRIANGLE: sample_uniform_triangle, COBB_DOUGLAS: sample_cobb_douglas}


@dataclass(frozen=True)
class Scenario:
    kind: str
    n: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", scenario_kind(self.kind))
        object.__setattr__(self, "n", _check_n(self.n))

    @property
    def truth(self) -> GroundTruth:
        return TRUTHS[self.kind]

    def generate(self, replication: Optional[int] = None) -> Dataset:
        return _SAMPLERS[self.kind](self.n, make_rng(self.seed, replication))


def ground_truth(kind: str) -> GroundTruth:
    return TRUTHS[scenario_kind(kind)]
