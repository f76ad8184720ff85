"""Monte Carlo harness: replicate a scenario, run estimators, aggregate errors.

For every query point and estimator the report gives the mean realized
threshold, bias, MSE, average confidence interval length, empirical coverage
of the exact truth and the fraction of failed replications. Failed
replications (degenerate spacings, thresholds out of range, unstable
selection) are excluded from the error statistics and only counted in
``failure_rate``.

Replication ``r`` draws its sample from a stream derived from
``(base_seed, r)`` and results are reduced in replication order, so the
report is identical for any number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from . import estimators as fe
from .core import TransformedSample, transform
from .errors import ConfigError, FrontierError, InsufficientStableRange, InvalidParameter
from .kn_select import KSelection, select_k_frontier, select_k_moment_rho, select_k_pickands_rho
from .simgen import Scenario
from .tail_index import MOMENT, PICKANDS, moment_rho, pickands_rho, with_ci

FIXED, GRID, AUTO = "fixed", "grid", "auto"

FDH_NAME = "fdh"
ORDERSTAT = "orderstat"
PICKANDS_RHO = "pickands_rho"
MOMENT_RHO = "moment_rho"
PICKANDS_STAR = "pickands"
KNOWN_RHO = "knownrho"
MOMENT_ENDPOINT = "moment"
KNOWN_ELL = "knownell"
TWOSTEP = "twostep"

ESTIMATOR_NAMES = (
    FDH_NAME, ORDERSTAT, PICKANDS_RHO, MOMENT_RHO, PICKANDS_STAR,
    KNOWN_RHO, MOMENT_ENDPOINT, KNOWN_ELL, TWOSTEP,
)
_RHO_TARGETS = (PICKANDS_RHO, MOMENT_RHO)
_MOMENT_FAMILY = (MOMENT_RHO, MOMENT_ENDPOINT)

REPORT_COLUMNS = ("x", "estimator", "k_mean", "bias", "mse", "avg_ci_length", "coverage", "failure_rate")


def fdh_moment_oracle(k: int, n: int, rho: float, ell: float) -> float:
    """Leading term of ``E{phi(x) - FDH(x)}**k``: ``k/rho * (n ell)**(-k/rho) * Gamma(k/rho)``."""
    if int(k) != k or k < 1 or int(n) != n or n < 1:
        raise InvalidParameter(f"k and n must be positive integers, got k={k}, n={n}")
    if not (rho > 0 and ell > 0):
        raise InvalidParameter(f"rho and ell must be > 0, got rho={rho}, ell={ell}")
    return k / rho * (n * ell) ** (-k / rho) * float(gamma_fn(k / rho))


@dataclass(frozen=True)
class KPolicy:
    """How an estimator picks its threshold in each replication.

    ``fixed``: use ``value`` as is. ``grid``: the ``value``-th entry of the
    sweep grid (``[N_x/4] - j + 1`` for Pickands/known-rho estimators,
    ``N_x - j`` for moment estimators). ``auto``: stability selection.
    """

    kind: str = AUTO
    value: int = 1

    def __post_init__(self):
        if self.kind not in (FIXED, GRID, AUTO):
            raise ConfigError(f"unknown k policy {self.kind!r}")
        if self.kind != AUTO and (int(self.value) != self.value or self.value < (0 if self.kind == FIXED else 1)):
            raise ConfigError(f"invalid k policy value {self.value!r} for {self.kind}")

    @property
    def label(self) -> str:
        if self.kind == AUTO:
            return AUTO
        if self.kind == GRID:
            return f"grid:{self.value}"
        return str(self.value)

    @classmethod
    def parse(cls, text: str) -> "KPolicy":
        t = text.strip().lower()
        if t == AUTO:
            return cls(AUTO)
        try:
            if t.startswith("grid:"):
                return cls(GRID, int(t[5:]))
            return cls(FIXED, int(t))
        except ValueError:
            raise ConfigError(f"cannot parse k policy {text!r}; use an integer, grid:<j> or auto") from None


@dataclass(frozen=True)
class EstimatorSpec:
    name: str
    k: KPolicy = field(default_factory=KPolicy)
    rho: Optional[float] = None
    ell: Optional[float] = None
    rho_source: Optional[str] = None

    def __post_init__(self):
        if self.name not in ESTIMATOR_NAMES:
            raise ConfigError(f"unknown estimator {self.name!r}; choose from {', '.join(ESTIMATOR_NAMES)}")
        if self.name in (KNOWN_RHO, KNOWN_ELL) and not (self.rho and self.rho > 0):
            raise ConfigError(f"{self.name} needs a known rho > 0")
        if self.name == KNOWN_ELL and not (self.ell and self.ell > 0):
            raise ConfigError("knownell needs a known ell > 0")
        if self.name == TWOSTEP and self.rho_source not in (PICKANDS, MOMENT):
            raise ConfigError("twostep needs a rho source: pickands or moment")

    @property
    def label(self) -> str:
        base = self.name
        if self.name == KNOWN_RHO:
            base = f"{self.name}:{self.rho:g}"
        elif self.name == KNOWN_ELL:
            base = f"{self.name}:{self.rho:g}:{self.ell:g}"
        elif self.name == TWOSTEP:
            base = f"{self.name}:{self.rho_source.lower()}"
        if self.name == FDH_NAME:
            return base
        return f"{base}@{self.k.label}"

    @property
    def is_rho_target(self) -> bool:
        return self.name in _RHO_TARGETS

    @classmethod
    def parse(cls, text: str, default_k: Optional[KPolicy] = None) -> "EstimatorSpec":
        """Parse ``name[:args][@kpolicy]``, e.g. ``knownrho:2@grid:1`` or ``moment@200``."""
        body, _, kpart = text.strip().partition("@")
        k = KPolicy.parse(kpart) if kpart else (default_k or KPolicy())
        name, *args = body.strip().lower().split(":")
        try:
            if name == KNOWN_RHO:
                return cls(name, k, rho=float(args[0]))
            if name == KNOWN_ELL:
                return cls(name, k, rho=float(args[0]), ell=float(args[1]))
            if name == TWOSTEP:
                src = {"pickands": PICKANDS, "moment": MOMENT}.get(args[0] if args else "moment")
                return cls(name, k, rho_source=src)
        except (IndexError, ValueError):
            raise ConfigError(f"cannot parse estimator {text!r}") from None
        if args:
            raise ConfigError(f"estimator {name!r} takes no arguments: {text!r}")
        return cls(name, k)


def parse_estimators(text: str, default_k: Optional[KPolicy] = None) -> list[EstimatorSpec]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError("empty estimator list")
    return [EstimatorSpec.parse(t, default_k) for t in items]


@dataclass(frozen=True)
class Outcome:
    """One estimator evaluated on one transformed sample; ``value`` is nan on failure."""

    k: float
    value: float
    lo: float = math.nan
    hi: float = math.nan
    rho_used: float = math.nan
    reason: str = ""

    @property
    def ok(self) -> bool:
        return math.isfinite(self.value)

    @property
    def has_ci(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def _grid_k(spec: EstimatorSpec, n_x: int) -> int:
    j = spec.k.value
    if spec.name in _MOMENT_FAMILY:
        return n_x - j
    if spec.name == ORDERSTAT:
        return j - 1
    return n_x // 4 - j + 1


def _frontier_fn(spec: EstimatorSpec, ts: TransformedSample, level: float, rho: Optional[float] = None):
    name = spec.name
    if name == ORDERSTAT:
        return lambda k: fe.robust_frontier(ts, k)
    if name == PICKANDS_STAR:
        return lambda k: fe.pickands_star(ts, k, level)
    if name == MOMENT_ENDPOINT:
        return lambda k: fe.moment_endpoint(ts, k, level)
    if name == KNOWN_ELL:
        return lambda k: fe.known_ell_ci(ts, k, spec.rho, spec.ell, level)
    if name in (KNOWN_RHO, TWOSTEP):
        r = spec.rho if rho is None else rho
        return lambda k: fe.known_rho_star(ts, k, r, level)
    raise ConfigError(f"{name} is not a frontier estimator with a threshold")


def _rho_source(spec: EstimatorSpec) -> str:
    if spec.name == PICKANDS_RHO:
        return PICKANDS
    if spec.name == MOMENT_RHO:
        return MOMENT
    return spec.rho_source


def _rho_fn(source: str):
    return pickands_rho if source == PICKANDS else moment_rho


def select(spec: EstimatorSpec, ts: TransformedSample, level: float = 0.95, rho: Optional[float] = None) -> KSelection:
    """Run the stability selection that the ``auto`` policy would use for this estimator.

    For ``twostep`` this is the frontier stage with the plug-in ``rho``; when
    none is supplied the first stage is run with the estimator's k policy.
    """
    if spec.name == FDH_NAME:
        raise ConfigError("fdh has no threshold to select")
    if spec.is_rho_target:
        return select_k_pickands_rho(ts) if _rho_source(spec) == PICKANDS else select_k_moment_rho(ts)
    if spec.name == TWOSTEP and rho is None:
        k_rho, first = _first_stage(spec, ts, level)
        if not first.ok:
            raise InsufficientStableRange(f"first stage failed at k={k_rho}: {first.failure}")
        rho = first.rho
    return select_k_frontier(ts, _frontier_fn(spec, ts, level, rho))


def _first_stage(spec: EstimatorSpec, ts: TransformedSample, level: float):
    family = PICKANDS_RHO if spec.rho_source == PICKANDS else MOMENT_RHO
    k_rho = _resolve_k(spec, ts, level, family=family)
    return k_rho, _rho_fn(spec.rho_source)(ts, k_rho)


def _resolve_k(spec: EstimatorSpec, ts: TransformedSample, level: float, rho=None, family=None) -> int:
    if spec.k.kind == FIXED:
        return spec.k.value
    if spec.k.kind == GRID:
        return _grid_k(spec if family is None else EstimatorSpec(family, spec.k), ts.n_x)
    if family is not None:
        return select(EstimatorSpec(family, spec.k), ts, level).chosen_k
    return select(spec, ts, level, rho).chosen_k


def _from_frontier(est: fe.FrontierEstimate) -> Outcome:
    rho = est.rho_used if est.rho_used is not None else math.nan
    if not est.ok:
        return Outcome(est.k, math.nan, rho_used=rho, reason=est.failure)
    if est.ci is None:
        return Outcome(est.k, est.value, rho_used=rho)
    return Outcome(est.k, est.value, est.ci.lo, est.ci.hi, rho)


def evaluate(spec: EstimatorSpec, ts: TransformedSample, level: float = 0.95) -> Outcome:
    """Run one estimator with its k policy.

    Package errors (threshold out of range, empty conditioning set, unstable
    selection) become failed outcomes carrying the error message as reason.
    """
    try:
        return _evaluate(spec, ts, level)
    except FrontierError as err:
        return Outcome(math.nan, math.nan, reason=f"{type(err).__name__}: {err}")


def _evaluate(spec: EstimatorSpec, ts: TransformedSample, level: float) -> Outcome:
    if spec.name == FDH_NAME:
        return _from_frontier(fe.fdh_estimate(ts))
    if spec.is_rho_target:
        k = _resolve_k(spec, ts, level)
        est = with_ci(_rho_fn(_rho_source(spec))(ts, k), level)
        if not est.ok:
            return Outcome(k, math.nan, reason=est.failure)
        return Outcome(k, est.rho, est.ci.lo, est.ci.hi, est.rho)
    if spec.name == TWOSTEP:
        k_rho, first = _first_stage(spec, ts, level)
        if not first.ok:
            return Outcome(math.nan, math.nan, reason=f"first stage at k={k_rho}: {first.failure}")
        k = _resolve_k(spec, ts, level, rho=first.rho)
        return _from_frontier(fe.known_rho_star(ts, k, first.rho, level))
    fn = _frontier_fn(spec, ts, level)
    return _from_frontier(fn(_resolve_k(spec, ts, level)))


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    replications: int
    query_points: tuple[float, ...]
    estimators: tuple[EstimatorSpec, ...]
    ci_level: float = 0.95

    def __post_init__(self):
        object.__setattr__(self, "query_points", tuple(float(x) for x in self.query_points))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if not self.query_points:
            raise ConfigError("no query points")
        if not self.estimators:
            raise ConfigError("no estimators")
        if not 0 < self.ci_level < 1:
            raise ConfigError(f"ci level must lie in (0, 1), got {self.ci_level}")
        truth = self.scenario.truth
        for x in self.query_points:
            if not (math.isfinite(x) and truth.fx(x) > 0):
                raise ConfigError(f"query point x={x} has F_X(x) = 0 under the scenario")

    @property
    def sample_size(self) -> int:
        return self.scenario.n

    @property
    def base_seed(self) -> int:
        return self.scenario.seed


@dataclass(frozen=True)
class ReportCell:
    x: float
    estimator: str
    k_mean: float
    bias: float
    mse: float
    avg_ci_length: float
    coverage: float
    failure_rate: float
    nx_mean: float = math.nan
    n_ok: int = 0
    sd: float = math.nan

    @property
    def bias_se(self) -> float:
        """Monte Carlo standard error of ``bias``."""
        return self.sd / math.sqrt(self.n_ok) if self.n_ok > 0 else math.nan


@dataclass(frozen=True)
class ExperimentReport:
    cells: tuple[ReportCell, ...]
    replications: int = 0

    def cell(self, x: float, estimator: str) -> ReportCell:
        for c in self.cells:
            if c.estimator == estimator and math.isclose(c.x, x, rel_tol=1e-9, abs_tol=1e-12):
                return c
        raise KeyError((x, estimator))


def run_replication(cfg: ExperimentConfig, r: int) -> np.ndarray:
    """Outcomes of replication ``r`` as an array ``(points, estimators, 5)``: k, value, lo, hi, N_x."""
    ds = cfg.scenario.generate(r)
    out = np.full((len(cfg.query_points), len(cfg.estimators), 5), np.nan)
    for i, x in enumerate(cfg.query_points):
        ts = transform(ds, [x])
        for j, spec in enumerate(cfg.estimators):
            o = evaluate(spec, ts, cfg.ci_level)
            out[i, j] = (o.k, o.value, o.lo, o.hi, ts.n_x)
    return out


def _run_chunk(args):
    cfg, rs = args
    return np.stack([run_replication(cfg, r) for r in rs])


def _truth_for(cfg: ExperimentConfig, spec: EstimatorSpec, x: float) -> float:
    t = cfg.scenario.truth
    return t.rho(x) if spec.is_rho_target else t.frontier(x)


def summarize(values: np.ndarray, truth: float, lo: np.ndarray, hi: np.ndarray) -> tuple[float, ...]:
    """Bias, MSE, SD, average CI length and coverage over successful replications."""
    err = values - truth
    bias = float(np.mean(err))
    mse = float(np.mean(err * err))
    sd = float(np.std(err, ddof=1)) if err.size > 1 else 0.0
    has_ci = np.isfinite(lo) & np.isfinite(hi)
    if has_ci.any():
        avl = float(np.mean(hi[has_ci] - lo[has_ci]))
        cov = float(np.mean((lo[has_ci] <= truth) & (truth <= hi[has_ci])))
    else:
        avl = cov = math.nan
    return bias, mse, sd, avl, cov


def aggregate(cfg: ExperimentConfig, raw: np.ndarray) -> ExperimentReport:
    R = raw.shape[0]
    cells = []
    for i, x in enumerate(cfg.query_points):
        for j, spec in enumerate(cfg.estimators):
            k, v, lo, hi, nx = (raw[:, i, j, c] for c in range(5))
            ok = np.isfinite(v)
            n_ok = int(ok.sum())
            k_known = np.isfinite(k)
            k_mean = float(np.mean(k[k_known])) if k_known.any() else math.nan
            if n_ok:
                bias, mse, sd, avl, cov = summarize(v[ok], _truth_for(cfg, spec, x), lo[ok], hi[ok])
            else:
                bias = mse = sd = avl = cov = math.nan
            cells.append(
                ReportCell(x, spec.label, k_mean, bias, mse, avl, cov, 1.0 - n_ok / R,
                           float(np.mean(nx)), n_ok, sd)
            )
    return ExperimentReport(tuple(cells), R)


def run_raw(cfg: ExperimentConfig, workers: int = 1) -> np.ndarray:
    R = cfg.replications
    if workers <= 1 or R == 1:
        return np.stack([run_replication(cfg, r) for r in range(R)])
    chunk = max(1, math.ceil(R / (4 * workers)))
    jobs = [(cfg, range(s, min(R, s + chunk))) for s in range(0, R, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, jobs))
    return np.concatenate(parts, axis=0)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    return aggregate(cfg, run_raw(cfg, workers))


def _fmt(v: float) -> str:
    if isinstance(v, str):
        return v
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return f"{v:.6g}"


def _rows(rep: ExperimentReport) -> list[list[str]]:
    return [
        [_fmt(c.x), c.estimator, _fmt(c.k_mean), _fmt(c.bias), _fmt(c.mse),
         _fmt(c.avg_ci_length), _fmt(c.coverage), _fmt(c.failure_rate)]
        for c in rep.cells
    ]


def emit_report_table(rep: ExperimentReport, format: str = "csv") -> str:
    """Render the report as ``csv`` or ``aligned-text`` (6 significant digits)."""
    rows = _rows(rep)
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if format in ("aligned-text", "text"):
        header = list(REPORT_COLUMNS) + ["nx_mean"]
        rows = [r + [_fmt(c.nx_mean)] for r, c in zip(rows, rep.cells)]
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format {format!r}")


def parse_report_csv(text: str) -> ExperimentReport:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != REPORT_COLUMNS:
        raise ConfigError(f"unexpected report header {header!r}")
    cells = []
    for row in reader:
        x, est, *nums = row
        vals = [float(v) for v in nums]
        cells.append(ReportCell(float(x), est, *vals))
    return ExperimentReport(tuple(cells))
