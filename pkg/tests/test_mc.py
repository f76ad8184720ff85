import math

import numpy as np
import pytest

from frontier_evt import mc
from frontier_evt.core import Dataset, transform
from frontier_evt.errors import ConfigError, InvalidParameter
from frontier_evt.simgen import Scenario

from oracle_values import SQRT_PI_OVER_2_SQRT_5000


def cfg(estimators="fdh,knownrho:2@grid:1", xs=(0.5, 1.0), reps=6, n=400, seed=1):
    return mc.ExperimentConfig(Scenario("triangle", n, seed), reps, xs, tuple(mc.parse_estimators(estimators)))


def test_fdh_moment_oracle():
    assert mc.fdh_moment_oracle(1, 5000, 2.0, 1.0) == pytest.approx(SQRT_PI_OVER_2_SQRT_5000, rel=1e-12)
    assert mc.fdh_moment_oracle(2, 5000, 2.0, 1.0) == pytest.approx(2.0e-4, rel=1e-12)
    with pytest.raises(InvalidParameter):
        mc.fdh_moment_oracle(0, 10, 2.0, 1.0)


@pytest.mark.parametrize("text, kind, value, label", [
    ("auto", "auto", 1, "auto"), ("grid:3", "grid", 3, "grid:3"), ("70", "fixed", 70, "70"),
])
def test_k_policy(text, kind, value, label):
    p = mc.KPolicy.parse(text)
    assert (p.kind, p.value, p.label) == (kind, value, label)


@pytest.mark.parametrize("text", ["grid:0", "-1", "often", "grid:x"])
def test_k_policy_errors(text):
    with pytest.raises(ConfigError):
        mc.KPolicy.parse(text)


def test_estimator_spec_parse_and_label():
    s = mc.EstimatorSpec.parse("knownrho:2@grid:1")
    assert s.rho == 2 and s.k.kind == "grid" and s.label == "knownrho:2@grid:1"
    assert mc.EstimatorSpec.parse("fdh@5").label == "fdh"
    assert mc.EstimatorSpec.parse("twostep:pickands").label == "twostep:pickands@auto"
    assert mc.EstimatorSpec.parse("knownell:2:1@70").ell == 1
    assert mc.EstimatorSpec.parse("moment", mc.KPolicy.parse("200")).label == "moment@200"
    for bad in ("hill", "knownrho", "knownrho:-1", "fdh:3", "twostep:hill", "knownell:2"):
        with pytest.raises(ConfigError):
            mc.EstimatorSpec.parse(bad)
    with pytest.raises(ConfigError):
        mc.parse_estimators(" , ")


def test_grid_positions():
    ts = transform(Scenario("triangle", 1000, 0).generate(), [1.0])
    assert mc.evaluate(mc.EstimatorSpec.parse("knownrho:2@grid:1"), ts).k == 250
    assert mc.evaluate(mc.EstimatorSpec.parse("pickands_rho@grid:3"), ts).k == 248
    assert mc.evaluate(mc.EstimatorSpec.parse("moment@grid:1"), ts).k == 999
    assert mc.evaluate(mc.EstimatorSpec.parse("orderstat@grid:1"), ts).k == 0


def test_evaluate_reports_failures_in_band():
    ts = transform(Dataset([[1.0], [1.0], [2.0]], [1.0, 2.0, 3.0]), [1.0])
    out = mc.evaluate(mc.EstimatorSpec.parse("pickands_rho@auto"), ts)
    assert not out.ok and out.reason.startswith("InsufficientStableRange")
    out = mc.evaluate(mc.EstimatorSpec.parse("knownrho:2@5"), ts)
    assert not out.ok and "ThresholdOutOfRange" in out.reason
    empty = transform(Dataset([[3.0]], [1.0]), [1.0])
    assert "EmptyConditioningSet" in mc.evaluate(mc.EstimatorSpec.parse("fdh"), empty).reason


def test_twostep_matches_manual_pipeline():
    ts = transform(Scenario("triangle", 2000, 5).generate(), [1.0])
    spec = mc.EstimatorSpec.parse("twostep:moment@auto")
    out = mc.evaluate(spec, ts)
    rho = mc.evaluate(mc.EstimatorSpec.parse("moment_rho@auto"), ts).value
    assert out.rho_used == pytest.approx(rho)
    sel = mc.select(spec, ts)
    assert out.k == sel.chosen_k
    with pytest.raises(ConfigError):
        mc.select(mc.EstimatorSpec.parse("fdh"), ts)


def test_config_validation():
    with pytest.raises(ConfigError):
        cfg(xs=(0.0,))
    with pytest.raises(ConfigError):
        cfg(reps=0)
    with pytest.raises(ConfigError):
        mc.ExperimentConfig(Scenario("triangle", 10), 1, (1.0,), (), 0.95)


def test_report_rows_and_truth():
    rep = mc.run_experiment(cfg(estimators="fdh,pickands_rho@grid:1"))
    assert len(rep.cells) == 4 and rep.replications == 6
    c = rep.cell(1.0, "fdh")
    assert c.bias < 0 and c.failure_rate == 0 and c.nx_mean == 400 and math.isnan(c.coverage)
    r = rep.cell(1.0, "pickands_rho@grid:1")
    assert r.k_mean == 100 and 0 <= r.coverage <= 1
    with pytest.raises(KeyError):
        rep.cell(0.3, "fdh")


def test_summarize():
    bias, mse, sd, avl, cov = mc.summarize(np.array([0.9, 1.1]), 1.0, np.array([0.8, 1.05]), np.array([1.0, 1.2]))
    assert bias == pytest.approx(0.0) and mse == pytest.approx(0.01)
    assert avl == pytest.approx(0.175) and cov == 0.5


def test_reproducible_and_worker_independent():
    c = cfg(estimators="fdh,knownrho:2@auto,moment_rho@auto", reps=8)
    a = mc.emit_report_table(mc.run_experiment(c))
    b = mc.emit_report_table(mc.run_experiment(c, workers=3))
    assert a == b == mc.emit_report_table(mc.run_experiment(c))


def test_emit_and_parse_csv():
    assert mc.emit_report_table(mc.ExperimentReport(())) == ",".join(mc.REPORT_COLUMNS) + "\n"
    rep = mc.run_experiment(cfg(estimators="knownrho:2@grid:1", xs=(1.0,), reps=1))
    text = mc.emit_report_table(rep)
    assert len(text.splitlines()) == 2
    back = mc.parse_report_csv(text)
    assert back.cells[0].estimator == "knownrho:2@grid:1"
    assert back.cells[0].bias == pytest.approx(rep.cells[0].bias, rel=1e-5)
    table = mc.emit_report_table(rep, "aligned-text")
    assert "nx_mean" in table.splitlines()[0]
    with pytest.raises(ConfigError):
        mc.emit_report_table(rep, "xml")


@pytest.mark.slow
def test_full_scale_tables():
    """2000 replications at n = 5000 for every estimator family."""
    c = mc.ExperimentConfig(
        Scenario("triangle", 5000, 0), 2000, (0.25, 0.5, 1.0),
        tuple(mc.parse_estimators("fdh,pickands_rho@grid:1,pickands@grid:1,knownrho:2@grid:1,moment_rho@200,moment@200")),
    )
    rep = mc.run_experiment(c, workers=4)
    for x in (0.25, 0.5, 1.0):
        assert 0.92 <= rep.cell(x, "knownrho:2@grid:1").coverage <= 0.97
        f = rep.cell(x, "fdh")
        assert abs(f.bias + SQRT_PI_OVER_2_SQRT_5000) <= 3 * f.bias_se
    assert rep.cell(1.0, "moment@200").coverage <= 0.90
