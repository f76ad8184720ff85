import math

import numpy as np
import pytest

from frontier_evt.core import Dataset, transform
from frontier_evt.errors import InsufficientStableRange
from frontier_evt.estimators import known_rho_star
from frontier_evt.kn_select import (
    FRONTIER,
    MOMENT_RHO,
    PICKANDS_RHO,
    frontier_grid,
    moment_grid,
    pickands_grid,
    rolling_sd,
    select_from_grid,
    select_k_frontier,
    select_k_moment_rho,
    select_k_pickands_rho,
)
from frontier_evt.simgen import Scenario


def sample(values):
    v = np.asarray(values, dtype=float)
    return transform(Dataset(np.ones((v.size, 1)), v), [1])


def triangle(n, seed=0, x=1.0):
    return transform(Scenario("triangle", n, seed).generate(), [x])


def test_rolling_sd_matches_direct_computation():
    v = np.array([1.0, 3.0, 2.0, 5.0, 4.0])
    out = rolling_sd(v, 3)
    assert out == pytest.approx([np.std(v[i:i + 3], ddof=1) for i in range(3)])
    v[2] = np.nan
    assert np.isnan(rolling_sd(v, 3)).all()
    assert rolling_sd(v, 10).size == 0


def test_grids():
    assert list(pickands_grid(64)) == list(range(16, 0, -1))
    assert list(moment_grid(5)) == [4, 3, 2, 1, 0]
    assert list(frontier_grid(1250)) == list(range(1, 36))
    assert list(frontier_grid(400)) == list(range(1, 21))


def test_pickands_selection_window():
    ts = triangle(4000, x=0.8)
    sel = select_k_pickands_rho(ts)
    n_x = ts.n_x
    assert sel.target == PICKANDS_RHO
    assert sel.window == 2 * math.isqrt(n_x // 4)
    assert list(sel.ks) == list(pickands_grid(n_x))
    assert sel.chosen_k in sel.ks


def test_pickands_selection_needs_enough_points():
    with pytest.raises(InsufficientStableRange):
        select_k_pickands_rho(sample(np.arange(1, 9)))


def test_moment_selection_window_length():
    ts = sample(np.random.default_rng(1).random(100) + 0.01)
    sel = select_k_moment_rho(ts)
    assert sel.target == MOMENT_RHO and sel.window == 20
    with pytest.raises(InsufficientStableRange):
        select_k_moment_rho(sample([1, 2, 3, 4]))


def test_frontier_selection_window_length():
    ts = triangle(2000)
    sel = select_k_frontier(ts, lambda k: known_rho_star(ts, k, 2.0))
    assert sel.target == FRONTIER
    assert sel.window == 6
    assert list(sel.ks) == list(range(1, math.isqrt(ts.n_x) + 1))


def test_constant_estimates_pick_first_window():
    ks = list(range(1, 21))
    sel = select_from_grid(FRONTIER, ks, [1.0] * 20, 3)
    assert sel.chosen_index == 2 and sel.chosen_k == 3
    # descending grid: the smaller k of the two centre entries
    sel = select_from_grid(PICKANDS_RHO, ks[::-1], [1.0] * 20, 2)
    assert sel.chosen_k == 18


def test_only_failure_free_window_is_chosen():
    est = [np.nan] * 10 + [5.0, -5.0, 5.0, -5.0] + [np.nan] * 6 + [1.0, 1.0, 1.0]
    ks = list(range(len(est)))
    sel = select_from_grid(MOMENT_RHO, ks, est, 2)
    assert sel.chosen_index == 11
    # a flat failure-free tail now exists and beats the noisy one
    est_window = est[:20] + [1.0]
    sel = select_from_grid(MOMENT_RHO, list(range(21)), est_window, 2)
    assert sel.chosen_index == 11


def test_all_windows_failed():
    with pytest.raises(InsufficientStableRange):
        select_from_grid(FRONTIER, range(10), [1.0, np.nan] * 5, 2)


def test_minimum_sd_window_wins():
    est = [0.0, 9.0, 0.0, 9.0, 5.0, 5.1, 5.0, 5.1, 0.0, 9.0]
    sel = select_from_grid(FRONTIER, range(1, 11), est, 2)
    assert sel.chosen_index == 5 and sel.chosen_k == 6
    assert sel.rolling_sd[4] == pytest.approx(np.std([5.0, 5.1, 5.0, 5.1], ddof=1))


def test_evaluator_errors_count_as_failures():
    ts = sample(np.linspace(1, 2, 100))

    def flaky(k):
        if k in (1, 2):
            return math.nan
        return known_rho_star(ts, k, 2.0)

    sel = select_k_frontier(ts, flaky)
    assert np.isnan(sel.estimates[:2]).all()
    assert sel.chosen_index >= 2
