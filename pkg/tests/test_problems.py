import math

import numpy as np
import pytest
from scipy import stats

from scenario_sizer.controller import bernoulli_risk
from scenario_sizer.problems import (
    AtomMixture,
    PathConfig,
    Solution,
    UniformDistribution,
    gaussian_lp_problem,
    half_line_problem,
    max_coordinate_problem,
    obstacle_values,
    path_planning_problem,
    synthetic_beta_problem,
)

from oracles import ks_statistic


# -- synthetic -------------------------------------------------------------------


def _synthetic_risks(d, N, reps, seed):
    p = synthetic_beta_problem(d)
    rng = np.random.default_rng(seed)
    return np.array([p.exact_risk(p.solve(p.sample_batch(rng, N))) for _ in range(reps)])


def test_synthetic_below_d_is_one():
    assert np.all(_synthetic_risks(5, 4, 200, 0) == 1.0)


def test_synthetic_at_d_mean():
    d = 4
    r = _synthetic_risks(d, d, 100_000, 1)
    assert r.mean() == pytest.approx(d / (d + 1), abs=0.01)


def test_synthetic_large_N_law():
    d, N = 3, 200
    r = _synthetic_risks(d, N, 10_000, 2)
    assert r.mean() == pytest.approx(d / (N + 1), abs=0.001)
    assert ks_statistic(r, stats.beta(d, N - d + 1).cdf) <= 0.02


def test_synthetic_discards_at_most_d_minus_one():
    p = synthetic_beta_problem(5)
    rng = np.random.default_rng(3)
    for N in (5, 10, 80):
        u = p.sample_batch(rng, N)
        sol = p.solve(u)
        assert int(p.violated(sol, u).sum()) <= p.discarded


# -- half line -------------------------------------------------------------------------


def test_half_line_examples():
    p = half_line_problem(1.0, math.sqrt(2.0))
    sol = p.solve(np.array([0.2, 1.7, -0.4]))
    assert sol.x == 1.7
    assert p.exact_risk(Solution(x=1.0)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        p.solve(np.array([]))


def test_half_line_risk_law_is_beta_1_22():
    p = half_line_problem()
    rng = np.random.default_rng(4)
    r = [p.exact_risk(p.solve(p.sample_batch(rng, 22))) for _ in range(10_000)]
    assert ks_statistic(r, stats.beta(1, 22).cdf) <= 0.02


def test_half_line_risk_monotone_and_bounded():
    p = half_line_problem()
    xs = np.linspace(-10, 12, 300)
    r = [p.exact_risk(Solution(x=float(x))) for x in xs]
    assert all(0.0 <= v <= 1.0 for v in r)
    assert np.all(np.diff(r) <= 0.0)


def test_half_line_fixed_complexity():
    p = half_line_problem()
    rng = np.random.default_rng(5)
    u = p.sample_batch(rng, 30)
    sol = p.solve(u)
    active = np.flatnonzero(u == sol.x)
    assert active.size == 1
    for j in range(30):
        if j not in active:
            assert p.solve(np.delete(u, j)).x == sol.x


# -- gaussian LP ------------------------------------------------------------------------


def test_gaussian_lp_risk_formula():
    p = gaussian_lp_problem(20)
    x = np.zeros(20)
    x[3] = 1.0
    assert p.exact_risk(Solution(x=x)) == pytest.approx(0.15866, abs=1e-5)
    assert p.exact_risk(Solution(x=np.zeros(20))) == 0.0


def test_gaussian_lp_feasible_and_fixed_complexity():
    p = gaussian_lp_problem(20)
    rng = np.random.default_rng(6)
    U = p.sample_batch(rng, 300)
    sol = p.solve(U)
    assert sol.ok
    assert p.constraint_values(sol, U).max() <= 1e-9
    active = np.asarray(sol.meta["active"])
    assert active.size == 20
    # dropping a non-active scenario leaves the solution unchanged
    for j in rng.choice(np.setdiff1d(np.arange(300), active), 10, replace=False):
        other = p.solve(np.delete(U, j, axis=0))
        assert np.allclose(other.x, sol.x, atol=1e-9)
    # the active set alone reproduces it
    assert np.allclose(p.solve(U[active]).x, sol.x, atol=1e-8)


def test_gaussian_lp_unbounded_with_few_scenarios():
    p = gaussian_lp_problem(20)
    sol = p.solve(p.sample_batch(np.random.default_rng(7), 5))
    assert not sol.ok
    assert sol.status == "unbounded"
    assert np.all(p.violated(sol, np.zeros((3, 20))))


# -- max coordinate ---------------------------------------------------------------------


def test_max_coordinate_examples():
    p = max_coordinate_problem(400, UniformDistribution())
    sol = p.solve(np.array([0.3, 0.9]))
    assert np.all(sol.x == 0.9) and sol.x.size == 400
    assert p.exact_risk(sol) == pytest.approx(0.1)


def test_max_coordinate_atom_at_top_gives_zero_risk():
    p = max_coordinate_problem(400, AtomMixture(atom=1.0, mass=0.05))
    sol = p.solve(np.array([0.2, 1.0, 0.7]))
    assert p.exact_risk(sol) == 0.0


def test_max_coordinate_continuous_law():
    p = max_coordinate_problem(400)
    rng = np.random.default_rng(8)
    r = [p.exact_risk(p.solve(p.sample_batch(rng, 22))) for _ in range(10_000)]
    assert ks_statistic(r, stats.beta(1, 22).cdf) <= 0.02


def test_atom_mixture_sf():
    dist = AtomMixture(atom=0.99, mass=0.1)
    assert dist.sf(0.5) == pytest.approx(0.1 + 0.9 * 0.5)
    assert dist.sf(0.99) == pytest.approx(0.9 * 0.01)
    rng = np.random.default_rng(9)
    u = dist.sample(rng, 200_000)
    assert np.mean(u > 0.5) == pytest.approx(dist.sf(0.5), abs=0.005)
    assert np.mean(u == 0.99) == pytest.approx(0.1, abs=0.005)


# -- path planning -------------------------------------------------------------------------


def _check_path(problem, sol, scenarios):
    c = problem.config
    P = sol.x
    assert P.shape == (c.horizon, 2)
    x0, x1, y0, y1 = c.box
    assert np.all((P[:, 0] >= x0) & (P[:, 0] <= x1) & (P[:, 1] >= y0) & (P[:, 1] <= y1))
    steps = np.hypot(*np.diff(np.vstack([c.source, P]), axis=0).T)
    assert steps.max() <= c.delta + 1e-12
    if len(scenarios):
        assert obstacle_values(P, scenarios).max() <= 1e-9


def test_path_without_obstacles_is_straight():
    p = path_planning_problem(PathConfig())
    sol = p.solve(np.empty((0, 4)))
    assert sol.ok
    _check_path(p, sol, [])
    assert sol.objective == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(sol.x[:, 1], 0.5)


def test_path_avoids_single_pair():
    p = path_planning_problem(PathConfig())
    S = np.array([[2.5, 1.5 - 0.8, 2.5, 1.5 + 0.8]])
    sol = p.solve(S)
    assert sol.ok
    _check_path(p, sol, S)
    assert p.exact_risk(sol) < 0.5


def test_obstacle_values_sign():
    S = np.array([[2.5, 0.7, 2.5, 2.3]])
    pts = np.array([[2.5, 0.7], [2.5, 1.5], [0.0, 0.0], [2.9, 2.3]])
    g = obstacle_values(pts, S)[0]
    assert g[0] == pytest.approx(0.5)
    assert g[1] == pytest.approx(-0.3)
    assert g[2] < 0
    assert g[3] == pytest.approx(0.1)


def test_path_planning_with_sampled_obstacles():
    p = path_planning_problem(PathConfig())
    rng = np.random.default_rng(10)
    for N in (1, 5, 20, 60):
        S = p.sample_batch(rng, N)
        sol = p.solve(S)
        assert sol.ok, N
        _check_path(p, sol, S)


def test_path_exact_risk_matches_bernoulli():
    p = path_planning_problem(PathConfig())
    rng = np.random.default_rng(11)
    for N in (3, 20):
        sol = p.solve(p.sample_batch(rng, N))
        exact = p.exact_risk(sol)
        est = bernoulli_risk(p, sol, 1, 40_000, rng)
        assert 0.0 <= exact <= 1.0
        assert est == pytest.approx(exact, abs=0.015)


def test_time_varying_obstacles_move():
    cfg = PathConfig.time_varying()
    p = path_planning_problem(cfg)
    rng = np.random.default_rng(12)
    xs = {round(float(p.sample_batch(rng, 1, t)[0, 0]), 6) for t in (1, 10, 20, 40)}
    assert len(xs) == 4
    sol = p.solve(p.sample_batch(rng, 15, 7), 7)
    assert sol.ok
    assert 0.0 <= p.exact_risk(sol, 7) <= 1.0


def test_path_risk_histogram_near_fitted_beta():
    # replicated risk with N = 20 is roughly Beta shaped with small mean
    p = path_planning_problem(PathConfig())
    rng = np.random.default_rng(13)
    r = np.array([p.exact_risk(p.solve(p.sample_batch(rng, 20))) for _ in range(150)])
    assert np.all((r >= 0) & (r <= 1))
    assert 0.0 < r.mean() < 0.2
