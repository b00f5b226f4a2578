"""Monte Carlo engine: payoff estimates, joint-law probe, KS helpers."""

import math

import numpy as np
import pytest

from piadiff import (
    CoefficientField,
    Construction,
    ControlProblem,
    Domain,
    Grid,
    GridPolicy,
    IntervalActions,
    SimConfig,
    example_one,
    ks_critical_value,
    ks_statistic,
    manufactured_problem,
    simulate_payoff,
    tanaka_joint_law,
)
from piadiff.montecarlo import tanaka_terminal_samples


def flat_problem(f=0.0, g=0.0, alpha=0.0, domain=(-1.0, 1.0)):
    coeffs = CoefficientField(
        sigma=lambda x, a: 1.0,
        mu=lambda x, a: 0.0,
        alpha=lambda x, a: alpha,
        running_cost=lambda x, a: f,
        boundary_payoff=lambda x: g,
    )
    return ControlProblem(
        Domain(*domain), IntervalActions(-1.0, 1.0), coeffs, sigma_min=1.0, alpha_min=0.0
    )


class TestSimConfig:
    def test_invariants(self):
        with pytest.raises(ValueError):
            SimConfig(step=0.0, n_paths=10, seed=1, t_max=1.0)
        with pytest.raises(ValueError):
            SimConfig(step=0.1, n_paths=0, seed=1, t_max=1.0)
        with pytest.raises(ValueError):
            SimConfig(step=1.0, n_paths=10, seed=1, t_max=0.5)


class TestSimulatePayoff:
    def test_zero_data_pays_exactly_zero(self):
        p = flat_problem()
        pol = GridPolicy.constant(Grid(p.domain, 8), 0.0)
        est = simulate_payoff(p, pol, 0.0, SimConfig(step=0.01, n_paths=500, seed=4, t_max=1.0))
        assert est.mean == 0.0 and est.std_error == 0.0

    def test_undiscounted_running_reward_accumulates_exactly(self):
        # no killing, no exit possible before the horizon: payoff is the
        # horizon itself, and every path is truncated
        p = flat_problem(f=1.0, domain=(-100.0, 100.0))
        pol = GridPolicy.constant(Grid(p.domain, 8), 0.0)
        cfg = SimConfig(step=0.0625, n_paths=200, seed=9, t_max=1.0)
        est = simulate_payoff(p, pol, 0.0, cfg)
        assert est.mean == 1.0
        assert est.std_error == 0.0
        assert est.truncated_fraction == 1.0

    def test_boundary_start_exits_immediately(self):
        p = flat_problem(g=2.5)
        pol = GridPolicy.constant(Grid(p.domain, 8), 0.0)
        est = simulate_payoff(p, pol, 1.0, SimConfig(step=0.01, n_paths=50, seed=1, t_max=1.0))
        assert est.mean == 2.5 and est.std_error == 0.0 and est.truncated_fraction == 0.0

    def test_outside_domain_start_rejected(self):
        p = flat_problem()
        pol = GridPolicy.constant(Grid(p.domain, 8), 0.0)
        with pytest.raises(ValueError):
            simulate_payoff(p, pol, 1.5, SimConfig(step=0.01, n_paths=10, seed=1, t_max=1.0))

    def test_constant_coefficient_value_in_band(self):
        orc = manufactured_problem()
        pol = GridPolicy.constant(Grid(orc.problem.domain, 200), 0.0)
        cfg = SimConfig(step=2e-3, n_paths=20000, seed=123, t_max=10.0)
        est = simulate_payoff(orc.problem, pol, 0.0, cfg)
        exact = float(orc.exact_value(0.0))
        assert abs(est.mean - exact) <= 3.0 * est.std_error + 0.03
        assert est.truncated_fraction < 0.01

    def test_bang_bang_value_in_band(self):
        # boundary payoffs are steep here, so the step-boundary exit bias
        # is larger; the band reflects a measured allowance at this step
        orc = example_one()
        grid = Grid(orc.problem.domain, 1000)
        pol = GridPolicy.from_callable(grid, orc.optimal_policy)
        cfg = SimConfig(step=1e-3, n_paths=20000, seed=321, t_max=10.0)
        est = simulate_payoff(orc.problem, pol, 0.5, cfg)
        exact = float(orc.exact_value(0.5))
        assert abs(est.mean - exact) <= 3.0 * est.std_error + 0.12

    def test_standard_error_scales_with_path_count(self):
        orc = manufactured_problem()
        pol = GridPolicy.constant(Grid(orc.problem.domain, 100), 0.0)
        ses = []
        for n in (1000, 10000, 100000):
            cfg = SimConfig(step=1e-2, n_paths=n, seed=55, t_max=10.0)
            ses.append(simulate_payoff(orc.problem, pol, 0.0, cfg).std_error)
        root10 = math.sqrt(10.0)
        assert root10 / 1.5 <= ses[0] / ses[1] <= root10 * 1.5
        assert root10 / 1.5 <= ses[1] / ses[2] <= root10 * 1.5

    def test_seed_and_chunking_determinism(self):
        orc = manufactured_problem()
        pol = GridPolicy.constant(Grid(orc.problem.domain, 100), 0.0)
        cfg = SimConfig(step=5e-3, n_paths=3000, seed=77, t_max=6.0)
        runs = [
            simulate_payoff(orc.problem, pol, 0.25, cfg),
            simulate_payoff(orc.problem, pol, 0.25, cfg),
            simulate_payoff(orc.problem, pol, 0.25, cfg, chunk_size=1),
            simulate_payoff(orc.problem, pol, 0.25, cfg, chunk_size=640),
            simulate_payoff(orc.problem, pol, 0.25, cfg, chunk_size=2999),
        ]
        assert all(r == runs[0] for r in runs[1:])

    def test_different_seed_changes_the_estimate(self):
        orc = manufactured_problem()
        pol = GridPolicy.constant(Grid(orc.problem.domain, 100), 0.0)
        a = simulate_payoff(
            orc.problem, pol, 0.0, SimConfig(step=1e-2, n_paths=500, seed=1, t_max=5.0)
        )
        b = simulate_payoff(
            orc.problem, pol, 0.0, SimConfig(step=1e-2, n_paths=500, seed=2, t_max=5.0)
        )
        assert a.mean != b.mean

    def test_non_finite_coefficient_aborts_with_path_and_time(self):
        p = flat_problem(f=1.0)
        p.coeffs.mu = lambda x, a: np.full_like(np.asarray(x, dtype=float), np.nan)
        pol = GridPolicy.constant(Grid(p.domain, 8), 0.0)
        with pytest.raises(ValueError, match=r"mu.*path 0 at t=0\.0"):
            simulate_payoff(p, pol, 0.0, SimConfig(step=0.01, n_paths=4, seed=3, t_max=1.0))


class TestTanaka:
    CFG = SimConfig(step=2e-3, n_paths=20000, seed=2024, t_max=2.0)

    def test_identity_construction_event_is_impossible(self):
        pi_est, _ = tanaka_joint_law(1.0, self.CFG)
        assert pi_est.construction is Construction.PI
        assert pi_est.prob_estimate == 0.0
        assert pi_est.std_error == 0.0

    def test_integrated_construction_event_has_mass(self):
        _, sigma_est = tanaka_joint_law(1.0, self.CFG)
        assert sigma_est.construction is Construction.SIGMA
        assert sigma_est.prob_estimate > 0.05
        assert sigma_est.std_error < 0.01

    def test_marginals_agree_by_ks(self):
        w, x = tanaka_terminal_samples(1.0, self.CFG)
        stat = ks_statistic(w, x)
        assert stat < ks_critical_value(len(w), len(x), alpha=0.01)

    def test_deterministic(self):
        assert tanaka_joint_law(1.0, self.CFG) == tanaka_joint_law(1.0, self.CFG)

    def test_time_beyond_cap_rejected(self):
        with pytest.raises(ValueError):
            tanaka_joint_law(3.0, self.CFG)


class TestKSHelpers:
    def test_statistic_matches_scipy(self):
        from scipy.stats import ks_2samp

        gen = np.random.default_rng(5)
        a = gen.normal(size=400)
        b = gen.normal(0.2, 1.1, size=300)
        mine = ks_statistic(a, b)
        assert mine == pytest.approx(ks_2samp(a, b, method="asymp").statistic, abs=1e-12)

    def test_identical_samples_have_zero_statistic(self):
        a = np.linspace(0, 1, 50)
        assert ks_statistic(a, a) == 0.0

    def test_critical_value_matches_the_asymptotic_table(self):
        from scipy.stats import kstwobign

        mine = ks_critical_value(100000, 100000, alpha=0.01)
        table = kstwobign.isf(0.01) * math.sqrt(2.0 / 100000)
        assert mine == pytest.approx(table, rel=1e-6)

    def test_critical_value_rejects_bad_level(self):
        with pytest.raises(ValueError):
            ks_critical_value(10, 10, alpha=0.0)
