"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Every tolerance is fixed here; nothing is calibrated at runtime.
"""

import math
import time

import numpy as np
import pytest

from piadiff import (
    Grid,
    GridPolicy,
    PIAConfig,
    SimConfig,
    Termination,
    check_monotone_sequence,
    evaluate_policy,
    example_one,
    example_two,
    get_oracle,
    ks_critical_value,
    ks_statistic,
    manufactured_problem,
    run_pia,
    simulate_payoff,
    tanaka_joint_law,
)
from piadiff.cli import main
from piadiff.improve import action_objective
from piadiff.montecarlo import tanaka_terminal_samples

from conftest import random_template_problem


def report(number, name, ok, detail):
    print(f"[criterion {number}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {number} ({name}): {detail}"


def test_criterion_1_two_action_oracle():
    orc = example_one()
    grid = Grid(orc.problem.domain, 2000)
    start = time.perf_counter()
    rep = run_pia(
        orc.problem,
        GridPolicy.constant(grid, -1.0),
        PIAConfig(residual_tol=1e-14, max_iterations=25, n_actions=2),
    )
    elapsed = time.perf_counter() - start
    value_dev = float(np.max(np.abs(rep.final_value.values - orc.exact_value(grid.nodes))))
    off = np.abs(grid.nodes) >= 2.0 * grid.spacing
    policy_exact = bool(
        np.array_equal(rep.final_policy.actions[off], orc.optimal_policy(grid.nodes[off]))
    )
    ok = (
        rep.termination is Termination.POLICY_FIXED_POINT
        and len(rep.iterations) <= 5
        and value_dev <= 5e-3
        and policy_exact
        and elapsed <= 5.0
    )
    report(
        1,
        "two-action oracle",
        ok,
        f"{rep.termination.value} in {len(rep.iterations)} iters, "
        f"|V - exact| = {value_dev:.2e}, policy exact off kink: {policy_exact}, "
        f"{elapsed:.2f}s",
    )


def test_criterion_2_interval_oracle():
    orc = example_two()
    grid = Grid(orc.problem.domain, 2000)
    f_norm = 6.5 * math.sinh(2.0)
    start = time.perf_counter()
    rep = run_pia(
        orc.problem,
        GridPolicy.constant(grid, 0.0),
        PIAConfig(residual_tol=1e-3 * f_norm, max_iterations=60, n_actions=201),
    )
    elapsed = time.perf_counter() - start
    value_dev = float(np.max(np.abs(rep.final_value.values - orc.exact_value(grid.nodes))))
    off = np.abs(grid.nodes) >= 2.0 * grid.spacing
    action_step = 2.0 / 200
    policy_dev = float(
        np.max(np.abs(rep.final_policy.actions[off] - orc.optimal_policy(grid.nodes[off])))
    )
    ok = (
        rep.converged
        and rep.termination is Termination.RESIDUAL_TOL
        and value_dev <= 1e-2
        and policy_dev <= action_step + 1e-12
        and elapsed <= 60.0
    )
    report(
        2,
        "interval-action oracle",
        ok,
        f"{rep.termination.value} in {len(rep.iterations)} iters, "
        f"|V - exact| = {value_dev:.2e}, |policy - sgn| = {policy_dev:.3f}, {elapsed:.2f}s",
    )


def test_criterion_3_monotone_improvement_suite():
    gen = np.random.default_rng(31415)
    violations = 0
    runs = 0
    for _ in range(50):
        p = random_template_problem(gen)
        grid = Grid(p.domain, 64)
        rep = run_pia(
            p,
            GridPolicy.constant(grid, float(gen.uniform(-1.0, 1.0))),
            PIAConfig(residual_tol=1e-13, max_iterations=10, n_actions=15),
        )
        runs += 1
        if not check_monotone_sequence(rep):
            violations += 1
    ok = violations == 0 and runs == 50
    report(3, "monotone improvement suite", ok, f"{runs} randomized problems, {violations} violations")


def test_criterion_4_convergence_order():
    orc = manufactured_problem()
    errors = []
    for n in (250, 500, 1000):
        grid = Grid(orc.problem.domain, n)
        v = evaluate_policy(orc.problem, GridPolicy.constant(grid, 0.0))
        errors.append(float(np.max(np.abs(v.values - orc.exact_value(grid.nodes)))))
    r1 = errors[0] / errors[1]
    r2 = errors[1] / errors[2]
    ok = 3.5 <= r1 <= 4.5 and 3.5 <= r2 <= 4.5
    report(
        4,
        "second-order convergence",
        ok,
        f"errors {errors[0]:.3e} / {errors[1]:.3e} / {errors[2]:.3e}, ratios {r1:.2f}, {r2:.2f}",
    )


def test_criterion_5_evaluation_identity_of_converged_runs():
    cases = []

    orc1 = example_one()
    grid1 = Grid(orc1.problem.domain, 2000)
    rep1 = run_pia(
        orc1.problem,
        GridPolicy.constant(grid1, -1.0),
        PIAConfig(residual_tol=1e-14, max_iterations=25, n_actions=2),
    )
    cases.append(("two-action", orc1.problem, rep1, 0.0))

    orc2 = example_two()
    grid2 = Grid(orc2.problem.domain, 2000)
    f_norm = 6.5 * math.sinh(2.0)
    rep2 = run_pia(
        orc2.problem,
        GridPolicy.constant(grid2, 0.0),
        PIAConfig(residual_tol=1e-3 * f_norm, max_iterations=60, n_actions=201),
    )
    cases.append(("interval", orc2.problem, rep2, f_norm))

    orc3 = manufactured_problem()
    grid3 = Grid(orc3.problem.domain, 1000)
    rep3 = run_pia(
        orc3.problem,
        GridPolicy.constant(grid3, 0.0),
        PIAConfig(residual_tol=1e-10, max_iterations=5, n_actions=2),
    )
    cases.append(("single-action", orc3.problem, rep3, 1.0))

    worst = []
    ok = True
    for name, problem, rep, f_norm in cases:
        assert rep.converged
        obj = action_objective(problem, rep.final_value, rep.final_policy.actions[1:-1])
        bound = 1e-8 * (1.0 + f_norm)
        peak = float(np.max(np.abs(obj)))
        worst.append(f"{name}: {peak:.2e} <= {bound:.2e}")
        ok = ok and peak <= bound
    report(5, "evaluation identity at the final policy", ok, "; ".join(worst))


def test_criterion_6_monte_carlo_cross_validation():
    orc = manufactured_problem()
    pol = GridPolicy.constant(Grid(orc.problem.domain, 1000), 0.0)
    cfg = SimConfig(step=1e-3, n_paths=100000, seed=20260809, t_max=12.0)
    start = time.perf_counter()
    lines = []
    ok = True
    for x0 in (-0.5, 0.0, 0.5):
        est = simulate_payoff(orc.problem, pol, x0, cfg)
        exact = float(orc.exact_value(x0))
        band = 3.0 * est.std_error + 0.02
        dev = abs(est.mean - exact)
        ok = ok and dev <= band
        lines.append(f"x0={x0}: |{est.mean:.4f} - {exact:.4f}| = {dev:.4f} <= {band:.4f}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed <= 60.0
    report(6, "Monte Carlo cross-validation", ok, "; ".join(lines) + f"; {elapsed:.1f}s")


def test_criterion_7_joint_law_demonstration():
    cfg = SimConfig(step=1e-3, n_paths=100000, seed=20260809, t_max=1.0)
    pi_est, sigma_est = tanaka_joint_law(1.0, cfg)
    w, x = tanaka_terminal_samples(1.0, cfg)
    stat = ks_statistic(w, x)
    critical = ks_critical_value(len(w), len(x), alpha=0.01)
    ok = (
        pi_est.prob_estimate == 0.0
        and sigma_est.prob_estimate > 0.05
        and sigma_est.std_error < 0.01
        and stat < critical
    )
    report(
        7,
        "joint-law demonstration",
        ok,
        f"identity prob = {pi_est.prob_estimate}, integrated prob = "
        f"{sigma_est.prob_estimate:.4f} (se {sigma_est.std_error:.4f}), "
        f"KS {stat:.4f} < {critical:.4f}",
    )


SPEC_TEXT = """
domain: {left: -1.0, right: 1.0}
actions: {kind: interval, a_min: -1.0, a_max: 1.0}
coefficients:
  sigma: "1"
  mu: "0"
  alpha: "4*a + 9/2"
  f: "-13/2*sinh(2*max(x,0))"
  g: "-sinh(2)*(1+sgn(x))/2 + 2*sinh(1)*(1-sgn(x))/2"
floors: {sigma_min: 1.0, alpha_min: 0.5}
grid: {n_cells: 250}
pia: {residual_tol: 2.4e-2, max_iterations: 40, n_actions: 41}
sim: {step: 2.0e-3, n_paths: 5000, seed: 88, t_max: 6.0}
"""


def test_criterion_8_deterministic_artifacts(tmp_path):
    spec = tmp_path / "problem.yaml"
    spec.write_text(SPEC_TEXT)

    solve_outs = [tmp_path / "s1", tmp_path / "s2"]
    for out in solve_outs:
        assert main(["solve", "--spec", str(spec), "--out", str(out)]) == 0
    solve_same = all(
        (solve_outs[0] / name).read_bytes() == (solve_outs[1] / name).read_bytes()
        for name in ("iterations.csv", "value.csv", "policy.csv")
    )

    sim_outs = [tmp_path / "m1", tmp_path / "m2"]
    for out in sim_outs:
        code = main(
            [
                "simulate",
                "--spec",
                str(spec),
                "--out",
                str(out),
                "--x0",
                "0.25",
                "--policy-expr",
                "sgn(x)",
            ]
        )
        assert code == 0
    sim_same = (sim_outs[0] / "estimate.csv").read_bytes() == (
        sim_outs[1] / "estimate.csv"
    ).read_bytes()

    # parallel-equivalence: the estimate cannot depend on how paths are
    # batched, because noise is indexed by (seed, path, step)
    from piadiff import loads_spec, spec_to_problem
    from piadiff.expressions import parse as parse_expr

    ps = loads_spec(SPEC_TEXT)
    problem = spec_to_problem(ps)
    grid = Grid(problem.domain, ps.n_cells)
    sgn = parse_expr("sgn(x)", variables=("x",))
    pol = GridPolicy.from_callable(grid, lambda x: np.broadcast_to(sgn(x), x.shape))
    serial = simulate_payoff(problem, pol, 0.25, ps.sim)
    chunked = simulate_payoff(problem, pol, 0.25, ps.sim, chunk_size=613)
    chunk_same = serial == chunked

    ok = solve_same and sim_same and chunk_same
    report(
        8,
        "byte-identical reruns",
        ok,
        f"solve CSVs identical: {solve_same}, simulate CSV identical: {sim_same}, "
        f"chunked execution identical: {chunk_same}",
    )
