"""The evaluate/improve loop with per-iteration diagnostics and stopping rules."""

import enum
from dataclasses import dataclass

import numpy as np

from .evaluate import evaluate_policy
from .grid import GridFunction, GridPolicy
from .improve import improve_policy
from .problem import ControlProblem, FiniteActions


class Termination(enum.Enum):
    RESIDUAL_TOL = "ResidualTol"
    POLICY_FIXED_POINT = "PolicyFixedPoint"
    MAX_ITERATIONS = "MaxIterations"


@dataclass
class PIAConfig:
    """Loop configuration.

    ``residual_tol`` is an absolute threshold on the residual sup-norm
    (scale it by the size of the running reward as appropriate for the
    problem).  ``monotonicity_slack`` is a relative tolerance used only for
    the monotone diagnostic flag; it is scaled by 1 + the value magnitude.
    """

    residual_tol: float
    max_iterations: int
    n_actions: int = 65
    monotonicity_slack: float = 1e-8

    def __post_init__(self):
        if not self.residual_tol > 0:
            raise ValueError(f"residual_tol must be positive, got {self.residual_tol}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.monotonicity_slack < 0:
            raise ValueError("monotonicity_slack must be nonnegative")


@dataclass
class IterationRecord:
    """Diagnostics for one evaluate/improve step.

    ``monotone`` states that this iteration's value did not fall below the
    previous iteration's value by more than the slack at any node
    (vacuously true for the first record).
    """

    index: int
    max_residual: float
    value_min: float
    value_max: float
    policy_change_sup: float
    monotone: bool


@dataclass(eq=False)
class PIAReport:
    """Full run record.  final_value is the payoff of final_policy."""

    iterations: list
    final_value: GridFunction
    final_policy: GridPolicy
    converged: bool
    termination: Termination


def _interior_equal(a: GridPolicy, b: GridPolicy) -> bool:
    return bool(np.array_equal(a.actions[1:-1], b.actions[1:-1]))


def run_pia(p: ControlProblem, initial_policy: GridPolicy, cfg: PIAConfig) -> PIAReport:
    """Alternate policy evaluation and improvement until a stopping rule fires.

    Stops at a policy fixed point (finite action spaces), when the residual
    sup-norm drops to residual_tol, or after max_iterations.  Each
    iteration appends a populated IterationRecord.  Evaluation or
    improvement failures are re-raised with the iteration index attached.
    """
    pol = initial_policy
    finite = isinstance(p.actions, FiniteActions)
    records = []
    prev_values = None
    termination = Termination.MAX_ITERATIONS
    final_value = None

    for n in range(cfg.max_iterations):
        try:
            v = evaluate_policy(p, pol)
            imp = improve_policy(p, v, cfg.n_actions)
        except Exception as exc:
            raise type(exc)(f"iteration {n}: {exc}") from exc

        monotone = True
        if prev_values is not None:
            scale = 1.0 + max(
                float(np.max(np.abs(prev_values))), float(np.max(np.abs(v.values)))
            )
            drop = float(np.min(v.values - prev_values))
            monotone = drop >= -cfg.monotonicity_slack * scale
        change = float(np.max(np.abs(imp.policy.actions[1:-1] - pol.actions[1:-1])))
        records.append(
            IterationRecord(
                index=n,
                max_residual=imp.max_residual,
                value_min=float(np.min(v.values)),
                value_max=float(np.max(v.values)),
                policy_change_sup=change,
                monotone=monotone,
            )
        )

        if finite and _interior_equal(imp.policy, pol):
            termination = Termination.POLICY_FIXED_POINT
            pol = imp.policy
            final_value = v  # pol was just evaluated; imp.policy equals it on the interior
            break
        pol = imp.policy
        if imp.max_residual <= cfg.residual_tol:
            termination = Termination.RESIDUAL_TOL
            break
        prev_values = v.values

    if final_value is None:
        final_value = evaluate_policy(p, pol)
    return PIAReport(
        iterations=records,
        final_value=final_value,
        final_policy=pol,
        converged=termination is not Termination.MAX_ITERATIONS,
        termination=termination,
    )


def check_monotone_sequence(report: PIAReport) -> bool:
    """True iff every recorded iteration carries the monotone flag."""
    if not report.iterations:
        raise ValueError("report has no iterations")
    return all(r.monotone for r in report.iterations)
