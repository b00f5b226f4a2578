"""Exactly solvable benchmark problems with closed-form values and policies.

Each oracle bundles a control problem with its exact value function and
optimal policy.  Two are bang-bang problems on (-1, 1) whose value
functions are piecewise hyperbolic sines glued C^1 at zero, one with a
two-point action set and one with interval actions; the third is a smooth
constant-coefficient problem for convergence studies.  Sign convention
throughout: sgn(0) = 1.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .problem import (
    CoefficientField,
    ControlProblem,
    Domain,
    FiniteActions,
    IntervalActions,
)


@dataclass(eq=False)
class OracleProblem:
    """A control problem with known exact solution.

    ``exact_value`` and ``optimal_policy`` accept scalars or arrays; the
    exact value matches the boundary payoff at both endpoints.
    """

    name: str
    problem: ControlProblem
    exact_value: Callable
    optimal_policy: Callable


def _sgn(x):
    return np.where(np.asarray(x, dtype=float) >= 0.0, 1.0, -1.0)


def example_one() -> OracleProblem:
    """Bang-bang problem with two actions and action-dependent killing.

    On (-1, 1) with actions {-1, 1}: sigma = 1, mu = 0, alpha = 2 + a,
    zero running reward, boundary payoff g(-1) = sqrt(3)*sinh(sqrt(2)),
    g(1) = -sinh(sqrt(6)).  Exact value -sinh(sqrt(6) x) for x >= 0 and
    -sqrt(3)*sinh(sqrt(2) x) for x < 0; the optimal policy is sgn(x).
    """
    g_left = math.sqrt(3.0) * math.sinh(math.sqrt(2.0))
    g_right = -math.sinh(math.sqrt(6.0))
    coeffs = CoefficientField(
        sigma=lambda x, a: 1.0,
        mu=lambda x, a: 0.0,
        alpha=lambda x, a: 2.0 + a,
        running_cost=lambda x, a: 0.0,
        boundary_payoff=lambda x: np.where(np.asarray(x, dtype=float) > 0.0, g_right, g_left),
    )
    problem = ControlProblem(
        domain=Domain(-1.0, 1.0),
        actions=FiniteActions((-1.0, 1.0)),
        coeffs=coeffs,
        sigma_min=1.0,
        alpha_min=1.0,
    )

    s6 = math.sqrt(6.0)
    s2 = math.sqrt(2.0)
    s3 = math.sqrt(3.0)

    def exact_value(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0.0, -np.sinh(s6 * x), -s3 * np.sinh(s2 * x))

    return OracleProblem("example1", problem, exact_value, _sgn)


def example_two() -> OracleProblem:
    """Interval-action problem whose optimum is still bang-bang.

    On (-1, 1) with actions [-1, 1]: sigma = 1, mu = 0, alpha = 4a + 9/2.
    The running reward is -(13/2)*sinh(2*max(x, 0)) (action-independent)
    and the boundary payoff is g(-1) = 2*sinh(1), g(1) = -sinh(2).  Exact
    value -sinh(2x) for x >= 0 and -2*sinh(x) for x < 0; optimal policy
    sgn(x), attained at the action-interval endpoints.
    """
    g_left = 2.0 * math.sinh(1.0)
    g_right = -math.sinh(2.0)
    coeffs = CoefficientField(
        sigma=lambda x, a: 1.0,
        mu=lambda x, a: 0.0,
        alpha=lambda x, a: 4.0 * a + 4.5,
        running_cost=lambda x, a: -6.5 * np.sinh(2.0 * np.maximum(np.asarray(x, dtype=float), 0.0)),
        boundary_payoff=lambda x: np.where(np.asarray(x, dtype=float) > 0.0, g_right, g_left),
    )
    problem = ControlProblem(
        domain=Domain(-1.0, 1.0),
        actions=IntervalActions(-1.0, 1.0),
        coeffs=coeffs,
        sigma_min=1.0,
        alpha_min=0.5,
    )

    def exact_value(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0.0, -np.sinh(2.0 * x), -2.0 * np.sinh(x))

    return OracleProblem("example2", problem, exact_value, _sgn)


def manufactured_problem() -> OracleProblem:
    """Smooth single-action regression problem.

    On (-1, 1) with the single action 0: sigma = sqrt(2), mu = 0,
    alpha = 1, unit running reward, zero boundary payoff.  Exact value
    1 - cosh(x)/cosh(1), which solves v'' - v + 1 = 0 with v(+-1) = 0.
    """
    coeffs = CoefficientField(
        sigma=lambda x, a: math.sqrt(2.0),
        mu=lambda x, a: 0.0,
        alpha=lambda x, a: 1.0,
        running_cost=lambda x, a: 1.0,
        boundary_payoff=lambda x: 0.0,
    )
    problem = ControlProblem(
        domain=Domain(-1.0, 1.0),
        actions=FiniteActions((0.0,)),
        coeffs=coeffs,
        sigma_min=math.sqrt(2.0),
        alpha_min=1.0,
    )

    def exact_value(x):
        x = np.asarray(x, dtype=float)
        return 1.0 - np.cosh(x) / math.cosh(1.0)

    def optimal_policy(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    return OracleProblem("manufactured", problem, exact_value, optimal_policy)


_ORACLES = {
    "example1": example_one,
    "example2": example_two,
    "manufactured": manufactured_problem,
}

ORACLE_NAMES = tuple(_ORACLES)


def get_oracle(name: str) -> OracleProblem:
    """Look an oracle up by name ("example1", "example2", "manufactured")."""
    try:
        return _ORACLES[name]()
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}; available: {', '.join(ORACLE_NAMES)}") from None
