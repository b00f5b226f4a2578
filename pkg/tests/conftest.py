"""Shared test helpers: randomized problem templates built from expressions."""

import numpy as np
import pytest

from piadiff.expressions import parse
from piadiff.problem import CoefficientField, ControlProblem, Domain, IntervalActions


def random_template_problem(rng: np.random.Generator) -> ControlProblem:
    """Random bounded-coefficient problem on (-1, 1) with interval actions.

    Coefficients come from a closed expression template with sigma >= 0.3,
    alpha >= 0.2, f >= 0 and g >= 0; the drift changes sign in both x and a
    so both upwind branches get exercised.
    """
    c = rng.uniform(0.0, 1.0, size=6)
    d = rng.uniform(-2.0, 2.0, size=2)
    sigma_src = f"0.3 + {c[0]:.6f}*abs(x) + {c[1]:.6f}*cosh(a) - {c[1]:.6f}"
    mu_src = f"{d[0]:.6f}*x + {d[1]:.6f}*a"
    alpha_src = f"0.2 + {c[2]:.6f}*(1+sgn(x))/2 + {c[3]:.6f}*abs(a)"
    f_src = f"{c[4]:.6f} + {c[5]:.6f}*max(x, 0)"
    g_src = f"{c[0]:.6f}"
    coeffs = CoefficientField(
        sigma=parse(sigma_src),
        mu=parse(mu_src),
        alpha=parse(alpha_src),
        running_cost=parse(f_src),
        boundary_payoff=lambda x, _g=parse(g_src, variables=("x",)): _g(x),
    )
    return ControlProblem(
        domain=Domain(-1.0, 1.0),
        actions=IntervalActions(-1.0, 1.0),
        coeffs=coeffs,
        sigma_min=0.3,
        alpha_min=0.2,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
