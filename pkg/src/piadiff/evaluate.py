"""Policy evaluation: payoff of a Markov grid policy as a boundary-value solve."""

import numpy as np

from .grid import GridFunction, GridPolicy, assemble_operator, solve_tridiagonal
from .problem import ControlProblem, boundary_values


def evaluate_policy(p: ControlProblem, pol: GridPolicy) -> GridFunction:
    """Payoff of the policy: the solution of the policy-frozen linear system.

    The returned grid function carries the boundary payoff bit-for-bit at
    the endpoints; at every interior node the discrete generator applied to
    it plus the running reward at the policy's action vanishes to solver
    tolerance.
    """
    system = assemble_operator(p, pol)
    interior = solve_tridiagonal(system)
    g_l, g_r = boundary_values(p)
    values = np.empty(pol.grid.n_nodes)
    values[0] = g_l
    values[-1] = g_r
    values[1:-1] = interior
    return GridFunction(pol.grid, values)
