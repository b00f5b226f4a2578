"""Policy improvement: pointwise argmax of the discrete action objective.

At each interior node the objective over candidate actions is

    0.5 * sigma(x,a)^2 * d2v + mu(x,a) * dv_upwind(a) - alpha(x,a) * v + f(x,a)

with the same upwind derivative selection as the operator assembly (the
upwind side follows the sign of mu(x,a) per candidate).  The achieved
maxima form the residual field whose sup-norm is the stopping quantity of
the iteration: it vanishes exactly at a fixed point of the discrete system.
"""

from dataclasses import dataclass

import numpy as np

from .grid import GridFunction, GridPolicy, interior_differences, require_compatible
from .grid import _eval_interior
from .problem import ControlProblem


@dataclass(eq=False)
class ImprovementResult:
    """Improved policy, residual field and its interior sup-norm."""

    policy: GridPolicy
    residual: GridFunction
    max_residual: float


def action_objective(p: ControlProblem, v: GridFunction, actions: np.ndarray) -> np.ndarray:
    """Objective at each interior node for one given action per node.

    ``actions`` has one entry per interior node.  Used to check the
    evaluation identity: at the actions of the policy that produced v the
    objective equals minus the linear-solve residual.
    """
    require_compatible(p, v.grid)
    x = v.grid.interior
    a = np.asarray(actions, dtype=float)
    if a.shape != x.shape:
        raise ValueError(f"actions must have one entry per interior node, got shape {a.shape}")
    fwd, bwd, d2 = interior_differences(v)
    sig = _eval_interior(p.coeffs.sigma, "sigma", x, a)
    mu = _eval_interior(p.coeffs.mu, "mu", x, a)
    alpha = _eval_interior(p.coeffs.alpha, "alpha", x, a)
    f = _eval_interior(p.coeffs.running_cost, "running_cost", x, a)
    dv = np.where(mu >= 0.0, fwd, bwd)
    return 0.5 * sig * sig * d2 + mu * dv - alpha * v.values[1:-1] + f


def improve_policy(p: ControlProblem, v: GridFunction, n_actions: int) -> ImprovementResult:
    """Argmax of the action objective at every interior node.

    Candidate actions are a finite action set as-is, or n_actions equally
    spaced points of an interval action space including both endpoints.
    Ties break toward the smallest action.  The boundary entries of the
    returned policy copy the adjacent interior choice; the residual field
    is zero at the boundary.
    """
    require_compatible(p, v.grid)
    grid = v.grid
    cands = p.actions.candidates(n_actions)
    x = grid.interior[:, None]
    a = cands[None, :]
    fwd, bwd, d2 = interior_differences(v)
    sig = _eval_interior(p.coeffs.sigma, "sigma", x, a)
    mu = _eval_interior(p.coeffs.mu, "mu", x, a)
    alpha = _eval_interior(p.coeffs.alpha, "alpha", x, a)
    f = _eval_interior(p.coeffs.running_cost, "running_cost", x, a)
    dv = np.where(mu >= 0.0, fwd[:, None], bwd[:, None])
    obj = 0.5 * sig * sig * d2[:, None] + mu * dv - alpha * v.values[1:-1, None] + f

    # argmax returns the first maximiser; candidates ascend, so ties go to
    # the smallest action
    best = np.argmax(obj, axis=1)
    rows = np.arange(obj.shape[0])
    achieved = obj[rows, best]

    actions = np.empty(grid.n_nodes)
    actions[1:-1] = cands[best]
    actions[0] = actions[1]
    actions[-1] = actions[-2]

    residual_values = np.zeros(grid.n_nodes)
    residual_values[1:-1] = achieved
    return ImprovementResult(
        policy=GridPolicy(grid, actions),
        residual=GridFunction(grid, residual_values),
        max_residual=float(np.max(np.abs(achieved))),
    )


def hjb_residual(p: ControlProblem, v: GridFunction, n_actions: int) -> float:
    """Sup-norm of the achieved objective maxima; equals improve_policy(...).max_residual."""
    return improve_policy(p, v, n_actions).max_residual
