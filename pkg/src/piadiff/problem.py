"""Control problem definition: domain, action space, coefficients and floors.

A problem instance bundles the diffusion coefficient ``sigma``, the drift
``mu``, the killing (discount) rate ``alpha``, the running reward
``running_cost`` and the boundary payoff ``boundary_payoff`` on a bounded
interval, together with the declared floors ``sigma_min`` (uniform
ellipticity) and ``alpha_min`` (minimum killing rate).

Coefficient callables must accept numpy arrays for both arguments and
broadcast; returning a plain scalar for array input is also fine.  They are
expected to be re-entrant: the solver may evaluate them concurrently from
multiple threads.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np


class CoefficientError(ValueError):
    """A model coefficient evaluated to a non-finite or contract-breaking value."""


@dataclass(frozen=True)
class Domain:
    """Open bounded interval (left, right)."""

    left: float
    right: float

    def __post_init__(self):
        if not (np.isfinite(self.left) and np.isfinite(self.right)):
            raise ValueError("domain endpoints must be finite")
        if not self.left < self.right:
            raise ValueError(f"domain requires left < right, got ({self.left}, {self.right})")

    @property
    def width(self) -> float:
        return self.right - self.left

    def contains_closure(self, x: float) -> bool:
        return self.left <= x <= self.right


@dataclass(frozen=True)
class IntervalActions:
    """Compact interval of admissible actions [a_min, a_max]."""

    a_min: float
    a_max: float

    def __post_init__(self):
        if not (np.isfinite(self.a_min) and np.isfinite(self.a_max)):
            raise ValueError("action bounds must be finite")
        if self.a_min > self.a_max:
            raise ValueError(f"interval actions require a_min <= a_max, got ({self.a_min}, {self.a_max})")

    def candidates(self, n_actions: int) -> np.ndarray:
        """Equally spaced candidate actions including both endpoints."""
        if self.a_min == self.a_max:
            return np.array([self.a_min])
        if n_actions < 2:
            raise ValueError("n_actions must be >= 2 for interval action spaces")
        return np.linspace(self.a_min, self.a_max, n_actions)

    def contains(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return (a >= self.a_min) & (a <= self.a_max)

    @property
    def lowest(self) -> float:
        return self.a_min


@dataclass(frozen=True)
class FiniteActions:
    """Finite action set; values strictly increasing."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) == 0:
            raise ValueError("finite action set must be nonempty")
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("finite action values must be finite")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("finite action values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    def candidates(self, n_actions: int) -> np.ndarray:
        # n_actions applies to interval spaces only; a finite set is used as-is.
        return np.array(self.values)

    def contains(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        return np.isin(a, np.array(self.values))

    @property
    def lowest(self) -> float:
        return self.values[0]


ActionSpace = Union[IntervalActions, FiniteActions]


@dataclass
class CoefficientField:
    """Model coefficients.

    ``sigma``, ``mu``, ``alpha`` and ``running_cost`` are functions of
    (x, a); ``boundary_payoff`` is a function of x, evaluated only at the
    two domain endpoints.  ``alpha`` must be nonnegative.
    """

    sigma: Callable
    mu: Callable
    alpha: Callable
    running_cost: Callable
    boundary_payoff: Callable


@dataclass
class ControlProblem:
    """A killed controlled diffusion on a bounded interval.

    ``sigma_min`` is the declared ellipticity floor (required positive);
    ``alpha_min`` the declared killing floor (zero is allowed on a bounded
    domain, where boundary exit is certain).  ``validate_problem`` checks
    the coefficients against these floors on a sampling grid.
    """

    domain: Domain
    actions: ActionSpace
    coeffs: CoefficientField
    sigma_min: float
    alpha_min: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.sigma_min) and self.sigma_min > 0):
            raise ValueError(f"sigma_min must be positive, got {self.sigma_min}")
        if not (np.isfinite(self.alpha_min) and self.alpha_min >= 0):
            raise ValueError(f"alpha_min must be nonnegative, got {self.alpha_min}")


@dataclass
class ValidationReport:
    """Outcome of coefficient validation.

    ``violations`` holds (check_name, x, a, observed_value) tuples; the
    report passes exactly when it is empty.
    """

    passed: bool
    violations: list

    def __post_init__(self):
        if self.passed != (len(self.violations) == 0):
            raise ValueError("passed must be true iff violations is empty")


def eval_coefficient(fn: Callable, name: str, x, a) -> np.ndarray:
    """Evaluate a coefficient callable, broadcasting scalars to the grid shape."""
    shape = np.broadcast(np.asarray(x), np.asarray(a)).shape
    with np.errstate(all="ignore"):
        out = fn(x, a)
    out = np.asarray(out, dtype=float)
    if out.shape != shape:
        out = np.broadcast_to(out, shape)
    return out


def boundary_values(p: ControlProblem) -> tuple:
    """Boundary payoff (g(left), g(right)), checked finite."""
    out = []
    for x in (p.domain.left, p.domain.right):
        with np.errstate(all="ignore"):
            g = float(p.coeffs.boundary_payoff(x))
        if not np.isfinite(g):
            raise CoefficientError(f"boundary_payoff({x!r}) evaluated to {g!r}")
        out.append(g)
    return tuple(out)


def validate_problem(p: ControlProblem, n_x: int, n_a: int) -> ValidationReport:
    """Check coefficient floors and finiteness on an n_x-by-n_a sampling grid.

    Samples the closed domain and the action space (a finite action set is
    sampled at its own values; n_a applies to interval spaces).  Records a
    violation for every sample where sigma < sigma_min, alpha < alpha_min,
    or any coefficient is non-finite.  Violations are data, not errors.
    """
    if n_x < 2:
        raise ValueError("n_x must be >= 2")
    if n_a < 1:
        raise ValueError("n_a must be >= 1")
    xs = np.linspace(p.domain.left, p.domain.right, n_x)
    if isinstance(p.actions, FiniteActions):
        acts = np.array(p.actions.values)
    else:
        acts = np.linspace(p.actions.a_min, p.actions.a_max, n_a)
    X, A = np.meshgrid(xs, acts, indexing="ij")

    violations = []

    def record(mask, check, vals):
        for i, j in np.argwhere(mask):
            violations.append((check, float(X[i, j]), float(A[i, j]), float(vals[i, j])))

    named = [
        ("sigma", p.coeffs.sigma),
        ("mu", p.coeffs.mu),
        ("alpha", p.coeffs.alpha),
        ("running_cost", p.coeffs.running_cost),
    ]
    for name, fn in named:
        vals = eval_coefficient(fn, name, X, A)
        finite = np.isfinite(vals)
        record(~finite, f"{name}_not_finite", vals)
        if name == "sigma":
            record(finite & (vals < p.sigma_min), "sigma_below_floor", vals)
        elif name == "alpha":
            record(finite & (vals < p.alpha_min), "alpha_below_floor", vals)

    for x in (p.domain.left, p.domain.right):
        with np.errstate(all="ignore"):
            g = float(p.coeffs.boundary_payoff(x))
        if not np.isfinite(g):
            violations.append(("boundary_payoff_not_finite", float(x), float("nan"), g))

    return ValidationReport(passed=not violations, violations=violations)


def apply_generator(p: ControlProblem, x: float, a: float, v: float, dv: float, d2v: float) -> float:
    """Apply the killed-diffusion generator at one point.

    Returns ``0.5*sigma(x,a)**2 * d2v + mu(x,a) * dv - alpha(x,a) * v``
    for caller-supplied value and derivative data.  Pure function of its
    inputs; linear in (v, dv, d2v).
    """
    coeffs = []
    for name, fn in (("sigma", p.coeffs.sigma), ("mu", p.coeffs.mu), ("alpha", p.coeffs.alpha)):
        with np.errstate(all="ignore"):
            c = float(fn(x, a))
        if not np.isfinite(c):
            raise CoefficientError(f"{name}(x={x!r}, a={a!r}) evaluated to {c!r}")
        coeffs.append(c)
    sig, mu, alpha = coeffs
    return 0.5 * sig * sig * d2v + mu * dv - alpha * v
