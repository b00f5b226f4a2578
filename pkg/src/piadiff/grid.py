"""Uniform spatial grid and the monotone (upwind) finite-difference assembly.

The policy-frozen generator is discretised as a tridiagonal system over the
interior nodes: central differences for the diffusion term, first-order
upwind differences for the drift (forward when mu >= 0, backward otherwise)
and the killing rate on the diagonal.  Upwinding makes the assembled matrix
an M-matrix for any drift magnitude, which is what gives the discrete
scheme a maximum principle and the iteration its monotonicity.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .problem import (
    CoefficientError,
    ControlProblem,
    Domain,
    boundary_values,
    eval_coefficient,
)


class AssemblyContractError(RuntimeError):
    """The tridiagonal system violates the M-matrix contract (bug upstream)."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid with nodes left + i*spacing, i = 0..n_cells."""

    domain: Domain
    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError(f"n_cells must be an integer >= 2, got {self.n_cells}")

    @property
    def spacing(self) -> float:
        return self.domain.width / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @cached_property
    def nodes(self) -> np.ndarray:
        # linspace anchors both endpoints exactly; spacing error is not accumulated
        return np.linspace(self.domain.left, self.domain.right, self.n_cells + 1)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]


@dataclass(eq=False)
class GridFunction:
    """Real-valued function sampled at the grid nodes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"values must have length {self.grid.n_nodes}, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function values must all be finite")

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))


@dataclass(eq=False)
class GridPolicy:
    """Markov policy sampled at the grid nodes.

    Interior entries drive the solver; the two boundary entries are carried
    along but never used by it.
    """

    grid: Grid
    actions: np.ndarray

    def __post_init__(self):
        self.actions = np.asarray(self.actions, dtype=float)
        if self.actions.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"actions must have length {self.grid.n_nodes}, got shape {self.actions.shape}"
            )
        if not np.all(np.isfinite(self.actions)):
            raise ValueError("policy actions must all be finite")

    @classmethod
    def constant(cls, grid: Grid, action: float) -> "GridPolicy":
        return cls(grid, np.full(grid.n_nodes, float(action)))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridPolicy":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))


@dataclass(eq=False)
class TridiagonalSystem:
    """Tridiagonal M-matrix system over the interior unknowns.

    Invariant: diag > 0, sub <= 0, sup <= 0 and diag >= |sub| + |sup| in
    every row (strictly whenever the killing rate at that node is
    positive).  The first sub and last sup entries are zero: boundary data
    is eliminated into the right-hand side.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.sup = np.asarray(self.sup, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        m = self.diag.shape[0]
        if m < 1 or any(arr.shape != (m,) for arr in (self.sub, self.sup, self.rhs)):
            raise ValueError("sub, diag, sup, rhs must be equal-length 1-D arrays")
        if not np.all(self.diag > 0):
            raise AssemblyContractError("diagonal entries must be positive")
        if not (np.all(self.sub <= 0) and np.all(self.sup <= 0)):
            raise AssemblyContractError("off-diagonal entries must be nonpositive")
        if not np.all(self.diag >= np.abs(self.sub) + np.abs(self.sup)):
            raise AssemblyContractError("rows must be diagonally dominant")

    @property
    def size(self) -> int:
        return self.diag.shape[0]


def _eval_interior(fn, name, x, a):
    """Evaluate a coefficient over interior nodes, raising with node context.

    x and a broadcast against each other; the first axis of the result
    indexes interior nodes (node i is row i-1).
    """
    vals = eval_coefficient(fn, name, x, a)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        x_bad = float(np.broadcast_to(x, vals.shape)[idx])
        a_bad = float(np.broadcast_to(a, vals.shape)[idx])
        raise CoefficientError(
            f"{name}(x={x_bad!r}, a={a_bad!r}) evaluated to {vals[idx]!r}"
            f" at interior node {int(idx[0]) + 1}"
        )
    return vals


def require_compatible(p: ControlProblem, grid: Grid) -> None:
    if grid.domain != p.domain:
        raise ValueError(f"grid domain {grid.domain} does not match problem domain {p.domain}")


def assemble_operator(p: ControlProblem, pol: GridPolicy) -> TridiagonalSystem:
    """Assemble -L^pi u = f as a tridiagonal M-matrix system.

    For interior node i with action a = pol.actions[i]: diffusion by central
    differences with weight sigma^2/(2 h^2), drift upwinded by the sign of
    mu(x_i, a), killing rate on the diagonal.  Dirichlet data g(left),
    g(right) is folded into the right-hand side of the first and last rows.
    """
    require_compatible(p, pol.grid)
    grid = pol.grid
    x = grid.interior
    a = pol.actions[1:-1]
    ok = p.actions.contains(a)
    if not np.all(ok):
        i = int(np.argmin(ok))
        raise ValueError(f"policy action {a[i]!r} at interior node {i + 1} is outside the action space")

    h = grid.spacing
    sig = _eval_interior(p.coeffs.sigma, "sigma", x, a)
    mu = _eval_interior(p.coeffs.mu, "mu", x, a)
    alpha = _eval_interior(p.coeffs.alpha, "alpha", x, a)
    f = _eval_interior(p.coeffs.running_cost, "running_cost", x, a)
    if np.any(alpha < 0):
        i = int(np.argmax(alpha < 0))
        raise CoefficientError(
            f"alpha(x={x[i]!r}, a={a[i]!r}) = {alpha[i]!r} violates the alpha >= 0 contract"
        )

    half = 0.5 * sig * sig / (h * h)
    sub = -(half + np.maximum(-mu, 0.0) / h)
    sup = -(half + np.maximum(mu, 0.0) / h)
    # diag built from the off-diagonals so dominance holds exactly in floating point
    diag = -(sub + sup) + alpha

    g_l, g_r = boundary_values(p)
    rhs = f.astype(float, copy=True)
    rhs[0] -= sub[0] * g_l
    rhs[-1] -= sup[-1] * g_r
    sub = sub.copy()
    sup = sup.copy()
    sub[0] = 0.0
    sup[-1] = 0.0
    return TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)


def solve_tridiagonal(sys: TridiagonalSystem) -> np.ndarray:
    """Solve the tridiagonal system by forward elimination / back substitution.

    Raises AssemblyContractError on a zero or sign-flipped pivot, which for
    a correctly assembled M-matrix cannot occur.
    """
    m = sys.size
    sub, diag, sup, rhs = sys.sub, sys.diag, sys.sup, sys.rhs
    c = np.empty(m)
    d = np.empty(m)
    piv = diag[0]
    if not piv > 0:
        raise AssemblyContractError(f"non-positive pivot {piv!r} at row 0")
    c[0] = sup[0] / piv
    d[0] = rhs[0] / piv
    for i in range(1, m):
        piv = diag[i] - sub[i] * c[i - 1]
        if not piv > 0:
            raise AssemblyContractError(f"non-positive pivot {piv!r} at row {i}")
        c[i] = sup[i] / piv
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv
    u = np.empty(m)
    u[-1] = d[-1]
    for i in range(m - 2, -1, -1):
        u[i] = d[i] - c[i] * u[i + 1]
    return u


def sample(gf: GridFunction, x: float) -> float:
    """Linear interpolation of a grid function; exact at the nodes."""
    dom = gf.grid.domain
    if not dom.left <= x <= dom.right:
        raise ValueError(f"x={x!r} is outside the closed domain [{dom.left}, {dom.right}]")
    return float(np.interp(x, gf.grid.nodes, gf.values))


def difference_derivatives(gf: GridFunction, i: int):
    """One-sided and central differences at interior node i.

    Returns (forward, backward, second); callers pick the one-sided
    difference matching the upwind rule used in assembly.
    """
    n = gf.grid.n_cells
    if not 1 <= i <= n - 1:
        raise IndexError(f"interior node index must be in [1, {n - 1}], got {i}")
    h = gf.grid.spacing
    v = gf.values
    fwd = (v[i + 1] - v[i]) / h
    bwd = (v[i] - v[i - 1]) / h
    d2 = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h)
    return float(fwd), float(bwd), float(d2)


def interior_differences(gf: GridFunction):
    """Vectorised (forward, backward, second) differences at all interior nodes."""
    h = gf.grid.spacing
    v = gf.values
    fwd = (v[2:] - v[1:-1]) / h
    bwd = (v[1:-1] - v[:-2]) / h
    d2 = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / (h * h)
    return fwd, bwd, d2
