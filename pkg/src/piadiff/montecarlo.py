"""Probabilistic cross-validation of the solver.

Euler-Maruyama simulation of the controlled diffusion with killing
(discounting) and boundary exit estimates the payoff of a grid policy, and
a driving-noise construction demonstrates that two controls with equal
marginal laws can produce distinct joint laws of (state, control).

Exit is detected at step boundaries only (no bridge correction), which
introduces an O(sqrt(step)) bias; consumers should include an explicit
bias allowance.  Discounting is exp-based per step, exact for
piecewise-constant killing along the path and always in (0, 1].
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .grid import GridPolicy, require_compatible
from .problem import ControlProblem, boundary_values, eval_coefficient
from .rng import normal_pairs


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls: time step, path count, seed and horizon cap."""

    step: float
    n_paths: int
    seed: int
    t_max: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if not self.step < self.t_max:
            raise ValueError(f"step must be smaller than t_max, got step={self.step}, t_max={self.t_max}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class PayoffEstimate:
    """Sample mean and standard error of the simulated payoff."""

    mean: float
    std_error: float
    n_paths: int
    truncated_fraction: float

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        if not 0.0 <= self.truncated_fraction <= 1.0:
            raise ValueError("truncated_fraction must lie in [0, 1]")


class Construction(enum.Enum):
    PI = "PiConstruction"
    SIGMA = "SigmaConstruction"


@dataclass(frozen=True)
class JointLawEstimate:
    """Empirical P(X_t > 0, control_t = -1) for one construction."""

    construction: Construction
    t: float
    prob_estimate: float
    std_error: float

    def __post_init__(self):
        if not 0.0 <= self.prob_estimate <= 1.0:
            raise ValueError("prob_estimate must lie in [0, 1]")


def _n_steps(t: float, step: float) -> int:
    return max(1, int(round(t / step)))


def _coeff_step(fn, name, x, a, path_ids, time):
    """Evaluate a coefficient along alive paths, aborting on non-finite values."""
    vals = eval_coefficient(fn, name, x, a)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(
            f"{name}(x={x[i]!r}, a={a[i]!r}) evaluated to {vals[i]!r}"
            f" on path {int(path_ids[i])} at t={time!r}"
        )
    return vals


def _simulate_block(p, pol, x0, cfg, path_ids, payoffs):
    """Advance one block of paths to exit or truncation; returns truncated count.

    Fills payoffs[path_ids] in place.  All randomness is indexed by the
    global path id, so the partition of paths into blocks cannot change
    any result.
    """
    left, right = p.domain.left, p.domain.right
    g_l, g_r = boundary_values(p)
    h = cfg.step
    sqrt_h = math.sqrt(h)
    n_steps = _n_steps(cfg.t_max, cfg.step)
    grid = pol.grid
    inv_spacing = 1.0 / grid.spacing
    n_nodes = grid.n_nodes

    ids = np.asarray(path_ids, dtype=np.uint64)
    x = np.full(ids.shape, float(x0))
    disc = np.ones(ids.shape)
    reward = np.zeros(ids.shape)

    k = 0
    while k < n_steps and ids.size:
        z_even, z_odd = normal_pairs(cfg.seed, ids, k >> 1)
        for parity in (0, 1):
            if k >= n_steps or not ids.size:
                break
            z = z_even if parity == 0 else z_odd
            node = np.clip(np.rint((x - left) * inv_spacing).astype(np.intp), 0, n_nodes - 1)
            a = pol.actions[node]
            t_now = k * h
            sig = _coeff_step(p.coeffs.sigma, "sigma", x, a, ids, t_now)
            mu = _coeff_step(p.coeffs.mu, "mu", x, a, ids, t_now)
            alpha = _coeff_step(p.coeffs.alpha, "alpha", x, a, ids, t_now)
            f = _coeff_step(p.coeffs.running_cost, "running_cost", x, a, ids, t_now)

            reward = reward + disc * f * h
            disc = disc * np.exp(-alpha * h)
            x = x + mu * h + sig * sqrt_h * z

            below = x < left
            above = x > right
            exited = below | above
            if np.any(exited):
                exit_pay = reward[exited] + disc[exited] * np.where(below[exited], g_l, g_r)
                payoffs[ids[exited]] = exit_pay
                keep = ~exited
                ids = ids[keep]
                x = x[keep]
                disc = disc[keep]
                reward = reward[keep]
                if parity == 0:
                    z_odd = z_odd[keep]
            k += 1

    payoffs[ids] = reward  # still alive at the horizon: running reward only
    return int(ids.size)


def simulate_payoff(
    p: ControlProblem,
    pol: GridPolicy,
    x0: float,
    cfg: SimConfig,
    chunk_size: int = None,
) -> PayoffEstimate:
    """Estimate the payoff of a grid policy from x0 by killed Euler-Maruyama.

    Per path: Euler steps with nearest-node policy lookup, exp-based
    discount accumulation and discounted running reward; the first step
    landing outside the closed domain clamps to the crossed endpoint and
    collects the discounted boundary payoff.  Paths alive at t_max keep
    only their running reward and are counted as truncated.

    ``chunk_size`` is an execution detail (paths are advanced in blocks of
    this size); it cannot change any output because path noise is indexed
    by (seed, path, step) and the reduction runs in path order.
    """
    if not p.domain.contains_closure(x0):
        raise ValueError(f"x0={x0!r} is outside the closed domain")
    require_compatible(p, pol.grid)
    ok = p.actions.contains(pol.actions[1:-1])
    if not np.all(ok):
        i = int(np.argmin(ok))
        raise ValueError(f"policy action at interior node {i + 1} is outside the action space")

    n = cfg.n_paths
    if x0 == p.domain.left or x0 == p.domain.right:
        # started on the boundary: exits immediately with the boundary payoff
        g_l, g_r = boundary_values(p)
        g = g_l if x0 == p.domain.left else g_r
        return PayoffEstimate(mean=g, std_error=0.0, n_paths=n, truncated_fraction=0.0)

    payoffs = np.zeros(n)
    truncated = 0
    size = n if chunk_size is None else int(chunk_size)
    if size < 1:
        raise ValueError("chunk_size must be positive")
    for start in range(0, n, size):
        ids = np.arange(start, min(start + size, n), dtype=np.uint64)
        truncated += _simulate_block(p, pol, x0, cfg, ids, payoffs)

    mean = float(np.mean(payoffs))
    std_error = 0.0 if n == 1 else float(np.std(payoffs, ddof=1) / math.sqrt(n))
    return PayoffEstimate(
        mean=mean,
        std_error=std_error,
        n_paths=n,
        truncated_fraction=truncated / n,
    )


def tanaka_terminal_samples(t: float, cfg: SimConfig):
    """Terminal samples (W_t, X_t) of the two coupled constructions.

    W is a Gaussian random walk; X is its integral against sgn(W), i.e.
    X_{k+1} = X_k + sgn(W_k) (W_{k+1} - W_k) with sgn(0) = 1.  Both are
    driven by the same seed-indexed noise, so the two constructions are
    coupled path by path.
    """
    n_steps = _n_steps(t, cfg.step)
    sqrt_h = math.sqrt(cfg.step)
    ids = np.arange(cfg.n_paths, dtype=np.uint64)
    w = np.zeros(cfg.n_paths)
    x = np.zeros(cfg.n_paths)
    k = 0
    while k < n_steps:
        pair = normal_pairs(cfg.seed, ids, k >> 1)
        for z in pair:
            if k >= n_steps:
                break
            dw = sqrt_h * z
            sign = np.where(w >= 0.0, 1.0, -1.0)
            w = w + dw
            x = x + sign * dw
            k += 1
    return w, x


def tanaka_joint_law(t: float, cfg: SimConfig):
    """Joint-law probe P(X_t > 0, control_t = -1) for the two constructions.

    Both constructions use control = sgn(W) on the same driving walk W.
    For the first the controlled state IS W, so the event
    {X_t > 0, control_t = -1} is impossible and the estimate is exactly
    zero; for the second (state integrated against sgn(W)) the event has
    positive probability even though the marginal laws of the two states
    agree.
    """
    if t > cfg.t_max:
        raise ValueError(f"t={t!r} exceeds t_max={cfg.t_max!r}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    w, x = tanaka_terminal_samples(t, cfg)
    n = cfg.n_paths
    control = np.where(w >= 0.0, 1.0, -1.0)

    def estimate(event, construction):
        ct = int(np.count_nonzero(event))
        prob = ct / n
        se = math.sqrt(prob * (1.0 - prob) / n)
        return JointLawEstimate(construction=construction, t=t, prob_estimate=prob, std_error=se)

    pi_est = estimate((w > 0.0) & (control == -1.0), Construction.PI)
    sigma_est = estimate((x > 0.0) & (w < 0.0), Construction.SIGMA)
    return pi_est, sigma_est


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / a.size
    cdf_b = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_critical_value(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at level alpha."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    c = math.sqrt(-math.log(alpha / 2.0) / 2.0)
    return c * math.sqrt((n + m) / (n * m))
