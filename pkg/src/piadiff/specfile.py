"""Problem description files: YAML documents with expression coefficients.

Schema (all sections required):

    domain:       {left: -1.0, right: 1.0}
    actions:      {kind: interval, a_min: -1.0, a_max: 1.0}
                  or {kind: finite, values: [-1.0, 1.0]}
    coefficients: {sigma: "1", mu: "0", alpha: "4*a + 9/2",
                   f: "-13/2*sinh(2*max(x,0))", g: "-sinh(2)"}
    floors:       {sigma_min: 1.0, alpha_min: 0.5}
    grid:         {n_cells: 400}
    pia:          {residual_tol: 1.0e-6, max_iterations: 50, n_actions: 101}
    sim:          {step: 1.0e-3, n_paths: 10000, seed: 1, t_max: 10.0}

sigma, mu, alpha and f are expressions in x and a; g is an expression in x
only.  Loading validates every invariant eagerly, naming the offending
field, and re-serialising a loaded spec yields a semantically identical
document.
"""

from dataclasses import dataclass

import yaml

from .driver import PIAConfig
from .expressions import Expression, parse
from .montecarlo import SimConfig
from .problem import (
    ActionSpace,
    CoefficientField,
    ControlProblem,
    Domain,
    FiniteActions,
    IntervalActions,
)


class SpecError(ValueError):
    """A problem description file failed to parse or validate."""


@dataclass
class ProblemSpec:
    """Parsed problem description."""

    domain: Domain
    actions: ActionSpace
    sigma: Expression
    mu: Expression
    alpha: Expression
    f: Expression
    g: Expression
    sigma_min: float
    alpha_min: float
    n_cells: int
    pia: PIAConfig
    sim: SimConfig


def _section(doc: dict, name: str) -> dict:
    if name not in doc:
        raise SpecError(f"missing section {name!r}")
    sec = doc[name]
    if not isinstance(sec, dict):
        raise SpecError(f"section {name!r} must be a mapping")
    return sec


def _get(sec: dict, section: str, key: str, kind, type_name: str):
    if key not in sec:
        raise SpecError(f"{section}.{key}: missing")
    value = sec[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SpecError(f"{section}.{key}: expected {type_name}, got {value!r}")
    return value


def _expression(sec: dict, section: str, key: str, variables) -> Expression:
    source = _get(sec, section, key, str, "an expression string")
    try:
        return parse(source, variables)
    except ValueError as exc:
        raise SpecError(f"{section}.{key}: {exc}") from exc


def parse_spec(doc: dict) -> ProblemSpec:
    """Build a ProblemSpec from a decoded YAML document."""
    if not isinstance(doc, dict):
        raise SpecError("document must be a mapping of sections")
    known = {"domain", "actions", "coefficients", "floors", "grid", "pia", "sim"}
    unknown = set(doc) - known
    if unknown:
        raise SpecError(f"unknown section(s): {', '.join(sorted(unknown))}")

    dom_sec = _section(doc, "domain")
    try:
        domain = Domain(
            left=_get(dom_sec, "domain", "left", float, "a number"),
            right=_get(dom_sec, "domain", "right", float, "a number"),
        )
    except ValueError as exc:
        raise SpecError(f"domain: {exc}") from exc

    act_sec = _section(doc, "actions")
    kind = _get(act_sec, "actions", "kind", str, "'interval' or 'finite'")
    try:
        if kind == "interval":
            actions = IntervalActions(
                a_min=_get(act_sec, "actions", "a_min", float, "a number"),
                a_max=_get(act_sec, "actions", "a_max", float, "a number"),
            )
        elif kind == "finite":
            values = _get(act_sec, "actions", "values", list, "a list of numbers")
            actions = FiniteActions(tuple(values))
        else:
            raise SpecError(f"actions.kind: expected 'interval' or 'finite', got {kind!r}")
    except SpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecError(f"actions: {exc}") from exc

    coeff_sec = _section(doc, "coefficients")
    sigma = _expression(coeff_sec, "coefficients", "sigma", ("x", "a"))
    mu = _expression(coeff_sec, "coefficients", "mu", ("x", "a"))
    alpha = _expression(coeff_sec, "coefficients", "alpha", ("x", "a"))
    f = _expression(coeff_sec, "coefficients", "f", ("x", "a"))
    g = _expression(coeff_sec, "coefficients", "g", ("x",))

    floor_sec = _section(doc, "floors")
    sigma_min = _get(floor_sec, "floors", "sigma_min", float, "a number")
    alpha_min = _get(floor_sec, "floors", "alpha_min", float, "a number")

    grid_sec = _section(doc, "grid")
    n_cells = _get(grid_sec, "grid", "n_cells", int, "an integer")
    if n_cells < 2:
        raise SpecError(f"grid.n_cells: must be >= 2, got {n_cells}")

    pia_sec = _section(doc, "pia")
    try:
        pia = PIAConfig(
            residual_tol=_get(pia_sec, "pia", "residual_tol", float, "a number"),
            max_iterations=_get(pia_sec, "pia", "max_iterations", int, "an integer"),
            n_actions=_get(pia_sec, "pia", "n_actions", int, "an integer"),
        )
    except ValueError as exc:
        raise SpecError(f"pia: {exc}") from exc

    sim_sec = _section(doc, "sim")
    try:
        sim = SimConfig(
            step=_get(sim_sec, "sim", "step", float, "a number"),
            n_paths=_get(sim_sec, "sim", "n_paths", int, "an integer"),
            seed=_get(sim_sec, "sim", "seed", int, "an integer"),
            t_max=_get(sim_sec, "sim", "t_max", float, "a number"),
        )
    except ValueError as exc:
        raise SpecError(f"sim: {exc}") from exc

    try:
        spec = ProblemSpec(
            domain=domain,
            actions=actions,
            sigma=sigma,
            mu=mu,
            alpha=alpha,
            f=f,
            g=g,
            sigma_min=sigma_min,
            alpha_min=alpha_min,
            n_cells=n_cells,
            pia=pia,
            sim=sim,
        )
        # surface ControlProblem invariants (floors) at parse time
        spec_to_problem(spec)
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(f"floors: {exc}") from exc
    return spec


def loads_spec(text: str) -> ProblemSpec:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SpecError(f"invalid YAML: {exc}") from exc
    return parse_spec(doc)


def load_spec(path) -> ProblemSpec:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_spec(handle.read())


def spec_to_dict(spec: ProblemSpec) -> dict:
    if isinstance(spec.actions, IntervalActions):
        actions = {"kind": "interval", "a_min": spec.actions.a_min, "a_max": spec.actions.a_max}
    else:
        actions = {"kind": "finite", "values": list(spec.actions.values)}
    return {
        "domain": {"left": spec.domain.left, "right": spec.domain.right},
        "actions": actions,
        "coefficients": {
            "sigma": spec.sigma.source,
            "mu": spec.mu.source,
            "alpha": spec.alpha.source,
            "f": spec.f.source,
            "g": spec.g.source,
        },
        "floors": {"sigma_min": spec.sigma_min, "alpha_min": spec.alpha_min},
        "grid": {"n_cells": spec.n_cells},
        "pia": {
            "residual_tol": spec.pia.residual_tol,
            "max_iterations": spec.pia.max_iterations,
            "n_actions": spec.pia.n_actions,
        },
        "sim": {
            "step": spec.sim.step,
            "n_paths": spec.sim.n_paths,
            "seed": spec.sim.seed,
            "t_max": spec.sim.t_max,
        },
    }


def dumps_spec(spec: ProblemSpec) -> str:
    """Serialise; re-parsing yields the same parsed values."""
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=True)


def spec_to_problem(spec: ProblemSpec) -> ControlProblem:
    """Instantiate the control problem with expression-backed coefficients."""
    coeffs = CoefficientField(
        sigma=spec.sigma,
        mu=spec.mu,
        alpha=spec.alpha,
        running_cost=spec.f,
        boundary_payoff=lambda x: spec.g(x),
    )
    return ControlProblem(
        domain=spec.domain,
        actions=spec.actions,
        coeffs=coeffs,
        sigma_min=spec.sigma_min,
        alpha_min=spec.alpha_min,
    )
