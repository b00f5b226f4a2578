"""Policy improvement solver for controlled 1-D killed diffusions.

Public surface: problem definition (problem), grid discretisation (grid),
policy evaluation/improvement and the iteration driver (evaluate, improve,
driver), closed-form benchmarks (oracles), Monte Carlo cross-validation
(montecarlo), the coefficient expression language (expressions) and
problem description files (specfile).
"""

__version__ = "0.1.0"

from .driver import (
    IterationRecord,
    PIAConfig,
    PIAReport,
    Termination,
    check_monotone_sequence,
    run_pia,
)
from .evaluate import evaluate_policy
from .grid import (
    AssemblyContractError,
    Grid,
    GridFunction,
    GridPolicy,
    TridiagonalSystem,
    assemble_operator,
    difference_derivatives,
    sample,
    solve_tridiagonal,
)
from .improve import ImprovementResult, hjb_residual, improve_policy
from .montecarlo import (
    Construction,
    JointLawEstimate,
    PayoffEstimate,
    SimConfig,
    ks_critical_value,
    ks_statistic,
    simulate_payoff,
    tanaka_joint_law,
)
from .oracles import ORACLE_NAMES, OracleProblem, example_one, example_two, get_oracle, manufactured_problem
from .problem import (
    ActionSpace,
    CoefficientError,
    CoefficientField,
    ControlProblem,
    Domain,
    FiniteActions,
    IntervalActions,
    ValidationReport,
    apply_generator,
    validate_problem,
)
from .specfile import ProblemSpec, SpecError, dumps_spec, load_spec, loads_spec, spec_to_problem

__all__ = [
    "__version__",
    "ActionSpace",
    "AssemblyContractError",
    "CoefficientError",
    "CoefficientField",
    "Construction",
    "ControlProblem",
    "Domain",
    "FiniteActions",
    "Grid",
    "GridFunction",
    "GridPolicy",
    "ImprovementResult",
    "IntervalActions",
    "IterationRecord",
    "JointLawEstimate",
    "ORACLE_NAMES",
    "OracleProblem",
    "PIAConfig",
    "PIAReport",
    "PayoffEstimate",
    "ProblemSpec",
    "SimConfig",
    "SpecError",
    "Termination",
    "TridiagonalSystem",
    "ValidationReport",
    "apply_generator",
    "assemble_operator",
    "check_monotone_sequence",
    "difference_derivatives",
    "dumps_spec",
    "evaluate_policy",
    "example_one",
    "example_two",
    "get_oracle",
    "hjb_residual",
    "improve_policy",
    "ks_critical_value",
    "ks_statistic",
    "load_spec",
    "loads_spec",
    "manufactured_problem",
    "run_pia",
    "sample",
    "simulate_payoff",
    "solve_tridiagonal",
    "spec_to_problem",
    "tanaka_joint_law",
    "validate_problem",
]
