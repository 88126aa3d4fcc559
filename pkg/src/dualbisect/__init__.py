"""Dual bisection toolkit for problems with one scalar complicating
constraint: oracle abstraction, bisection solver, exact small-MILP kernel,
decentralized multi-agent composition, subgradient baseline and benchmark
harness."""

from . import errors
from .agents import (
    Agent,
    AgentResponse,
    DecentralizedOracle,
    JointMipOracle,
    MultiAgentInstance,
    agent_best_response,
    compose_oracle,
    dump_instance,
    instance_from_dict,
    instance_to_dict,
    joint_mip,
    load_instance,
)
from .benchmark import (
    ComparisonReport,
    GeneratorConfig,
    delta_f_pct,
    dual_grid,
    generate_instance,
    run_comparison,
    verify_instance,
)
from .bisection import (
    DualBiConfig,
    DualBiIterate,
    DualBiResult,
    doubling_phase,
    solve,
)
from .lagrangian import (
    DualEvaluation,
    FiniteCandidateOracle,
    LagrangianOracle,
    PrimalPoint,
    evaluate_dual,
    warm_start_lambda_ref,
)
from .milp import (
    LinearProgram,
    MipSolution,
    MixedIntegerProgram,
    branch_and_bound,
    brute_force,
    simplex_solve,
    solve_lp,
)
from .milp import BACKEND as kernel_backend
from .subgradient import (
    CompetitorResult,
    SubgradientConfig,
    check_rho_halt,
    scaled_alpha_bar,
)
from .subgradient import run as run_subgradient

__version__ = "0.1.0"
