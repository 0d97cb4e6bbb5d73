"""Backward (final value) and forward one-step ODE solvers for arbitrary value problems."""

from .analysis import (
    RK4_CONVERGENCE_ROOT,
    AnalysisReport,
    LipschitzEstimate,
    amplification_factor,
    bisect_stability_boundary,
    convergence_condition,
    decrement_lipschitz_bound,
    estimate_lipschitz,
    global_error_bound,
    observed_order,
    stability_condition,
)
from .avp import AvpSolution, solve_avp, solve_piecewise_avp
from .core import (
    AvpProblem,
    BoundaryCondition,
    Direction,
    Interval,
    OdeSystem,
    ProblemClass,
    Segment,
    Trajectory,
    classify_problem,
    make_uniform_grid,
)
from .expr import compile_system, evaluate, parse, to_text
from .reduction import (
    DelaySpec,
    HighOrderPolyOde,
    reduce_to_first_order,
    shift_delay,
    solve_high_order_fvp,
)
from .steppers import (
    CLASSICAL_RK4,
    MethodKind,
    MethodSpec,
    RkTableau,
    StepRecord,
    decrement_function,
    integrate_leg,
    step_euler_pc_backward,
    step_explicit_euler_backward,
    step_general_rk_backward,
    step_rk4_backward,
    step_rk4_forward,
    step_trapezoid_pc_backward,
)

__version__ = "0.1.0"
