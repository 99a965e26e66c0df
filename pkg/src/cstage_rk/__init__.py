"""Symplectic Runge-Kutta methods derived from continuous-stage methods with weight functions."""
from .cstage import (
    AlphaSolution,
    CsrkMethod,
    SimplifyingOrders,
    assemble_method,
    build_B,
    check_B,
    check_C,
    check_D,
    check_symmetric_cs,
    check_symplectic_cs,
    predicted_cs_order,
    solve_symplectic_alpha,
)
from .errors import CstageError, NoConvergence
from .integrator import (
    SolverMode,
    StageSolveConfig,
    Trajectory,
    convergence_order,
    convergence_study,
    cs_poly_step,
    integrate,
    rk_step,
)
from .orthopoly import Kind, PolynomialFamily, eval_all, eval_poly, make_family, poly_coeffs
from .problems import IvpProblem, make_problem
from .quadrature import QuadratureRule, gauss_rule
from .tableau import (
    BUILTINS,
    ButcherTableau,
    builtin,
    builtin_method,
    check_order_conditions,
    check_symmetric_rk,
    check_symplectic_rk,
    discretize,
    from_flat,
    to_flat,
)

__version__ = "0.1.0"
