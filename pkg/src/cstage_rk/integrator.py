"""Implicit RK time stepping and the polynomial-stage csRK step.

Both steppers solve their stage equations by fixed-point iteration by
default, or by a simplified Newton method whose finite-difference Jacobian
is formed once per step at ``(t, z)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cstage import CsrkMethod
from .errors import FamilyMismatch, NoConvergence
from .orthopoly import eval_all
from .problems import IvpProblem
from .quadrature import QuadratureRule
from .tableau import ButcherTableau

__all__ = [
    "SolverMode",
    "StageSolveConfig",
    "Trajectory",
    "rk_step",
    "cs_poly_step",
    "integrate",
    "convergence_study",
    "convergence_order",
]

FD_STEP = 1e-7


class SolverMode(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    NEWTON = "newton"


@dataclass(frozen=True)
class StageSolveConfig:
    mode: SolverMode = SolverMode.FIXED_POINT
    tolerance: float = 1e-14
    max_iterations: int = 100

    def __post_init__(self):
        object.__setattr__(self, "mode", SolverMode(self.mode))
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


DEFAULT_CONFIG = StageSolveConfig()


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energy_error: Optional[np.ndarray] = None
    solution_error: Optional[np.ndarray] = None
    # stage iterations used per step, diagnostic only
    iterations: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.times.size


def _eval_stages(problem: IvpProblem, t: float, times: np.ndarray, Z: np.ndarray) -> np.ndarray:
    return np.array([problem.f(t + ti, zi) for ti, zi in zip(times, Z)])


def _fd_jacobian(problem: IvpProblem, t: float, z: np.ndarray) -> np.ndarray:
    f0 = problem.f(t, z)
    J = np.empty((z.size, z.size))
    for k in range(z.size):
        dz = z.copy()
        dz[k] += FD_STEP
        J[:, k] = (problem.f(t, dz) - f0) / FD_STEP
    return J


def _solve_stages(problem, t, z, h, times, base, coupling, to_stages, cfg):
    """Solve ``Y = base + h * coupling @ F(to_stages @ Y)`` for ``Y``.

    ``Y`` holds one row per unknown (stage values for RK, basis coefficients
    for the polynomial form); ``to_stages`` maps it to stage values at the
    nodes.  Returns ``(Y, F, iterations)`` with ``F`` evaluated at the final
    iterate.
    """
    Y = base.copy()
    stages = to_stages @ Y
    if cfg.mode is SolverMode.NEWTON:
        J = _fd_jacobian(problem, t, z)
        n = Y.size
        lhs = np.eye(n) - h * np.kron(coupling @ to_stages, J)
        inv_lhs = np.linalg.inv(lhs)
    increment = np.inf
    for it in range(1, cfg.max_iterations + 1):
        F = _eval_stages(problem, t, times, stages)
        if cfg.mode is SolverMode.NEWTON:
            residual = Y - base - h * coupling @ F
            delta = -(inv_lhs @ residual.ravel()).reshape(Y.shape)
            Y_new = Y + delta
        else:
            Y_new = base + h * coupling @ F
        increment = float(np.max(np.abs(Y_new - Y)))
        Y = Y_new
        stages = to_stages @ Y
        if increment <= cfg.tolerance:
            return Y, _eval_stages(problem, t, times, stages), it
    raise NoConvergence(cfg.max_iterations, increment)


def rk_step(
    tab: ButcherTableau,
    problem: IvpProblem,
    t: float,
    z: np.ndarray,
    h: float,
    cfg: StageSolveConfig = DEFAULT_CONFIG,
    _stats: Optional[list] = None,
) -> np.ndarray:
    """Advance ``z`` by one step of the implicit RK method ``tab``."""
    if h == 0:
        raise ValueError("step size must be nonzero")
    z = np.asarray(z, dtype=float)
    base = np.tile(z, (tab.s, 1))
    _, F, it = _solve_stages(problem, t, z, h, tab.c * h, base, tab.A, np.eye(tab.s), cfg)
    if _stats is not None:
        _stats.append(it)
    return z + h * (tab.b @ F)


def cs_poly_step(
    method: CsrkMethod,
    rule: QuadratureRule,
    problem: IvpProblem,
    t: float,
    z: np.ndarray,
    h: float,
    cfg: StageSolveConfig = DEFAULT_CONFIG,
    _stats: Optional[list] = None,
) -> np.ndarray:
    """One csRK step with the stage expanded as ``Z_tau = sum_i gamma_i P_i(tau)``.

    ``A_{tau,sigma}`` is a polynomial of degree ``k`` in ``tau``, so the
    stage lives in the span of ``P_0 .. P_k`` and the unknowns are the
    ``k + 1`` coefficient vectors ``gamma_i``.  Integrals in ``sigma`` use
    ``rule``.
    """
    if rule.family.kind is not method.family.kind:
        raise FamilyMismatch(
            f"rule is for {rule.family.kind.value}, method for {method.family.kind.value}"
        )
    if h == 0:
        raise ValueError("step size must be nonzero")
    z = np.asarray(z, dtype=float)
    k = method.alpha.shape[0] - 1
    nodes, weights = rule.nodes, rule.weights
    basis_at_nodes = eval_all(method.family, k, nodes)  # (k+1, s)
    p0 = basis_at_nodes[0, 0]
    wb = weights * method.B_at(nodes)

    # A_{tau,c_m} w_m = sum_i G[i, m] P_i(tau)
    G = (method.alpha @ basis_at_nodes) * wb[None, :]
    G[0] += 0.5 / p0 * wb
    base = np.zeros((k + 1, z.size))
    base[0] = z / p0
    to_stages = basis_at_nodes.T

    _, F, it = _solve_stages(problem, t, z, h, nodes * h, base, G, to_stages, cfg)
    if _stats is not None:
        _stats.append(it)
    return z + h * (wb @ F)


def integrate(
    tab: ButcherTableau,
    problem: IvpProblem,
    h: float,
    n_steps: int,
    cfg: StageSolveConfig = DEFAULT_CONFIG,
) -> Trajectory:
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    times = problem.t0 + h * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, problem.dimension))
    states[0] = problem.z0
    stats: list = []
    z = problem.z0
    for n in range(n_steps):
        try:
            z = rk_step(tab, problem, times[n], z, h, cfg, stats)
        except NoConvergence as exc:
            exc.step = n
            raise
        states[n + 1] = z

    energy_error = solution_error = None
    if problem.energy is not None:
        h0 = problem.energy(states[0])
        energy_error = np.abs(np.array([problem.energy(s) for s in states]) - h0)
    if problem.exact is not None:
        exact = np.array([problem.exact(t) for t in times])
        solution_error = np.linalg.norm(states - exact, axis=1)
    return Trajectory(times, states, energy_error, solution_error, np.array(stats))


def _check_halving(h_list: Sequence[float], t_end: float) -> None:
    if len(h_list) < 4:
        raise ValueError("need at least 4 step sizes")
    for big, small in zip(h_list, h_list[1:]):
        if not np.isclose(big, 2 * small, rtol=1e-12):
            raise ValueError("each step size must halve the previous one")
    for h in h_list:
        n = t_end / h
        if not np.isclose(n, round(n), rtol=0, atol=1e-9) or round(n) < 1:
            raise ValueError(f"t_end={t_end} is not an integer multiple of h={h}")


def convergence_study(
    tab: ButcherTableau,
    problem: IvpProblem,
    t_end: float,
    h_list: Sequence[float],
    cfg: StageSolveConfig = DEFAULT_CONFIG,
) -> tuple[np.ndarray, float]:
    """Final-time errors for each ``h`` and the fitted log-log slope."""
    if problem.exact is None:
        raise ValueError(f"{problem.name} has no exact solution")
    _check_halving(h_list, t_end)
    errors = []
    for h in h_list:
        n = int(round(t_end / h))
        traj = integrate(tab, problem, h, n, cfg)
        errors.append(traj.solution_error[-1])
    errors = np.array(errors)
    slope = np.polyfit(np.log(h_list), np.log(errors), 1)[0]
    return errors, float(slope)


def convergence_order(tab, problem, t_end, h_list, cfg: StageSolveConfig = DEFAULT_CONFIG) -> float:
    """Least-squares slope of ``log(final error)`` against ``log(h)``."""
    return convergence_study(tab, problem, t_end, h_list, cfg)[1]
