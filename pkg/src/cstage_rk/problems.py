"""Test problems: Kepler two-body orbit, scalar exponential, planar pendulum."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = ["IvpProblem", "kepler", "exponential", "pendulum", "PROBLEMS", "make_problem"]


@dataclass(frozen=True, eq=False)
class IvpProblem:
    name: str
    f: Callable[[float, np.ndarray], np.ndarray]
    t0: float
    z0: np.ndarray
    exact: Optional[Callable[[float], np.ndarray]] = None
    energy: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        z0 = np.asarray(self.z0, dtype=float).reshape(-1)
        object.__setattr__(self, "z0", z0)
        if not np.all(np.isfinite(self.f(self.t0, z0))):
            raise ValueError(f"{self.name}: right-hand side is not finite at the initial point")
        if self.exact is not None and np.max(np.abs(self.exact(self.t0) - z0)) > 1e-12:
            raise ValueError(f"{self.name}: exact solution does not match z0 at t0")

    @property
    def dimension(self) -> int:
        return self.z0.size


def _kepler_rhs(t, z):
    p1, p2, q1, q2 = z
    r3 = (q1 * q1 + q2 * q2) ** 1.5
    return np.array([-q1 / r3, -q2 / r3, p1, p2])


def _kepler_energy(z):
    p1, p2, q1, q2 = z
    return 0.5 * (p1 * p1 + p2 * p2) - 1.0 / math.hypot(q1, q2)


def _kepler_exact(t):
    s, c = math.sin(t), math.cos(t)
    return np.array([-s, c, c, s])


def kepler() -> IvpProblem:
    """Circular Kepler orbit; state ordered ``(p1, p2, q1, q2)``."""
    return IvpProblem("kepler", _kepler_rhs, 0.0, [0.0, 1.0, 1.0, 0.0], _kepler_exact, _kepler_energy)


def exponential() -> IvpProblem:
    return IvpProblem(
        "exponential",
        lambda t, z: z.copy(),
        0.0,
        [1.0],
        lambda t: np.array([math.exp(t)]),
    )


def _pendulum_rhs(t, z):
    p, q = z
    return np.array([-math.sin(q), p])


def pendulum(q0: float = 1.0) -> IvpProblem:
    """``H = p^2/2 - cos q``; state ``(p, q)``, no closed-form solution."""
    return IvpProblem(
        "pendulum",
        _pendulum_rhs,
        0.0,
        [0.0, q0],
        energy=lambda z: 0.5 * z[0] ** 2 - math.cos(z[1]),
    )


PROBLEMS = {"kepler": kepler, "exponential": exponential, "pendulum": pendulum}


def make_problem(name: str) -> IvpProblem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
