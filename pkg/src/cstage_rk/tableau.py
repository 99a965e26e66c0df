"""Butcher tableaux obtained by discretising a csRK method with a Gauss rule."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .cstage import (
    CsrkMethod,
    SimplifyingOrders,
    assemble_method,
    build_B,
    solve_symplectic_alpha,
)
from .errors import FamilyMismatch, UnknownName
from .orthopoly import Kind, make_family
from .quadrature import QuadratureRule, gauss_rule

__all__ = [
    "ButcherTableau",
    "OrderReport",
    "BUILTINS",
    "discretize",
    "check_symplectic_rk",
    "check_symmetric_rk",
    "check_order_conditions",
    "predicted_rk_order",
    "builtin",
    "builtin_method",
    "to_block",
    "to_flat",
    "from_flat",
    "row_sum_defect",
]

ORDER_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.shape != (c.size, c.size) or b.shape != c.shape:
            raise ValueError(f"inconsistent shapes c{c.shape} A{A.shape} b{b.shape}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def s(self) -> int:
        return self.c.size


def discretize(method: CsrkMethod, rule: QuadratureRule) -> ButcherTableau:
    """``b_i = w_i B(c_i)`` and ``a_ij = w_j A(c_i, c_j)`` on the rule's nodes."""
    if rule.family.kind is not method.family.kind:
        raise FamilyMismatch(
            f"rule is for {rule.family.kind.value}, method for {method.family.kind.value}"
        )
    c = np.array(rule.nodes)
    w = np.array(rule.weights)
    b = w * method.B_at(c)
    A = method.A_at(c[:, None], c[None, :]) * w[None, :]
    meta = {
        "family": method.family.kind.value,
        "orders": method.orders,
        "params": dict(method.params),
        "quad_points": rule.s,
        "deg_B": method.deg_B,
        "deg_A_tau": method.deg_A_tau,
        "deg_A_sigma": method.deg_A_sigma,
    }
    return ButcherTableau(c, A, b, meta)


def check_symplectic_rk(tab: ButcherTableau) -> float:
    """``max |b_i a_ij + b_j a_ji - b_i b_j|``."""
    M = tab.b[:, None] * tab.A
    return float(np.max(np.abs(M + M.T - np.outer(tab.b, tab.b))))


def check_symmetric_rk(tab: ButcherTableau) -> float:
    """Worst violation of ``b`` palindromic, ``c`` reflective about 1/2 and
    ``a_ij + a_{s+1-i,s+1-j} = b_j``."""
    b_res = np.max(np.abs(tab.b - tab.b[::-1]))
    c_res = np.max(np.abs(tab.c + tab.c[::-1] - 1.0))
    a_res = np.max(np.abs(tab.A + tab.A[::-1, ::-1] - tab.b[None, :]))
    return float(max(b_res, c_res, a_res))


@dataclass(frozen=True)
class OrderReport:
    residuals: Mapping[str, float]
    satisfied: int

    def __str__(self) -> str:
        lines = [f"{name:<14s} {res:.3e}" for name, res in self.residuals.items()]
        lines.append(f"order satisfied through {self.satisfied}")
        return "\n".join(lines)


def _order_conditions(tab: ButcherTableau):
    b, c, A = tab.b, tab.c, tab.A
    Ac = A @ c
    return [
        (1, "sum b", b.sum(), 1.0),
        (2, "sum bc", b @ c, 1 / 2),
        (3, "sum bc^2", b @ c**2, 1 / 3),
        (3, "sum bAc", b @ Ac, 1 / 6),
        (4, "sum bc^3", b @ c**3, 1 / 4),
        (4, "sum bcAc", b @ (c * Ac), 1 / 8),
        (4, "sum bAc^2", b @ (A @ c**2), 1 / 12),
        (4, "sum bAAc", b @ (A @ Ac), 1 / 24),
    ]


def check_order_conditions(tab: ButcherTableau, p: int = 4) -> OrderReport:
    """Rooted-tree conditions through order ``p`` (at most 4)."""
    if p not in (1, 2, 3, 4):
        raise ValueError("order conditions are available for p in 1..4")
    residuals = {}
    satisfied = p
    for order, name, value, exact in _order_conditions(tab):
        if order > p:
            break
        res = abs(float(value) - exact)
        residuals[name] = res
        if res >= ORDER_TOL:
            satisfied = min(satisfied, order - 1)
    return OrderReport(residuals, satisfied)


def predicted_rk_order(
    orders: SimplifyingOrders, p: int, degB: int, degA_tau: int, degA_sigma: int
) -> int:
    """Lower bound on the order of the discretised method.

    ``p`` is the quadrature order; the degrees are those of ``B_tau`` and of
    ``A_{tau,sigma}`` in each variable.
    """
    rho = min(orders.xi, p - degB)
    alpha = min(orders.eta, p - degA_sigma)
    beta = min(orders.zeta, p - degA_tau - degB)
    return min(rho, 2 * alpha + 2, alpha + beta + 1)


@dataclass(frozen=True)
class _Builtin:
    kind: Kind
    quad_points: int
    symmetric: bool
    has_param: bool
    claimed_order: int


BUILTINS: dict[str, _Builtin] = {
    "legendre3_s2": _Builtin(Kind.LEGENDRE, 2, False, False, 3),
    "legendre3_s3": _Builtin(Kind.LEGENDRE, 3, False, True, 3),
    "laguerre2_s2": _Builtin(Kind.LAGUERRE, 2, False, True, 2),
    "hermite3_s3": _Builtin(Kind.HERMITE, 3, False, True, 3),
    "hermite4_sym_s3": _Builtin(Kind.SHIFTED_HERMITE, 3, True, True, 4),
}
_BUILTIN_ORDERS = SimplifyingOrders(xi=3, eta=1, rho=2)


def builtin_method(name: str, mu: float = 0.0) -> tuple[CsrkMethod, QuadratureRule]:
    """The csRK method behind a named tableau, with its quadrature rule."""
    try:
        spec = BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown method {name!r}; choose from {sorted(BUILTINS)}") from None
    family = make_family(spec.kind)
    solution = solve_symplectic_alpha(family, _BUILTIN_ORDERS, spec.symmetric)
    (param,) = solution.free_params
    if not spec.has_param:
        # the free term vanishes at the nodes of the 2-point rule
        mu = 0.0
    B = build_B(family, _BUILTIN_ORDERS.xi, symmetric=spec.symmetric)
    method = assemble_method(family, B, solution, {param: mu})
    return method, gauss_rule(family, spec.quad_points)


def builtin(name: str, mu: float = 0.0) -> ButcherTableau:
    method, rule = builtin_method(name, mu)
    tab = discretize(method, rule)
    return ButcherTableau(tab.c, tab.A, tab.b, {**tab.meta, "name": name, "mu": mu})


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_flat(tab: ButcherTableau) -> str:
    """``s``, then ``c``, ``A`` row-major and ``b``; one value per line."""
    values = [str(tab.s)]
    values += [_fmt(v) for v in tab.c]
    values += [_fmt(v) for v in tab.A.ravel()]
    values += [_fmt(v) for v in tab.b]
    return "\n".join(values) + "\n"


def from_flat(text: str) -> ButcherTableau:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty tableau")
    s = int(tokens[0])
    expected = 1 + s + s * s + s
    if len(tokens) != expected:
        raise ValueError(f"expected {expected} values for s={s}, got {len(tokens)}")
    vals = np.array([float(t) for t in tokens[1:]])
    c = vals[:s]
    A = vals[s : s + s * s].reshape(s, s)
    b = vals[s + s * s :]
    return ButcherTableau(c, A, b)


def to_block(tab: ButcherTableau, width: int = 24) -> str:
    """Fixed-width Butcher block: ``c | A`` rows, a rule, then ``b``."""
    cell = f"{{:>{width}.17g}}"
    rows = []
    for ci, row in zip(tab.c, tab.A):
        rows.append(cell.format(ci) + " |" + "".join(cell.format(a) for a in row))
    rows.append("-" * width + "-+" + "-" * (width * tab.s))
    rows.append(" " * width + " |" + "".join(cell.format(v) for v in tab.b))
    return "\n".join(rows) + "\n"



def row_sum_defect(tab: ButcherTableau) -> float:
    """``max_i |sum_j a_ij - c_i|``."""
    return float(np.max(np.abs(tab.A.sum(axis=1) - tab.c)))
