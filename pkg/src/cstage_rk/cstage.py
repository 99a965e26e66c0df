"""Continuous-stage RK coefficient functions built from an orthonormal family.

With ``C_tau = tau`` a method is fixed by

* ``B_tau = sum_j b_j P_j(tau)`` where ``b_j`` is the integral of ``P_j``
  over ``[0, 1]`` for ``j < xi`` (plus optional free extras), and
* ``A_{tau,sigma} = B_sigma (1/2 + sum_{i,j} alpha_ij P_i(tau) P_j(sigma))``
  with a skew-symmetric ``alpha``.

Skew-symmetry makes every such method symplectic.  The entries of ``alpha``
are pinned down by the order-``eta`` stage conditions, which reduce to a
linear system after expanding both sides in the family basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import Inconsistent, InvalidExtras, MissingParameter, SymmetryUnsupported
from .orthopoly import Kind, PolynomialFamily, eval_all, integral_01, make_family, poly_coeffs
from .quadrature import gauss_rule, rule_for_degree

__all__ = [
    "SimplifyingOrders",
    "AffineExpr",
    "AlphaSolution",
    "CsrkMethod",
    "build_B",
    "solve_symplectic_alpha",
    "assemble_method",
    "check_B",
    "check_C",
    "check_D",
    "check_symplectic_cs",
    "check_symmetric_cs",
    "predicted_cs_order",
    "param_name",
]

PIVOT_TOL = 1e-9
SAMPLE_POINTS = 10
_ZERO = 1e-14
_UNIT = make_family(Kind.SHIFTED_LEGENDRE)


@dataclass(frozen=True)
class SimplifyingOrders:
    """Orders of the simplifying assumptions and the tau-degree cap ``rho``.

    ``zeta`` defaults to ``min(xi, eta)``, which symplecticity guarantees;
    ``rho`` defaults to ``xi - eta``.
    """

    xi: int
    eta: int
    zeta: Optional[int] = None
    rho: Optional[int] = None

    def __post_init__(self):
        if self.xi < 1:
            raise ValueError("xi must be at least 1")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.zeta is None:
            object.__setattr__(self, "zeta", min(self.xi, self.eta))
        if self.rho is None:
            object.__setattr__(self, "rho", max(self.xi - self.eta, 0))
        if self.zeta < 0 or self.rho < 0:
            raise ValueError("zeta and rho must be non-negative")

    @property
    def r(self) -> int:
        """Size minus one of the square block of ``alpha`` that may be nonzero."""
        return max(min(self.rho, self.xi - self.eta), 0)

    @property
    def raw_dof(self) -> int:
        return self.r * (self.r + 1) // 2


@dataclass(frozen=True)
class AffineExpr:
    """``const + sum(coeffs[name] * value[name])``."""

    const: float
    coeffs: Mapping[str, float] = field(default_factory=dict)

    def evaluate(self, values: Mapping[str, float]) -> float:
        return self.const + sum(c * values[name] for name, c in self.coeffs.items())

    def __str__(self) -> str:
        terms = [f"{self.const:.17g}"] if self.const or not self.coeffs else []
        terms += [f"{c:+.17g}*{name}" for name, c in self.coeffs.items()]
        return " ".join(terms)


def param_name(i: int, j: int) -> str:
    return f"alpha_{i}_{j}"


@dataclass(frozen=True)
class AlphaSolution:
    """Affine parametrisation of the upper triangle of ``alpha``.

    Entries absent from ``entries`` are zero.  ``residual`` is the largest
    equation residual left after elimination (zero for exact systems).
    """

    family: PolynomialFamily
    orders: SimplifyingOrders
    entries: Mapping[tuple[int, int], AffineExpr]
    free_params: tuple[str, ...]
    symmetric: bool = False
    residual: float = 0.0

    @property
    def size(self) -> int:
        return self.orders.r + 1

    def matrix(self, values: Mapping[str, float]) -> np.ndarray:
        alpha = np.zeros((self.size, self.size))
        for (i, j), expr in self.entries.items():
            alpha[i, j] = expr.evaluate(values)
            alpha[j, i] = -alpha[i, j]
        return alpha


@dataclass(frozen=True, eq=False)
class CsrkMethod:
    family: PolynomialFamily
    B: np.ndarray
    alpha: np.ndarray
    orders: SimplifyingOrders
    params: Mapping[str, float] = field(default_factory=dict)
    symmetric: bool = False

    def B_at(self, x) -> np.ndarray:
        """``B_x`` for scalar or array ``x``."""
        vals = eval_all(self.family, len(self.B) - 1, x)
        return np.tensordot(self.B, vals, axes=1)

    def kernel(self, tau, sigma) -> np.ndarray:
        """``sum alpha_ij P_i(tau) P_j(sigma)`` on the broadcast of the inputs."""
        n = self.alpha.shape[0] - 1
        tau, sigma = np.broadcast_arrays(np.asarray(tau, float), np.asarray(sigma, float))
        pt = eval_all(self.family, n, tau)
        ps = eval_all(self.family, n, sigma)
        return np.einsum("i...,ij,j...->...", pt, self.alpha, ps)

    def A_at(self, tau, sigma) -> np.ndarray:
        return self.B_at(sigma) * (0.5 + self.kernel(tau, sigma))

    @property
    def deg_B(self) -> int:
        nz = np.flatnonzero(np.abs(self.B) > _ZERO)
        return int(nz[-1]) if nz.size else 0

    @property
    def deg_A_tau(self) -> int:
        rows = np.flatnonzero(np.any(np.abs(self.alpha) > _ZERO, axis=1))
        return int(rows[-1]) if rows.size else 0

    @property
    def deg_A_sigma(self) -> int:
        cols = np.flatnonzero(np.any(np.abs(self.alpha) > _ZERO, axis=0))
        return self.deg_B + (int(cols[-1]) if cols.size else 0)


def build_B(
    family: PolynomialFamily,
    xi: int,
    extras: Optional[Mapping[int, float]] = None,
    symmetric: bool = False,
) -> np.ndarray:
    """Coefficients of ``B_tau`` in the family basis.

    ``extras`` maps indices ``j >= xi`` to free coefficients.  A symmetric
    construction only admits even ``j``, which keep ``B_tau = B_{1-tau}``.
    """
    if xi < 1:
        raise ValueError("xi must be at least 1")
    extras = dict(extras or {})
    bad = [j for j in extras if j < xi]
    if bad:
        raise InvalidExtras(f"extras keys must be >= xi={xi}, got {sorted(bad)}")
    odd = [j for j in extras if j % 2]
    if symmetric and odd:
        raise InvalidExtras(f"symmetric B admits only even extras, got {sorted(odd)}")
    n = max([xi - 1, *extras])
    coeffs = np.zeros(n + 1)
    for j in range(xi):
        coeffs[j] = integral_01(family, j)
    for j, lam in extras.items():
        coeffs[j] = lam
    return coeffs


def _to_family_basis(family: PolynomialFamily, poly: Polynomial, n: int) -> np.ndarray:
    """Coefficients ``c`` with ``poly = sum_{m <= n} c_m P_m``."""
    basis = np.zeros((n + 1, n + 1))
    for m in range(n + 1):
        coef = poly_coeffs(family, m).coef
        basis[: coef.size, m] = coef
    target = np.zeros(n + 1)
    target[: poly.coef.size] = poly.coef
    return np.linalg.solve(basis, target)


def _moment01(family: PolynomialFamily, j: int, k: int) -> float:
    """Integral over [0, 1] of ``P_j(x) x^k``."""
    prod = poly_coeffs(family, j) * Polynomial([0.0] * k + [1.0])
    return float(prod.integ()(1.0))


def _reduce(M: np.ndarray, rhs: np.ndarray, scan):
    """Gauss-Jordan elimination visiting columns in the order ``scan``.

    Returns ``(M, rhs, pivots, residual)`` where ``pivots`` maps pivot column
    to its row in the reduced system.  Columns visited last are the ones left
    free when the system is underdetermined.
    """
    M = M.astype(float).copy()
    rhs = rhs.astype(float).copy()
    nrows, ncols = M.shape
    pivots = {}
    row = 0
    for col in scan:
        if row == nrows:
            break
        p = row + int(np.argmax(np.abs(M[row:, col])))
        if abs(M[p, col]) < PIVOT_TOL:
            continue
        M[[row, p]] = M[[p, row]]
        rhs[[row, p]] = rhs[[p, row]]
        scale = M[row, col]
        M[row] /= scale
        rhs[row] /= scale
        for other in range(nrows):
            if other != row and M[other, col] != 0.0:
                factor = M[other, col]
                M[other] -= factor * M[row]
                rhs[other] -= factor * rhs[row]
        pivots[col] = row
        row += 1
    residual = float(np.max(np.abs(rhs[row:]))) if row < nrows else 0.0
    return M, rhs, pivots, residual


def solve_symplectic_alpha(
    family: PolynomialFamily, orders: SimplifyingOrders, symmetric: bool = False
) -> AlphaSolution:
    """Solve the stage conditions of order ``eta`` for the skew ``alpha``.

    For each test monomial ``x^k`` (``k < eta``) the expansion of
    ``1/2 int_0^1 x^k + sum alpha_ij P_i(tau) int_0^1 P_j x^k`` in the family
    basis must equal that of ``tau^(k+1) / (k+1)``.  With ``symmetric`` set,
    entries with even ``i + j`` are fixed at zero.
    """
    if symmetric and family.symmetry_axis != 0.5:
        raise SymmetryUnsupported(
            f"{family.kind.value} lacks the reflection P_n(1-x) = (-1)^n P_n(x)"
        )
    r = orders.r
    unknowns = [
        (i, j)
        for i in range(r + 1)
        for j in range(i + 1, r + 1)
        if not (symmetric and (i + j) % 2 == 0)
    ]
    eta = orders.eta
    nbasis = max(r, eta) + 1
    p0 = poly_coeffs(family, 0).coef[0]

    rows, rhs = [], []
    for k in range(eta):
        moments = [_moment01(family, j, k) for j in range(r + 1)]
        primitive = Polynomial([0.0] * (k + 1) + [1.0 / (k + 1)])
        target = _to_family_basis(family, primitive, nbasis - 1)
        target[0] -= 0.5 / (k + 1) / p0
        for n in range(nbasis):
            row = np.zeros(len(unknowns))
            for col, (i, j) in enumerate(unknowns):
                if n == i:
                    row[col] += moments[j]
                if n == j:
                    row[col] -= moments[i]
            rows.append(row)
            rhs.append(target[n])

    entries: dict[tuple[int, int], AffineExpr] = {}
    if not unknowns:
        residual = float(np.max(np.abs(rhs))) if rhs else 0.0
        if residual > PIVOT_TOL:
            raise Inconsistent(f"no alpha satisfies the stage conditions for {orders}", residual)
        return AlphaSolution(family, orders, entries, (), symmetric, residual)

    M = np.array(rows).reshape(-1, len(unknowns))
    b = np.array(rhs, dtype=float)
    # Entries farthest from the diagonal are preferred as free parameters,
    # ties broken lexicographically.
    preference = sorted(range(len(unknowns)), key=lambda c: (unknowns[c][0] - unknowns[c][1], unknowns[c]))
    M, b, pivots, residual = _reduce(M, b, reversed(preference))
    if residual > PIVOT_TOL:
        raise Inconsistent(f"no alpha satisfies the stage conditions for {orders}", residual)

    free_cols = [c for c in range(len(unknowns)) if c not in pivots]
    free_names = tuple(param_name(*unknowns[c]) for c in free_cols)
    for col, (i, j) in enumerate(unknowns):
        if col in pivots:
            prow = pivots[col]
            coeffs = {
                param_name(*unknowns[f]): -M[prow, f]
                for f in free_cols
                if abs(M[prow, f]) > _ZERO
            }
            entries[(i, j)] = AffineExpr(float(b[prow]), coeffs)
        else:
            entries[(i, j)] = AffineExpr(0.0, {param_name(i, j): 1.0})
    return AlphaSolution(family, orders, entries, free_names, symmetric, residual)


def assemble_method(
    family: PolynomialFamily,
    B: np.ndarray,
    solution: AlphaSolution,
    param_values: Optional[Mapping[str, float]] = None,
) -> CsrkMethod:
    param_values = dict(param_values or {})
    missing = [p for p in solution.free_params if p not in param_values]
    if missing:
        raise MissingParameter(f"no value for free parameter(s) {missing}")
    unknown = set(param_values) - set(solution.free_params)
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)}")
    alpha = solution.matrix(param_values)
    return CsrkMethod(
        family=family,
        B=np.asarray(B, dtype=float),
        alpha=alpha,
        orders=solution.orders,
        params=param_values,
        symmetric=solution.symmetric,
    )


def _sample_points(family: PolynomialFamily) -> np.ndarray:
    return gauss_rule(family, SAMPLE_POINTS).nodes


def check_B(method: CsrkMethod, xi: int) -> float:
    """Largest deviation of ``int B_tau w tau^k`` from ``1/(k+1)``, ``k < xi``."""
    worst = 0.0
    for k in range(xi):
        rule = rule_for_degree(method.family, method.deg_B + k)
        val = rule.integrate(lambda x: method.B_at(x) * x**k)
        worst = max(worst, abs(val - 1.0 / (k + 1)))
    return worst


def check_C(method: CsrkMethod, eta: int) -> float:
    """Largest deviation of ``int A_{tau,s} w(s) s^k ds`` from ``tau^(k+1)/(k+1)``."""
    taus = _sample_points(method.family)
    worst = 0.0
    for k in range(eta):
        rule = rule_for_degree(method.family, method.deg_A_sigma + k)
        vals = method.A_at(taus[:, None], rule.nodes[None, :]) * rule.nodes**k
        lhs = vals @ rule.weights
        worst = max(worst, float(np.max(np.abs(lhs - taus ** (k + 1) / (k + 1)))))
    return worst


def check_D(method: CsrkMethod, zeta: int) -> float:
    """Largest deviation of ``int B_t A_{t,s} w(t) t^k dt`` from ``B_s (1 - s^(k+1))/(k+1)``."""
    sigmas = _sample_points(method.family)
    b_sigma = method.B_at(sigmas)
    worst = 0.0
    for k in range(zeta):
        rule = rule_for_degree(method.family, method.deg_B + method.deg_A_tau + k)
        t = rule.nodes
        vals = (method.B_at(t) * t**k)[:, None] * method.A_at(t[:, None], sigmas[None, :])
        lhs = rule.weights @ vals
        rhs = b_sigma * (1.0 - sigmas ** (k + 1)) / (k + 1)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def check_symplectic_cs(method: CsrkMethod) -> float:
    """Residual of ``B_t A_{t,s} + B_s A_{s,t} - B_t B_s`` on a node grid.

    For the ansatz form the residual equals
    ``B_t B_s sum (alpha_ij + alpha_ji) P_i(t) P_j(s)``; evaluating it that way
    avoids cancelling terms of size ``B_t A_{t,s}``, which reach 1e7 on the
    Laguerre grid.
    """
    x = _sample_points(method.family)
    n = method.alpha.shape[0] - 1
    vals = eval_all(method.family, n, x)
    sym_part = method.alpha + method.alpha.T
    b = method.B_at(x)
    grid = np.einsum("it,ij,js->ts", vals, sym_part, vals)
    return float(np.max(np.abs(b[:, None] * b[None, :] * grid)))


def check_symmetric_cs(method: CsrkMethod) -> float:
    """``max|A_{t,s} + A_{1-t,1-s} - B_s| + max|B_s - B_{1-s}|`` on a 10x10 grid."""
    if method.family.symmetry_axis != 0.5:
        raise SymmetryUnsupported(
            f"weight of {method.family.kind.value} is not symmetric about 1/2"
        )
    # Any 10x10 grid decides the identity for these low-degree polynomials;
    # nodes inside [0, 1] keep |A| small so rounding stays near 1e-15.
    x = gauss_rule(_UNIT, SAMPLE_POINTS).nodes
    t, s = x[:, None], x[None, :]
    a_res = method.A_at(t, s) + method.A_at(1.0 - t, 1.0 - s) - method.B_at(s)
    b_res = method.B_at(x) - method.B_at(1.0 - x)
    return float(np.max(np.abs(a_res)) + np.max(np.abs(b_res)))


def predicted_cs_order(orders: SimplifyingOrders) -> int:
    """Lower bound ``min(xi, 2 eta + 2, eta + zeta + 1)`` on the csRK order."""
    return min(orders.xi, 2 * orders.eta + 2, orders.eta + orders.zeta + 1)

