"""Gauss-Christoffel rules for the orthonormal families.

Nodes and weights come from the Golub-Welsch eigenproblem of the Jacobi
matrix.  Shifted families reuse the parent rule under ``u -> (u + 1)/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import LengthMismatch
from .orthopoly import (
    PolynomialFamily,
    eval_poly,
    eval_with_derivative,
    make_family,
    poly_coeffs,
)
from .tridiag import tridiagonal_eigh

__all__ = [
    "MAX_POINTS",
    "QuadratureRule",
    "gauss_rule",
    "integrate_weighted",
    "weight_closed_form_check",
    "rule_for_degree",
]

MAX_POINTS = 12


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    family: PolynomialFamily
    s: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return 2 * self.s

    def integrate(self, fn) -> float:
        """Weighted integral of a vectorised callable."""
        return float(self.weights @ np.asarray(fn(self.nodes), dtype=float))


def gauss_rule(family: PolynomialFamily, s: int) -> QuadratureRule:
    if not 1 <= s <= MAX_POINTS:
        raise ValueError(f"point count must be in 1..{MAX_POINTS}, got {s}")
    return _gauss_rule(family.kind, s)


@lru_cache(maxsize=None)
def _gauss_rule(kind, s: int) -> QuadratureRule:
    family = make_family(kind)
    if family.parent is not None:
        base = _gauss_rule(family.parent.kind, s)
        nodes = (base.nodes + 1.0) / 2.0
        weights = base.weights / 2.0
    else:
        a, b = family.recurrence(s)
        nodes, vecs = tridiagonal_eigh(a, np.sqrt(b[1:]))
        weights = family.moment0() * vecs[0] ** 2
        # one Newton step on P_s to remove eigensolver noise
        p, dp = eval_with_derivative(family, s, nodes)
        nodes = nodes - p / dp
        if family.symmetry_axis is not None:
            axis = family.symmetry_axis
            nodes = (nodes + 2 * axis - nodes[::-1]) / 2.0
            weights = (weights + weights[::-1]) / 2.0
            if s % 2:
                nodes[s // 2] = axis
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(family, s, nodes, weights)


def rule_for_degree(family: PolynomialFamily, degree: int) -> QuadratureRule:
    """Smallest Gauss rule exact for ``polynomial * w`` of the given degree."""
    return gauss_rule(family, max(1, (degree + 2) // 2))


def integrate_weighted(rule: QuadratureRule, values) -> float:
    values = np.asarray(values, dtype=float)
    if values.shape != (rule.s,):
        raise LengthMismatch(f"expected {rule.s} values, got shape {values.shape}")
    return float(rule.weights @ values)


def weight_closed_form_check(family: PolynomialFamily, s: int) -> float:
    """Largest deviation of the rule weights from the Christoffel closed form.

    The closed form is ``-mu_{s+1} / (mu_s P_s'(c_i) P_{s+1}(c_i))`` with
    ``mu_n`` the leading coefficient of ``P_n``.
    """
    rule = gauss_rule(family, s)
    ps, ps1 = poly_coeffs(family, s), poly_coeffs(family, s + 1)
    mu_s, mu_s1 = ps.coef[-1], ps1.coef[-1]
    dps = ps.deriv()(rule.nodes)
    p_next = eval_poly(family, s + 1, rule.nodes)
    closed = -mu_s1 / (mu_s * dps * p_next)
    return float(np.max(np.abs(rule.weights - closed)))
