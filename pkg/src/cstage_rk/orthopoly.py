"""Orthonormal polynomial families on finite and infinite intervals.

Each family is described by the three-term recurrence of its monic
polynomials.  Values are always computed through the normalised recurrence;
monomial coefficients are only formed when an antiderivative or a leading
coefficient is required, and are capped at :data:`MAX_DEGREE`.

The shifted families live on the same axis as their parent after the map
``x -> 2x - 1``: weight ``w(2x - 1)`` and polynomials ``sqrt(2) P_n(2x - 1)``.
They are symmetric about ``x = 1/2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegreeTooLarge, OutOfInterval

__all__ = [
    "MAX_DEGREE",
    "Kind",
    "PolynomialFamily",
    "make_family",
    "eval_poly",
    "eval_all",
    "eval_with_derivative",
    "poly_coeffs",
    "integral_01",
    "integral_0_tau",
    "weight_eval",
]

MAX_DEGREE = 12

_SHIFT = Polynomial([-1.0, 2.0])  # x -> 2x - 1
_SQRT2 = math.sqrt(2.0)


class Kind(str, enum.Enum):
    LEGENDRE = "legendre"
    SHIFTED_LEGENDRE = "shifted_legendre"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"
    SHIFTED_HERMITE = "shifted_hermite"


def _monic_recurrence(kind: Kind, n: int) -> tuple[float, float]:
    """Return ``(a_n, b_n)`` with ``pi_{n+1} = (x - a_n) pi_n - b_n pi_{n-1}``.

    ``b_0`` is the zeroth moment of the weight.
    """
    if kind is Kind.LEGENDRE:
        return 0.0, (2.0 if n == 0 else n * n / (4.0 * n * n - 1.0))
    if kind is Kind.LAGUERRE:
        return 2.0 * n + 1.0, (1.0 if n == 0 else float(n * n))
    if kind is Kind.HERMITE:
        return 0.0, (math.sqrt(math.pi) if n == 0 else n / 2.0)
    raise ValueError(f"{kind} has no native recurrence")


@dataclass(frozen=True)
class PolynomialFamily:
    """A weight function on an interval with its orthonormal polynomials.

    ``parent`` is set for the shifted kinds, whose values are obtained from
    the parent family by the affine map.
    """

    kind: Kind
    interval: tuple[float, float]
    symmetry_axis: Optional[float]
    parent: Optional["PolynomialFamily"] = field(default=None, repr=False)

    @property
    def shifted(self) -> bool:
        return self.parent is not None

    @property
    def alternating_sign(self) -> bool:
        # Laguerre polynomials from Rodrigues' formula have leading
        # coefficient (-1)^n / n!.
        return self.kind is Kind.LAGUERRE

    def recurrence(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Monic recurrence coefficients ``a_k, b_k`` for ``k < n``."""
        if self.parent is not None:
            a, b = self.parent.recurrence(n)
            a = (a + 1.0) / 2.0
            b = b / 4.0
            if n:
                b[0] = self.parent.moment0() / 2.0
            return a, b
        pairs = [_monic_recurrence(self.kind, k) for k in range(n)]
        a = np.array([p[0] for p in pairs], dtype=float)
        b = np.array([p[1] for p in pairs], dtype=float)
        return a, b

    def normalization(self, n: int) -> np.ndarray:
        """Factors ``k_j`` with ``P_j = k_j * monic_j`` for ``j < n``."""
        _, b = self.recurrence(n)
        k = 1.0 / np.sqrt(np.cumprod(b))
        if self.alternating_sign:
            k = k * (-1.0) ** np.arange(n)
        return k

    def moment0(self) -> float:
        """Integral of the weight over the interval."""
        if self.parent is not None:
            return self.parent.moment0() / 2.0
        return _monic_recurrence(self.kind, 0)[1]

    def contains(self, x: float) -> bool:
        lo, hi = self.interval
        return lo <= x <= hi

    def __str__(self) -> str:
        return self.kind.value


_INFO = {
    Kind.LEGENDRE: ((-1.0, 1.0), 0.0),
    Kind.LAGUERRE: ((0.0, math.inf), None),
    Kind.HERMITE: ((-math.inf, math.inf), 0.0),
}
_PARENT = {Kind.SHIFTED_LEGENDRE: Kind.LEGENDRE, Kind.SHIFTED_HERMITE: Kind.HERMITE}


def make_family(kind) -> PolynomialFamily:
    kind = Kind(kind)
    if kind in _PARENT:
        parent = make_family(_PARENT[kind])
        lo, hi = parent.interval
        return PolynomialFamily(kind, ((lo + 1.0) / 2.0, (hi + 1.0) / 2.0), 0.5, parent)
    interval, axis = _INFO[kind]
    return PolynomialFamily(kind, interval, axis)


def eval_all(family: PolynomialFamily, nmax: int, x) -> np.ndarray:
    """Values of ``P_0 .. P_nmax`` at ``x``; shape ``(nmax + 1,) + shape(x)``."""
    x = np.asarray(x, dtype=float)
    if family.parent is not None:
        return _SQRT2 * eval_all(family.parent, nmax, 2.0 * x - 1.0)
    a, b = family.recurrence(nmax + 2)
    sb = np.sqrt(b)
    out = np.empty((nmax + 1,) + x.shape)
    prev = np.zeros_like(x)
    cur = np.full_like(x, 1.0 / sb[0])
    out[0] = cur
    for n in range(nmax):
        nxt = ((x - a[n]) * cur - (sb[n] * prev if n else 0.0)) / sb[n + 1]
        prev, cur = cur, nxt
        out[n + 1] = cur
    if family.alternating_sign:
        out *= ((-1.0) ** np.arange(nmax + 1)).reshape((-1,) + (1,) * x.ndim)
    return out


def eval_poly(family: PolynomialFamily, n: int, x):
    """Value of the orthonormal polynomial ``P_n`` at ``x``."""
    if n < 0:
        raise ValueError("degree index must be non-negative")
    val = eval_all(family, n, x)[n]
    return float(val) if val.ndim == 0 else val


def eval_with_derivative(family: PolynomialFamily, n: int, x):
    """Return ``(P_n(x), P_n'(x))`` via the differentiated recurrence."""
    x = np.asarray(x, dtype=float)
    if family.parent is not None:
        p, dp = eval_with_derivative(family.parent, n, 2.0 * x - 1.0)
        return _SQRT2 * p, 2.0 * _SQRT2 * dp
    a, b = family.recurrence(n + 1)
    sb = np.sqrt(b)
    p_prev, p = np.zeros_like(x), np.full_like(x, 1.0 / sb[0])
    d_prev, d = np.zeros_like(x), np.zeros_like(x)
    for k in range(n):
        p_next = ((x - a[k]) * p - (sb[k] * p_prev if k else 0.0)) / sb[k + 1]
        d_next = ((x - a[k]) * d + p - (sb[k] * d_prev if k else 0.0)) / sb[k + 1]
        p_prev, p = p, p_next
        d_prev, d = d, d_next
    if family.alternating_sign and n % 2:
        p, d = -p, -d
    return p, d


def poly_coeffs(family: PolynomialFamily, n: int) -> Polynomial:
    """Monomial representation of ``P_n`` (``n <= MAX_DEGREE``)."""
    if n > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {n} exceeds the monomial cap {MAX_DEGREE}")
    if n < 0:
        raise ValueError("degree index must be non-negative")
    return _coeff_table(family)[n]


_COEFF_CACHE: dict = {}


def _coeff_table(family: PolynomialFamily) -> tuple[Polynomial, ...]:
    table = _COEFF_CACHE.get(family.kind)
    if table is not None:
        return table
    if family.parent is not None:
        table = tuple(_SQRT2 * p(_SHIFT) for p in _coeff_table(family.parent))
    else:
        a, b = family.recurrence(MAX_DEGREE + 1)
        monic = [Polynomial([1.0]), Polynomial([-a[0], 1.0])]
        for k in range(1, MAX_DEGREE):
            monic.append(Polynomial([-a[k], 1.0]) * monic[k] - b[k] * monic[k - 1])
        norm = family.normalization(MAX_DEGREE + 1)
        table = tuple(Polynomial(np.trim_zeros(m.coef * k, "b")) for m, k in zip(monic, norm))
    _COEFF_CACHE[family.kind] = table
    return table


def integral_01(family: PolynomialFamily, n: int) -> float:
    """Exact value of the integral of ``P_n`` over ``[0, 1]``."""
    return float(integral_0_tau(family, n)(1.0))


def integral_0_tau(family: PolynomialFamily, n: int) -> Polynomial:
    """Antiderivative of ``P_n`` vanishing at zero."""
    return poly_coeffs(family, n).integ()


def weight_eval(family: PolynomialFamily, x: float) -> float:
    if not family.contains(x):
        raise OutOfInterval(f"{x} is outside {family.interval} for {family.kind.value}")
    if family.parent is not None:
        return weight_eval(family.parent, 2.0 * x - 1.0)
    if family.kind is Kind.LEGENDRE:
        return 1.0
    if family.kind is Kind.LAGUERRE:
        return math.exp(-x)
    return math.exp(-x * x)
