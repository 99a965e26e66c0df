"""Closed-form Butcher tableaux used as independent oracles.

Every entry is evaluated from its surd expression in double precision, so
no decimal literal ever enters a comparison.
"""
from math import pi, sqrt

import numpy as np

R2, R3, R5, R6, R15 = sqrt(2), sqrt(3), sqrt(5), sqrt(6), sqrt(15)
SQRT_PI = sqrt(pi)


def legendre3_s2(mu=0.0):
    c = [-R3 / 3, R3 / 3]
    A = [
        [(2 - R3) / 8, (-6 - 5 * R3) / 24],
        [(-6 + 5 * R3) / 24, (2 + R3) / 8],
    ]
    b = [(2 - R3) / 4, (2 + R3) / 4]
    return c, A, b


def legendre3_s3(mu):
    k = (10 * R3 + 9 * R5) * mu
    A = [
        [(10 - 3 * R15) / 72, (10 - 4 * R15 - k) / 45, -(26 + 5 * R15) / 72 + k / 45],
        [(-16 + 2 * R15 - 7 * R3 * mu) / 144, 2 / 9, (-16 - 2 * R15 + 7 * R3 * mu) / 144],
        [
            (-26 + 5 * R15) / 72 + (-10 * R3 + 9 * R5) * mu / 45,
            (10 + 4 * R15 + (10 * R3 - 9 * R5) * mu) / 45,
            (10 + 3 * R15) / 72,
        ],
    ]
    return [-R15 / 5, 0.0, R15 / 5], A, [(10 - 3 * R15) / 36, 4 / 9, (10 + 3 * R15) / 36]


def laguerre2_s2(mu):
    A = [
        [(4 + 3 * R2) / 16, (28 - 19 * R2) / 16 + (-3 + 2 * R2) / 6 * mu],
        [(28 + 19 * R2) / 16 - (3 + 2 * R2) / 6 * mu, (4 - 3 * R2) / 16],
    ]
    return [2 - R2, 2 + R2], A, [(4 + 3 * R2) / 8, (4 - 3 * R2) / 8]


def hermite3_s3(mu):
    q = (28 * R3 + 63 * R2) / (54 * SQRT_PI) * mu
    q_minus = (-28 * R3 + 63 * R2) / (54 * SQRT_PI) * mu
    m = 19 * R3 / (108 * SQRT_PI) * mu
    A = [
        [(4 - 3 * R6) / 72, (7 - 7 * R6) / 18 - q, -(32 + 5 * R6) / 72 + q],
        [(-14 + R6) / 72 - m, 7 / 18, -(14 + R6) / 72 + m],
        [-(32 - 5 * R6) / 72 + q_minus, (7 + 7 * R6) / 18 - q_minus, (4 + 3 * R6) / 72],
    ]
    return [-R6 / 2, 0.0, R6 / 2], A, [(4 - 3 * R6) / 36, 7 / 9, (4 + 3 * R6) / 36]


def hermite4_sym_s3(mu):
    z = sqrt(3 / pi) * mu
    A = [
        [1 / 18, (14 - 21 * R6 - 112 * z) / 36, (2 + 12 * R6 + 112 * z) / 36],
        [(2 + 3 * R6 + 16 * z) / 36, 7 / 18, (2 - 3 * R6 - 16 * z) / 36],
        [(2 - 12 * R6 - 112 * z) / 36, (14 + 21 * R6 + 112 * z) / 36, 1 / 18],
    ]
    return [(2 - R6) / 4, 0.5, (2 + R6) / 4], A, [1 / 9, 7 / 9, 1 / 9]


TABLES = {
    "legendre3_s2": legendre3_s2,
    "legendre3_s3": legendre3_s3,
    "laguerre2_s2": laguerre2_s2,
    "hermite3_s3": hermite3_s3,
    "hermite4_sym_s3": hermite4_sym_s3,
}

# mu used for the long-run Hermite experiment
MU_HERMITE_RUN = sqrt(2 * pi) / 14


def oracle(name, mu=0.0):
    c, A, b = TABLES[name](mu)
    return np.array(c), np.array(A), np.array(b)


def max_deviation(tab, name, mu=0.0):
    c, A, b = oracle(name, mu)
    return max(
        np.max(np.abs(tab.c - c)),
        np.max(np.abs(tab.A - A)),
        np.max(np.abs(tab.b - b)),
    )
