"""Symmetric tridiagonal eigensolver (implicit-shift QL, Wilkinson shifts)."""
from __future__ import annotations

import math

import numpy as np

from .errors import EigenFailure

MAX_SWEEPS = 30


def tridiagonal_eigh(diag, offdiag, max_sweeps: int = MAX_SWEEPS):
    """Eigenvalues and eigenvectors of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : (n,) array
    offdiag : (n - 1,) array
        Sub-diagonal entries.
    max_sweeps : int
        QL sweeps allowed per eigenvalue before giving up.

    Returns
    -------
    values : (n,) array, ascending
    vectors : (n, n) array whose column ``k`` belongs to ``values[k]``

    Raises
    ------
    EigenFailure
        If an eigenvalue does not converge within ``max_sweeps``.
    """
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = offdiag
    z = np.eye(n)

    for l in range(n):
        sweeps = 0
        while True:
            # find a negligible sub-diagonal element to split at
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweeps == max_sweeps:
                raise EigenFailure(
                    f"eigenvalue {l} did not converge in {max_sweeps} QL sweeps"
                )
            sweeps += 1

            # Wilkinson shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    order = np.argsort(d)
    return d[order], z[:, order]
