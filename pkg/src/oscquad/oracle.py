"""Brute-force ground truth: solve the full defining system on [0, 1].

The optimal weights satisfy an (N+m+1)-dimensional linear system whose first
N+1 rows convolve the candidate weights with the kernel G_m and whose last m
rows impose exactness on monomials of degree < m.  Solving it directly is an
independent check on the closed-form engine.

The matrix grows ill-conditioned with N (kernel rows are smooth), so the
float64 LU solution is polished by iterative refinement with residuals
computed in mpmath; the refined solution is accurate to float64 rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi

import mpmath as mp
import numpy as np
import scipy.linalg

from .quadrature import NumericalError

__all__ = ["OracleResult", "moment_g", "rhs_f", "solve_oracle"]

_DPS = 40
_MAX_N = 64


def moment_g(alpha: int, omega: float) -> complex:
    """int_0^1 exp(2*pi*i*omega*x) x^alpha dx, closed form."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if omega == 0:
        return complex(1.0 / (alpha + 1))
    return complex(_moment_g_any(alpha, omega, np))


def _moment_g_any(alpha, omega, be):
    """Backend-generic closed form; be is numpy or mpmath."""
    c = 2j * be.pi * omega
    e = be.exp(c)
    s = sum(
        (-1) ** k * factorial(alpha) * e / (factorial(alpha - k) * c ** (k + 1))
        for k in range(alpha)
    )
    return s + (-1) ** alpha * factorial(alpha) / c ** (alpha + 1) * (e - 1)


def rhs_f(m: int, omega: float, beta: int, h: float) -> complex:
    """int_0^1 exp(2*pi*i*omega*x) G_m(x - h*beta) dx via the expanded form."""
    return complex(_rhs_f_any(m, omega, beta * h, np))


def _rhs_f_any(m, omega, y, be):
    if omega == 0:
        return (y ** (2 * m) + (1 - y) ** (2 * m)) / (2 * factorial(2 * m))
    c = 2j * be.pi * omega
    s1 = -sum(
        y ** (2 * m - 1 - al) * (-1) ** al * _moment_g_any(al, omega, be)
        / (2 * factorial(al) * factorial(2 * m - 1 - al))
        for al in range(2 * m)
    )
    s2 = be.exp(c * y) / c ** (2 * m)
    s3 = -sum(
        y ** (2 * m - 1 - k) / (factorial(2 * m - 1 - k) * c ** (k + 1)) for k in range(2 * m)
    )
    return s1 + s2 + s3


@dataclass
class OracleResult:
    """Solved weights on [0, 1] plus the polynomial tail and solve diagnostics."""

    m: int
    omega: float
    n: int
    values: np.ndarray      # C_0..C_N
    poly: np.ndarray        # p_0..p_{m-1}
    residual: float         # relative residual of the refined solution
    cond: float             # 2-norm condition estimate of the system matrix


def _build_mp(m: int, omega, n: int):
    """Assemble the defining system in mpmath (entries exact to working dps)."""
    h = mp.mpf(1) / n
    size = n + 1 + m
    A = mp.matrix(size, size)
    b = mp.matrix(size, 1)
    fact = factorial(2 * m - 1)
    for beta in range(n + 1):
        for gam in range(n + 1):
            A[beta, gam] = abs(h * (beta - gam)) ** (2 * m - 1) / (2 * fact)
        for al in range(m):
            A[beta, n + 1 + al] = (h * beta) ** al
        b[beta] = _rhs_f_any(m, omega, h * beta, mp)
    for al in range(m):
        for gam in range(n + 1):
            A[n + 1 + al, gam] = (h * gam) ** al
        b[n + 1 + al] = mp.mpf(1) / (al + 1) if omega == 0 else _moment_g_any(al, omega, mp)
    return A, b


def solve_oracle(m: int, omega_unit: float, n: int) -> OracleResult:
    """Dense solve of the defining system; refined until float64-exact.

    omega_unit is the frequency on [0, 1] (i.e. omega*(b-a) for a target
    interval [a, b]; map the result with transform_unit_to_ab).
    """
    if n + 1 < m:
        raise ValueError("existence requires N+1 >= m")
    if n > _MAX_N:
        raise ValueError(f"oracle is limited to N <= {_MAX_N} (conditioning guard)")
    with mp.workdps(_DPS):
        A_mp, b_mp = _build_mp(m, mp.mpf(omega_unit), n)
        size = n + 1 + m
        A = np.array([[complex(A_mp[i, j]) for j in range(size)] for i in range(size)])
        b = np.array([complex(b_mp[i]) for i in range(size)])
        lu, piv = scipy.linalg.lu_factor(A)
        x = scipy.linalg.lu_solve((lu, piv), b)
        # Iterative refinement with mp residuals: kills both LU rounding and
        # the loss from storing the matrix in binary64.
        for _ in range(3):
            xm = mp.matrix([mp.mpc(v) for v in x])
            r_mp = b_mp - A_mp * xm
            r = np.array([complex(r_mp[i]) for i in range(size)])
            x = x + scipy.linalg.lu_solve((lu, piv), r)
        xm = mp.matrix([mp.mpc(v) for v in x])
        r_mp = b_mp - A_mp * xm
        residual = float(mp.norm(r_mp) / mp.norm(b_mp))
    if residual > 1e-8:
        raise NumericalError(f"oracle system ill-conditioned: residual {residual:.3e}")
    cond = float(np.linalg.cond(A))
    return OracleResult(
        m=m, omega=omega_unit, n=n,
        values=x[: n + 1], poly=x[n + 1 :],
        residual=residual, cond=cond,
    )
