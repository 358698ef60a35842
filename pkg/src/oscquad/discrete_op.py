"""Discrete analogue of d^{2m}/dx^{2m} and its verification identities.

The grid function D_m(h beta) inverts (discretely convolves to a delta with)
the kernel G_m(x) = |x|^{2m-1} / (2 (2m-1)!).  It is used here purely as
verification machinery for the coefficient engine: the convolution identity
h * (D_m * G_m) = delta and the moment identities are checked numerically.

The verification sums cancel catastrophically in float64 (terms reach ~1e11
for m=3 while the result is 0 or 1), so verify_convolution / verify_moments
evaluate in mpmath.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import mpmath as mp

from .efpoly import ef_coefficients, ef_roots_inside, ef_roots_inside_mp, horner

__all__ = [
    "DiscreteOperator",
    "g_kernel",
    "d_discrete",
    "default_window",
    "verify_convolution",
    "verify_moments",
]

_VERIFY_DPS = 50


def g_kernel(m: int, x: float) -> float:
    """G_m(x) = |x|^(2m-1) / (2 (2m-1)!)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return abs(x) ** (2 * m - 1) / (2.0 * factorial(2 * m - 1))


@dataclass(frozen=True)
class DiscreteOperator:
    """D_m on step h: scale p, boundary-layer amplitudes A_k, center C, roots q."""

    m: int
    h: float
    p: float
    A: tuple[float, ...]
    C: float
    q: tuple[float, ...]

    @classmethod
    def build(cls, m: int, h: float) -> "DiscreteOperator":
        if m < 1:
            raise ValueError("m must be >= 1")
        if h <= 0:
            raise ValueError("h must be positive")
        q = ef_roots_inside(2 * m - 2) if m >= 2 else ()
        e_odd = ef_coefficients(2 * m - 1)
        # Horner on the exact integer coefficients at the polished root avoids
        # the cancellation of expanding (1-q)^(2m+1) separately.
        A = tuple((1 - qk) ** (2 * m + 1) / horner(e_odd, qk) for qk in q)
        return cls(
            m=m,
            h=h,
            p=factorial(2 * m - 1) / h ** (2 * m),
            A=A,
            C=-float(2 ** (2 * m - 1)),
            q=q,
        )


def d_discrete(op: DiscreteOperator, beta: int) -> float:
    """Value D_m(h beta); even in beta, geometric decay at rate max|q_k|."""
    b = abs(beta)
    if b >= 2:
        s = sum(A * qk ** (b - 1) for A, qk in zip(op.A, op.q))
    elif b == 1:
        s = 1.0 + sum(op.A)
    else:
        s = op.C + sum(A / qk for A, qk in zip(op.A, op.q))
    return op.p * s


def default_window(op: DiscreteOperator, tol: float = 1e-12, cap: int = 10_000) -> int:
    """Smallest window with a certified truncation bound below tol.

    The truncated tail of the convolution sum is bounded by
    h * p * sum_k |A_k| * qmax^W * max(1, G_m(h W)); geometric decay beats the
    polynomial kernel growth, so a short scan suffices.
    """
    if op.m == 1:
        return 8  # stencil is exactly finite
    qmax = max(abs(qk) for qk in op.q)
    amp = op.h * op.p * sum(abs(A) for A in op.A)
    w = 2 * op.m
    while w < cap:
        if amp * qmax**w * max(1.0, g_kernel(op.m, op.h * w)) * w < tol:
            return w
        w += 1
    return cap


def _mp_operator(op: DiscreteOperator):
    """High-precision (q, A, p, C) for the verification sums."""
    m = op.m
    q = ef_roots_inside_mp(2 * m - 2, dps=_VERIFY_DPS) if m >= 2 else ()
    e_odd = ef_coefficients(2 * m - 1)
    A = tuple((1 - qk) ** (2 * m + 1) / horner(e_odd, qk) for qk in q)
    p = factorial(2 * m - 1) / mp.mpf(op.h) ** (2 * m)
    return q, A, p, mp.mpf(-(2 ** (2 * m - 1)))


def _d_mp(beta: int, q, A, p, C):
    b = abs(beta)
    if b >= 2:
        s = mp.fsum(Ak * qk ** (b - 1) for Ak, qk in zip(A, q))
    elif b == 1:
        s = 1 + mp.fsum(A)
    else:
        s = C + mp.fsum(Ak / qk for Ak, qk in zip(A, q))
    return p * s


def verify_convolution(op: DiscreteOperator, window: int | None = None) -> float:
    """Max residual of h * sum_gamma D_m(h gamma) G_m(h beta - h gamma) - delta(beta)
    over |beta| <= window/2.  The sum is truncated at |gamma| <= window."""
    if window is None:
        window = default_window(op)
    if window < 2 * op.m:
        raise ValueError("window too small to contain the operator stencil")
    with mp.workdps(_VERIFY_DPS):
        q, A, p, C = _mp_operator(op)
        h = mp.mpf(op.h)
        fact = factorial(2 * op.m - 1)
        d_vals = {g: _d_mp(g, q, A, p, C) for g in range(window + 1)}

        def g_m(x):
            return abs(x) ** (2 * op.m - 1) / (2 * fact)

        worst = mp.mpf(0)
        for beta in range(0, window // 2 + 1):  # D and G are even: beta >= 0 suffices
            conv = h * mp.fsum(
                d_vals[abs(g)] * g_m(h * (beta - g)) for g in range(-window, window + 1)
            )
            res = abs(conv - (1 if beta == 0 else 0))
            worst = max(worst, res)
        return float(worst)


def verify_moments(op: DiscreteOperator, k: int, window: int | None = None) -> float:
    """sum_beta D_m(h beta) (h beta)^k over |beta| <= window.

    Expected 0 for 0 <= k <= 2m-1 and (2m)! for k = 2m.
    """
    if not 0 <= k <= 2 * op.m:
        raise ValueError("moment degree must satisfy 0 <= k <= 2m")
    if k % 2 == 1:
        return 0.0  # odd symmetry is exact
    if window is None:
        window = default_window(op)
    with mp.workdps(_VERIFY_DPS):
        q, A, p, C = _mp_operator(op)
        h = mp.mpf(op.h)
        total = _d_mp(0, q, A, p, C) * (0 if k else 1)
        total += 2 * mp.fsum(
            _d_mp(b, q, A, p, C) * (h * b) ** k for b in range(1, window + 1)
        )
        return float(total)
