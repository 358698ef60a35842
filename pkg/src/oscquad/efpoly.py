"""Euler-Frobenius polynomials, their roots, and finite differences of powers.

All coefficient arithmetic is exact (Python integers).  Roots inside the
unit interval (-1, 0) are isolated by sign changes and polished with Newton
iterations on the exact integer coefficients; an mpmath variant provides
them to arbitrary precision for the high-accuracy coefficient solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import mpmath as mp
import numpy as np

__all__ = [
    "EFPolynomial",
    "ef_coefficients",
    "ef_roots_inside",
    "ef_roots_inside_mp",
    "delta_zero",
    "horner",
]


@lru_cache(maxsize=None)
def ef_coefficients(k: int) -> tuple[int, ...]:
    """Integer coefficients a_0..a_k of the degree-k Euler-Frobenius polynomial.

    a_s = sum_{j=0}^{s} (-1)^j C(k+2, j) (s+1-j)^(k+1).  The result is
    palindromic (a_s == a_{k-s}).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    return tuple(
        sum((-1) ** j * comb(k + 2, j) * (s + 1 - j) ** (k + 1) for j in range(s + 1))
        for s in range(k + 1)
    )


def horner(coeffs, x):
    """Evaluate sum_s coeffs[s] * x**s; works for float, complex and mpf."""
    acc = 0 * x
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def _horner_deriv(coeffs, x):
    acc = 0 * x
    for s in range(len(coeffs) - 1, 0, -1):
        acc = acc * x + s * coeffs[s]
    return acc


@lru_cache(maxsize=None)
def ef_roots_inside(k: int) -> tuple[float, ...]:
    """Roots q of E_k with |q| < 1, ascending.  k must be even and >= 2.

    All roots of E_k are real, negative and distinct, and pair up as
    q_j * q_{k+1-j} = 1, so exactly k/2 of them lie in (-1, 0).
    """
    if k < 2 or k % 2:
        raise ValueError("k must be an even integer >= 2")
    coeffs = ef_coefficients(k)

    # Bracket by sign changes on a grid that is dense near both endpoints
    # (the extreme roots approach 0 and -1 as k grows).
    u = np.linspace(0.0, 60.0, 40_000)
    grid = np.unique(np.concatenate([-np.exp(-u), -1.0 + np.exp(-u), np.linspace(-0.999, -1e-9, 20_000)]))
    grid = grid[(grid > -1.0) & (grid < 0.0)]
    vals = np.array([horner(coeffs, float(x)) for x in grid])
    sign = np.sign(vals)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]

    roots = []
    for i in idx:
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo = horner(coeffs, lo)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fmid = horner(coeffs, mid)
            if flo * fmid <= 0:
                hi = mid
            else:
                lo, flo = mid, fmid
        q = 0.5 * (lo + hi)
        for _ in range(60):
            step = horner(coeffs, q) / _horner_deriv(coeffs, q)
            q -= step
            if abs(step) < 1e-17 * abs(q):
                break
        roots.append(q)

    roots = sorted(set(roots))
    if len(roots) != k // 2:
        raise RuntimeError(f"expected {k // 2} roots of E_{k} in (-1, 0), found {len(roots)}")
    return tuple(roots)


def ef_roots_inside_mp(k: int, dps: int = 40) -> tuple[mp.mpf, ...]:
    """High-precision polish of ef_roots_inside via Newton in mpmath."""
    coeffs = ef_coefficients(k)
    out = []
    with mp.workdps(dps + 10):
        for seed in ef_roots_inside(k):
            q = mp.mpf(seed)
            for _ in range(100):
                step = horner(coeffs, q) / _horner_deriv(coeffs, q)
                q -= step
                if abs(step) < mp.mpf(10) ** (-dps - 5):
                    break
            out.append(+q)
    return tuple(out)


@lru_cache(maxsize=None)
def delta_zero(i: int, j: int) -> int:
    """Finite difference Delta^i 0^j = sum_{l=1}^{i} (-1)^(i-l) C(i,l) l^j.

    Delta^0 0^0 = 1 by convention; vanishes for i > j.
    """
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    if i == 0:
        return 1 if j == 0 else 0
    if i > j:
        return 0
    return sum((-1) ** (i - l) * comb(i, l) * l**j for l in range(1, i + 1))


@dataclass(frozen=True)
class EFPolynomial:
    """Degree, exact coefficients and the in-disk roots of E_k."""

    degree: int
    coeffs: tuple[int, ...]
    roots_inside: tuple[float, ...]

    @classmethod
    def build(cls, k: int) -> "EFPolynomial":
        roots = ef_roots_inside(k) if (k >= 2 and k % 2 == 0) else ()
        return cls(degree=k, coeffs=ef_coefficients(k), roots_inside=roots)

    def __call__(self, x):
        return horner(self.coeffs, x)
