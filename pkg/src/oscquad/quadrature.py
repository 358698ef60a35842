"""Optimal quadrature weights for Fourier integrals over [a, b].

Computes the Sard-optimal weights C_beta for

    int_a^b exp(2*pi*i*omega*x) phi(x) dx  ~=  sum_beta C_beta phi(a + h*beta)

in the Sobolev space of functions with square-integrable m-th derivative.
omega is measured in cycles per unit length (the exp(2*pi*i*omega*x)
convention), never in radians.

Three branches exist:
  * omega = 0: real symmetric weights from a small (m-1) system with
    Bernoulli-number right-hand sides;
  * omega*h not an integer: oscillatory interior term exp(2*pi*i*omega*x_beta)
    scaled by the amplitude K, plus boundary layers a_k q_k^beta + b_k q_k^(N-beta)
    with q_k the in-disk roots of the Euler-Frobenius polynomial E_{2m-2};
  * omega*h integer, omega != 0 (grid-resonant): the oscillatory term drops
    and only the boundary layers plus endpoint corrections remain.

The resonant assembly equals the generic one with K set to zero, so both
share a code path.  The scalar solvers run in mpmath: the right-hand sides
contain terms like 1/(2*pi*i*omega*h)^m that cancel almost completely for
small omega*h, which float64 cannot survive.  A vectorized float64 path
(coefficient_matrix) serves bulk callers and falls back to the scalar
solver near the cancellation zone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, pi

import mpmath as mp
import numpy as np

from .efpoly import delta_zero, ef_coefficients, ef_roots_inside, ef_roots_inside_mp

__all__ = [
    "Branch",
    "QuadratureSpec",
    "CoefficientVector",
    "ErrorNormReport",
    "NumericalError",
    "k_factor",
    "coefficients",
    "coefficients_zero_omega",
    "coefficients_generic",
    "coefficients_resonant",
    "coefficient_matrix",
    "transform_unit_to_ab",
    "error_norm_zero_omega",
    "integrate",
    "fourier_monomial_integral",
    "exactness_residuals",
]

EPS_RESONANCE = 1e-6
_SCALAR_FALLBACK = 1e-2  # |omega*h| below which the float path defers to mpmath
_DPS = 40
MAX_ORDER = 6

# Exact Bernoulli numbers B_1..B_12 (B_1 = -1/2 convention; odd > 1 vanish).
BERNOULLI = {
    0: Fraction(1),
    1: Fraction(-1, 2),
    2: Fraction(1, 6),
    3: Fraction(0),
    4: Fraction(-1, 30),
    5: Fraction(0),
    6: Fraction(1, 42),
    7: Fraction(0),
    8: Fraction(-1, 30),
    9: Fraction(0),
    10: Fraction(5, 66),
    11: Fraction(0),
    12: Fraction(-691, 2730),
}


class NumericalError(RuntimeError):
    """A solve produced an unacceptable residual or a singular system."""


class Branch(enum.Enum):
    ZERO_OMEGA = "zero-omega"
    GENERIC = "generic"
    RESONANT = "resonant-integer"


@dataclass(frozen=True)
class QuadratureSpec:
    """One formula instance: order m, frequency omega (cycles), interval, node count N."""

    m: int
    omega: float
    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("order m must be >= 1")
        if self.m > MAX_ORDER:
            raise ValueError(f"order m must be <= {MAX_ORDER}")
        if not self.b > self.a:
            raise ValueError("interval must satisfy a < b")
        if self.n < 1:
            raise ValueError("node count parameter N must be >= 1")
        if self.n + 1 < self.m:
            raise ValueError(f"existence requires N+1 >= m (got N={self.n}, m={self.m})")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n + 1)


@dataclass
class CoefficientVector:
    """N+1 complex weights plus the branch and auxiliary solve data."""

    spec: QuadratureSpec
    values: np.ndarray
    branch: Branch
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != self.spec.n + 1:
            raise ValueError("coefficient vector length must be N+1")


@dataclass(frozen=True)
class ErrorNormReport:
    """Squared norm of the error functional on [0, 1] for omega = 0."""

    m: int
    n: int
    norm_sq: float
    bernoulli: float


def k_factor(m: int, omega: float, h: float) -> float:
    """Amplitude of the oscillatory interior coefficient term.

    (sinc(pi omega h))^(2m) (2m-1)! / (2 sum_{al<m-1} a_al cos(2 pi omega h (m-1-al)) + a_{m-1})
    with a_al the coefficients of E_{2m-2}.  Equals 1 at omega = 0 because the
    denominator telescopes to E_{2m-2}(1) = (2m-1)!.
    """
    a = ef_coefficients(2 * m - 2)
    x = omega * h
    den = 2.0 * sum(a[al] * np.cos(2 * pi * x * (m - 1 - al)) for al in range(m - 1)) + a[m - 1]
    return float(np.sinc(x) ** (2 * m) * factorial(2 * m - 1) / den)


def _k_factor_mp(m: int, x):
    """k_factor with x = omega*h as an mpf, evaluated at working precision."""
    a = ef_coefficients(2 * m - 2)
    if x == 0:
        return mp.mpf(1)
    den = 2 * mp.fsum(a[al] * mp.cos(2 * mp.pi * x * (m - 1 - al)) for al in range(m - 1)) + a[m - 1]
    sinc = mp.sin(mp.pi * x) / (mp.pi * x)
    return sinc ** (2 * m) * factorial(2 * m - 1) / den


def _boundary_system(m: int, n: int, q):
    """LHS of the (2m-2) system shared by the generic and resonant branches.

    Rows 0..m-2 come from the first equation family (j = 1..m-1), rows
    m-1..2m-3 from the second.  Unknown order: a_1..a_{m-1}, b_1..b_{m-1}.
    Entries depend only on q_k and N, not on omega.
    """
    nk = m - 1
    A = [[0] * (2 * nk) for _ in range(2 * nk)]
    for j in range(1, m):
        for k in range(nk):
            qk = q[k]
            A[j - 1][k] = sum(qk * delta_zero(t, j) / (qk - 1) ** (t + 1) for t in range(1, j + 1))
            A[j - 1][nk + k] = sum(
                qk ** (n + t) * delta_zero(t, j) / (1 - qk) ** (t + 1) for t in range(1, j + 1)
            )
    for j in range(1, m):
        r = nk + j - 1
        for k in range(nk):
            qk = q[k]
            A[r][k] = sum(
                qk**t * delta_zero(t, j) / (1 - qk) ** (t + 1) for t in range(1, j + 1)
            ) - sum(
                n ** (j - al)
                * comb(j, al)
                * sum(qk ** (n + t) * delta_zero(t, al) / (1 - qk) ** (t + 1) for t in range(1, al + 1))
                for al in range(1, j + 1)
            )
            A[r][nk + k] = sum(
                qk ** (n + 1) * delta_zero(t, j) / (qk - 1) ** (t + 1) for t in range(1, j + 1)
            ) - sum(
                n ** (j - al)
                * comb(j, al)
                * sum(qk * delta_zero(t, al) / (qk - 1) ** (t + 1) for t in range(1, al + 1))
                for al in range(1, j + 1)
            )
    return A


def _boundary_rhs(m, n, K, Ea, Eb, E, W):
    """RHS of the boundary-layer system; K = 0 gives the resonant branch."""
    nk = m - 1
    rhs = []
    for j in range(1, m):
        val = factorial(j) * Ea / W ** (j + 1)
        if K != 0:
            val -= sum(
                Ea * E * K * delta_zero(t, j) / (E - 1) ** (t + 1) for t in range(1, j + 1)
            )
        rhs.append(val)
    for j in range(1, m):
        val = (-1) ** (j + 1) * factorial(j) * Ea / W ** (j + 1) + sum(
            n ** (j - al) * (-1) ** al * factorial(j) * Eb / (factorial(j - al) * W ** (al + 1))
            for al in range(1, j + 1)
        )
        if K != 0:
            g = E / (1 - E)
            val -= K * Ea / (1 - E) * sum(g**t * delta_zero(t, j) for t in range(1, j + 1))
            val += (
                K
                * Eb
                / (1 - E)
                * sum(
                    n ** (j - al)
                    * comb(j, al)
                    * sum(g**t * delta_zero(t, al) for t in range(1, al + 1))
                    for al in range(1, j + 1)
                )
            )
        rhs.append(val)
    assert len(rhs) == 2 * nk
    return rhs


def _assemble(spec, K, ak, bk, q, Ea, Eb, E, W, exp_fn):
    """Endpoint + interior coefficient assembly shared by both oscillatory branches."""
    h = spec.h
    n = spec.n
    nk = spec.m - 1
    vals = [mp.mpc(0)] * (n + 1)
    lay0 = sum(ak[k] * q[k] / (q[k] - 1) + bk[k] * q[k] ** n / (1 - q[k]) for k in range(nk))
    layN = sum(ak[k] * q[k] ** n / (1 - q[k]) + bk[k] * q[k] / (q[k] - 1) for k in range(nk))
    if K != 0:
        vals[0] = h * (Ea * E * K / (E - 1) - Ea / W + lay0)
        vals[n] = h * (Eb * K / (1 - E) + Eb / W + layN)
    else:
        vals[0] = h * (-Ea / W + lay0)
        vals[n] = h * (Eb / W + layN)
    for beta in range(1, n):
        osc = exp_fn(beta) * K if K != 0 else 0
        vals[beta] = h * (osc + sum(ak[k] * q[k] ** beta + bk[k] * q[k] ** (n - beta) for k in range(nk)))
    return vals


def _solve_oscillatory_mp(spec: QuadratureSpec, resonant: bool) -> CoefficientVector:
    m, n = spec.m, spec.n
    with mp.workdps(_DPS):
        h = (mp.mpf(spec.b) - mp.mpf(spec.a)) / n
        omega = mp.mpf(spec.omega)
        x = omega * h
        q = ef_roots_inside_mp(2 * m - 2, dps=_DPS) if m >= 2 else ()
        W = 2j * mp.pi * x
        E = mp.exp(2j * mp.pi * x)
        Ea = mp.exp(2j * mp.pi * omega * spec.a)
        Eb = mp.exp(2j * mp.pi * omega * spec.b)
        K = mp.mpf(0) if resonant else _k_factor_mp(m, x)
        nk = m - 1
        aux = {"k_factor": float(K), "omega_effective": spec.omega}
        if nk:
            A = mp.matrix(_boundary_system(m, n, q))
            rhs = mp.matrix(_boundary_rhs(m, n, K, Ea, Eb, E, W))
            try:
                sol = mp.lu_solve(A, rhs)
            except ZeroDivisionError as exc:
                raise NumericalError("boundary-layer system is singular") from exc
            resid = mp.norm(A * sol - rhs) / max(mp.norm(rhs), mp.mpf(1e-300))
            if resid > 1e-6:
                raise NumericalError(f"boundary-layer system residual {float(resid):.3e}")
            ak = [sol[k] for k in range(nk)]
            bk = [sol[nk + k] for k in range(nk)]
            aux["a_k"] = [complex(v) for v in ak]
            aux["b_k"] = [complex(v) for v in bk]
            aux["system_residual"] = float(resid)
        else:
            ak, bk = [], []
            aux["a_k"], aux["b_k"] = [], []
            aux["system_residual"] = 0.0

        def exp_fn(beta):
            return mp.exp(2j * mp.pi * omega * (mp.mpf(spec.a) + h * beta))

        vals = _assemble(spec, K, ak, bk, q, Ea, Eb, E, W, exp_fn)
        values = np.array([complex(v) for v in vals])
    branch = Branch.RESONANT if resonant else Branch.GENERIC
    return CoefficientVector(spec=spec, values=values, branch=branch, aux=aux)


def coefficients_generic(spec: QuadratureSpec) -> CoefficientVector:
    """Weights for omega*h not an integer (within the resonance tolerance)."""
    x = spec.omega * spec.h
    if abs(x - round(x)) < EPS_RESONANCE:
        raise ValueError("omega*h is (numerically) an integer; use the resonant branch")
    return _solve_oscillatory_mp(spec, resonant=False)


def coefficients_resonant(spec: QuadratureSpec) -> CoefficientVector:
    """Weights for omega*h integer, omega != 0."""
    x = spec.omega * spec.h
    r = round(x)
    if r == 0 or abs(x - r) >= EPS_RESONANCE:
        raise ValueError("resonant branch requires omega*h a nonzero integer")
    if abs(x - r) > 0:
        # snap to the exact resonance; coefficients are continuous in omega
        spec = QuadratureSpec(spec.m, r / spec.h, spec.a, spec.b, spec.n)
    return _solve_oscillatory_mp(spec, resonant=True)


def _zero_omega_dk(m: int, n: int):
    """d_k of the omega = 0 formula (m-1 unknowns, Bernoulli RHS), in mpmath."""
    nk = m - 1
    if nk == 0:
        return (), ()
    q = ef_roots_inside_mp(2 * m - 2, dps=_DPS)
    A = mp.matrix(nk, nk)
    rhs = mp.matrix(nk, 1)
    for j in range(1, m):
        for k in range(nk):
            qk = q[k]
            A[j - 1, k] = mp.fsum(
                (qk + (-1) ** (i + 1) * qk ** (n + i)) / (qk - 1) ** (i + 1) * delta_zero(i, j)
                for i in range(1, j + 1)
            )
        bj = BERNOULLI[j + 1]
        rhs[j - 1] = mp.mpf(bj.numerator) / (bj.denominator * (j + 1))
    try:
        d = mp.lu_solve(A, rhs)
    except ZeroDivisionError as exc:
        raise NumericalError("d_k system is singular") from exc
    return q, [d[k] for k in range(nk)]


def coefficients_zero_omega(spec: QuadratureSpec) -> CoefficientVector:
    """omega = 0 weights: trapezoid rule plus boundary-layer corrections.

    For m = 1 all root sums are empty and the result is exactly the
    trapezoid rule.
    """
    m, n = spec.m, spec.n
    with mp.workdps(_DPS):
        h = (mp.mpf(spec.b) - mp.mpf(spec.a)) / n
        q, d = _zero_omega_dk(m, n)
        nk = m - 1
        edge = h * (mp.mpf(1) / 2 - mp.fsum(d[k] * (q[k] - q[k] ** n) / (1 - q[k]) for k in range(nk)))
        vals = [edge]
        for beta in range(1, n):
            vals.append(h * (1 + mp.fsum(d[k] * (q[k] ** beta + q[k] ** (n - beta)) for k in range(nk))))
        vals.append(edge)
        values = np.array([float(v) for v in vals], dtype=complex)
        aux = {"d_k": [float(v) for v in d], "omega_effective": 0.0}
    return CoefficientVector(spec=spec, values=values, branch=Branch.ZERO_OMEGA, aux=aux)


def coefficients(spec: QuadratureSpec, eps_res: float = EPS_RESONANCE) -> CoefficientVector:
    """Dispatch to the right branch; continuous across the switch boundaries.

    dist(omega*h, Z) < eps_res routes to the nearest resonance; the nearest
    resonance 0 means the zero-omega formula (the omega -> 0 limit).
    """
    if spec.omega == 0:
        return coefficients_zero_omega(spec)
    x = spec.omega * spec.h
    r = round(x)
    if abs(x - r) < eps_res:
        if r == 0:
            zero_spec = QuadratureSpec(spec.m, 0.0, spec.a, spec.b, spec.n)
            out = coefficients_zero_omega(zero_spec)
            return CoefficientVector(spec=spec, values=out.values, branch=out.branch, aux=out.aux)
        out = coefficients_resonant(spec)
        return CoefficientVector(spec=spec, values=out.values, branch=out.branch,
                                 aux={**out.aux, "omega_effective": r / spec.h})
    return coefficients_generic(spec)


def transform_unit_to_ab(unit: CoefficientVector, a: float, b: float, omega: float) -> CoefficientVector:
    """Map weights computed on [0, 1] at frequency omega*(b-a) onto [a, b].

    C[a,b]_beta = (b - a) * exp(2*pi*i*omega*a) * C[0,1]_beta.
    """
    u = unit.spec
    expected = omega * (b - a)
    if abs(u.omega - expected) > 1e-9 * max(1.0, abs(expected)) or (u.a, u.b) != (0.0, 1.0):
        raise ValueError("unit vector must live on [0,1] with frequency omega*(b-a)")
    spec = QuadratureSpec(u.m, omega, a, b, u.n)
    values = (b - a) * np.exp(2j * pi * omega * a) * unit.values
    return CoefficientVector(spec=spec, values=values, branch=unit.branch, aux=dict(unit.aux))


def error_norm_zero_omega(m: int, n: int) -> ErrorNormReport:
    """Squared error-functional norm on [0, 1] at omega = 0.

    (-1)^(m+1) [ h^{2m} B_{2m}/(2m)! + 2 h^{2m+1}/(2m)! *
                 sum_k d_k sum_{i=1}^{2m} (-q_k^{N+i} + (-1)^i q_k)/(1-q_k)^{i+1} Delta^i 0^{2m} ]
    """
    if n + 1 < m:
        raise ValueError("existence requires N+1 >= m")
    b2m = BERNOULLI[2 * m]
    with mp.workdps(_DPS):
        h = mp.mpf(1) / n
        q, d = _zero_omega_dk(m, n)
        core = h ** (2 * m) * mp.mpf(b2m.numerator) / b2m.denominator / factorial(2 * m)
        tail = mp.mpf(0)
        for k in range(m - 1):
            qk = q[k]
            tail += d[k] * mp.fsum(
                (-(qk ** (n + i)) + (-1) ** i * qk) / (1 - qk) ** (i + 1) * delta_zero(i, 2 * m)
                for i in range(1, 2 * m + 1)
            )
        norm_sq = (-1) ** (m + 1) * (core + 2 * h ** (2 * m + 1) / factorial(2 * m) * tail)
        return ErrorNormReport(m=m, n=n, norm_sq=float(norm_sq), bernoulli=float(b2m))


def integrate(spec: QuadratureSpec, samples) -> complex:
    """Apply the optimal weights to samples[beta] = phi(a + h*beta)."""
    samples = np.asarray(samples)
    if len(samples) != spec.n + 1:
        raise ValueError(f"expected {spec.n + 1} samples, got {len(samples)}")
    return complex(np.dot(coefficients(spec).values, samples))


def fourier_monomial_integral(alpha: int, omega: float, a: float, b: float) -> complex:
    """Analytic int_a^b exp(2*pi*i*omega*x) x^alpha dx (stable recurrence in alpha)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if omega == 0:
        return complex((b ** (alpha + 1) - a ** (alpha + 1)) / (alpha + 1))
    c = 2j * pi * omega
    ea, eb = np.exp(c * a), np.exp(c * b)
    val = (eb - ea) / c
    for k in range(1, alpha + 1):
        val = (eb * b**k - ea * a**k) / c - k / c * val
    return complex(val)


def exactness_residuals(coeffs: CoefficientVector) -> np.ndarray:
    """Relative defects of sum_beta C_beta x_beta^alpha vs the analytic moments, alpha < m."""
    spec = coeffs.spec
    omega = coeffs.aux.get("omega_effective", spec.omega)
    nodes = spec.nodes()
    out = np.empty(spec.m)
    for alpha in range(spec.m):
        g = fourier_monomial_integral(alpha, omega, spec.a, spec.b)
        s = np.dot(coeffs.values, nodes**alpha)
        out[alpha] = abs(s - g) / (1.0 + abs(g))
    return out


def coefficient_matrix(m: int, omegas, a: float, b: float, n: int,
                       eps_res: float = EPS_RESONANCE) -> np.ndarray:
    """Weights for many frequencies at once: row i is coefficients for omegas[i].

    Vectorized float64 for well-separated omega*h; frequencies near a
    resonance or near zero go through the mpmath scalar path.  Agrees with
    coefficients() entrywise.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    out = np.empty((omegas.size, n + 1), dtype=complex)
    h = (b - a) / n
    x = omegas * h
    r = np.round(x)
    dist = np.abs(x - r)
    near_res = dist < eps_res
    zero = (omegas == 0.0) | (near_res & (r == 0))
    scalar = ~zero & (near_res | (np.abs(x) < _SCALAR_FALLBACK))
    generic = ~(zero | scalar)

    if zero.any():
        c0 = coefficients_zero_omega(QuadratureSpec(m, 0.0, a, b, n)).values
        out[zero] = c0
    for i in np.nonzero(scalar)[0]:
        out[i] = coefficients(QuadratureSpec(m, float(omegas[i]), a, b, n), eps_res).values
    if generic.any():
        out[generic] = _generic_matrix_float(m, omegas[generic], a, b, n)
    return out


def k_factor_array(m, x):
    """Vectorized k_factor over an array of x = omega*h values."""
    ef = ef_coefficients(2 * m - 2)
    den = 2.0 * sum(ef[al] * np.cos(2 * pi * x * (m - 1 - al)) for al in range(m - 1)) + ef[m - 1]
    return np.sinc(x) ** (2 * m) * factorial(2 * m - 1) / den


def boundary_solutions_float(m, n, K, Ea, Eb, E, W):
    """Vectorized float64 solve of the boundary-layer system.

    K, Ea, Eb, E, W are arrays of any common shape (one entry per frequency);
    returns (a_k, b_k) with a trailing axis of length m-1.  Caller guarantees
    that omega*h is away from 0 (cancellation) and from nonzero integers
    (resonance), where the scalar mpmath path must be used instead.
    """
    nk = m - 1
    shape = np.shape(K)
    if nk == 0:
        z = np.zeros(shape + (0,), dtype=complex)
        return z, z
    q = np.array(ef_roots_inside(2 * m - 2))
    lhs = np.array(_boundary_system(m, n, q), dtype=float)
    inv = np.linalg.inv(lhs)
    rhs = np.empty(shape + (2 * nk,), dtype=complex)
    g = E / (1 - E)
    for j in range(1, m):
        val = factorial(j) * Ea / W ** (j + 1)
        val -= sum(Ea * E * K * delta_zero(t, j) / (E - 1) ** (t + 1) for t in range(1, j + 1))
        rhs[..., j - 1] = val
    for j in range(1, m):
        val = (-1) ** (j + 1) * factorial(j) * Ea / W ** (j + 1)
        val = val + sum(
            n ** (j - al) * (-1) ** al * factorial(j) * Eb / (factorial(j - al) * W ** (al + 1))
            for al in range(1, j + 1)
        )
        val -= K * Ea / (1 - E) * sum(g**t * delta_zero(t, j) for t in range(1, j + 1))
        val += K * Eb / (1 - E) * sum(
            n ** (j - al) * comb(j, al) * sum(g**t * delta_zero(t, al) for t in range(1, al + 1))
            for al in range(1, j + 1)
        )
        rhs[..., nk + j - 1] = val
    sol = rhs @ inv.T
    return sol[..., :nk], sol[..., nk:]


def _generic_matrix_float(m, omegas, a, b, n):
    """Vectorized generic-branch evaluation (caller guarantees |omega*h| is safe)."""
    h = (b - a) / n
    x = omegas * h
    q = np.array(ef_roots_inside(2 * m - 2)) if m >= 2 else np.zeros(0)
    nk = m - 1
    K = k_factor_array(m, x)
    E = np.exp(2j * pi * x)
    Ea = np.exp(2j * pi * omegas * a)
    Eb = np.exp(2j * pi * omegas * b)
    W = 2j * pi * x
    ak, bk = boundary_solutions_float(m, n, K, Ea, Eb, E, W)

    out = np.empty((omegas.size, n + 1), dtype=complex)
    lay0 = (ak * (q / (q - 1)) + bk * (q**n / (1 - q))).sum(axis=1)
    layN = (ak * (q**n / (1 - q)) + bk * (q / (q - 1))).sum(axis=1)
    out[:, 0] = h * (Ea * E * K / (E - 1) - Ea / W + lay0)
    out[:, n] = h * (Eb * K / (1 - E) + Eb / W + layN)
    betas = np.arange(1, n)
    qb = q[None, :, None] ** betas[None, None, :]  # (1, nk, n-1)
    qrev = q[None, :, None] ** (n - betas)[None, None, :]
    layer = (ak[:, :, None] * qb + bk[:, :, None] * qrev).sum(axis=1)
    osc = np.exp(2j * pi * np.outer(omegas, a + h * betas)) * K[:, None]
    out[:, 1:n] = h * (osc + layer)
    return out
