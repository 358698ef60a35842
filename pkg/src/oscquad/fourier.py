"""Fourier-transform operators built from the optimal weights, plus a DFT baseline.

The forward operator approximates S(w) = int_a^b P(t) exp(-2*pi*i*w*t) dt by
applying the optimal weights at frequency -w to the samples of P.  The
filtered inverse approximates Q(t) = int_{-W}^{W} S(w) |w| exp(2*pi*i*w*t) dw
by quadrature over a truncated symmetric band; here the roles of space and
frequency swap, so the weight spec lives on [-W, W] with oscillation
parameter t.  No interpolation is involved: Q is evaluated directly at any t.

The DFT baseline is the textbook transform pair (direct O(n^2) matrices,
numpy fft conventions) used by the conventional filtered back-projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureSpec, coefficient_matrix, coefficients

__all__ = [
    "SampledSignal",
    "SpectrumGrid",
    "CoefficientCache",
    "forward_transform",
    "filtered_inverse",
    "filtered_inverse_many",
    "dft",
    "idft",
]


@dataclass(frozen=True)
class SampledSignal:
    """Uniform samples of a function on [a, b] (N+1 values, step (b-a)/N)."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("a sampled signal needs at least two samples")
        if not self.b > self.a:
            raise ValueError("extent must satisfy a < b")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n


@dataclass
class SpectrumGrid:
    """Uniform frequency samples on the symmetric band [-omega_max, omega_max]."""

    omega_max: float
    values: np.ndarray

    def __post_init__(self):
        if self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        if len(self.values) < 2:
            raise ValueError("a spectrum grid needs at least two samples")

    @property
    def omegas(self) -> np.ndarray:
        return np.linspace(-self.omega_max, self.omega_max, len(self.values))

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def spacing(self) -> float:
        return 2.0 * self.omega_max / self.n

    @classmethod
    def band(cls, omega_max: float, samples: int) -> "SpectrumGrid":
        return cls(omega_max=omega_max, values=np.zeros(samples, dtype=complex))

    @classmethod
    def nyquist(cls, signal: SampledSignal) -> "SpectrumGrid":
        """Default band: W = 1/(2 h) (detector Nyquist), M = N frequency steps."""
        return cls.band(1.0 / (2.0 * signal.h), signal.n + 1)


class CoefficientCache:
    """Reusable weight matrices keyed by (m, grid geometry, frequency list)."""

    def __init__(self):
        self._store: dict = {}

    def matrix(self, m: int, omegas: np.ndarray, a: float, b: float, n: int) -> np.ndarray:
        key = (m, a, b, n, omegas.tobytes())
        if key not in self._store:
            self._store[key] = coefficient_matrix(m, omegas, a, b, n)
        return self._store[key]


def forward_transform(signal: SampledSignal, freqs: SpectrumGrid, m: int,
                      cache: CoefficientCache | None = None) -> SpectrumGrid:
    """S(w_n) = sum_beta C_beta(-w_n) P(t_beta) for every frequency on the grid."""
    omegas = freqs.omegas
    if cache is None:
        mat = coefficient_matrix(m, -omegas, signal.a, signal.b, signal.n)
    else:
        mat = cache.matrix(m, -omegas, signal.a, signal.b, signal.n)
    return SpectrumGrid(omega_max=freqs.omega_max, values=mat @ signal.values)


def filtered_inverse(spectrum: SpectrumGrid, t: float, m: int) -> complex:
    """Ramp-filtered inverse transform at one spatial coordinate t.

    The real part is the filtered projection value; the imaginary part is a
    diagnostic (small for spectra of real signals).
    """
    spec = QuadratureSpec(m, float(t), -spectrum.omega_max, spectrum.omega_max, spectrum.n)
    c = coefficients(spec)
    return complex(np.dot(c.values, spectrum.values * np.abs(spectrum.omegas)))


def filtered_inverse_many(spectrum: SpectrumGrid, ts, m: int,
                          cache: CoefficientCache | None = None) -> np.ndarray:
    """Vectorized filtered_inverse over an array of coordinates."""
    ts = np.asarray(ts, dtype=float)
    if cache is None:
        mat = coefficient_matrix(m, ts, -spectrum.omega_max, spectrum.omega_max, spectrum.n)
    else:
        mat = cache.matrix(m, ts, -spectrum.omega_max, spectrum.omega_max, spectrum.n)
    return mat @ (spectrum.values * np.abs(spectrum.omegas))


def dft(values: np.ndarray) -> np.ndarray:
    """Direct discrete Fourier transform, numpy fft convention (no 1/n)."""
    values = np.asarray(values)
    n = len(values)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ values.astype(complex)


def idft(values: np.ndarray) -> np.ndarray:
    """Inverse of dft (includes the 1/n factor)."""
    values = np.asarray(values)
    n = len(values)
    k = np.arange(n)
    return (np.exp(2j * np.pi * np.outer(k, k) / n) @ values.astype(complex)) / n
