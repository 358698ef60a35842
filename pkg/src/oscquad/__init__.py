"""Optimal quadrature for oscillatory Fourier integrals, with a CT application.

Computes Sard-optimal weights for int_a^b exp(2*pi*i*omega*x) phi(x) dx over
the Sobolev space of functions with square-integrable m-th derivative, checks
them against the directly solved defining linear system, and applies them in
a filtered back-projection reconstruction pipeline.
"""

from .ct import (
    Ellipse,
    ImageGrid,
    MetricsReport,
    Sinogram,
    add_poisson_noise,
    analytic_radon,
    fbp_reconstruct,
    load_phantom,
    make_sinogram,
    metrics,
    phantom_image,
)
from .discrete_op import DiscreteOperator, d_discrete, g_kernel, verify_convolution, verify_moments
from .efpoly import EFPolynomial, delta_zero, ef_coefficients, ef_roots_inside
from .fourier import (
    CoefficientCache,
    SampledSignal,
    SpectrumGrid,
    dft,
    filtered_inverse,
    filtered_inverse_many,
    forward_transform,
    idft,
)
from .oracle import OracleResult, solve_oracle
from .quadrature import (
    Branch,
    CoefficientVector,
    NumericalError,
    QuadratureSpec,
    coefficient_matrix,
    coefficients,
    error_norm_zero_omega,
    exactness_residuals,
    fourier_monomial_integral,
    integrate,
    k_factor,
    transform_unit_to_ab,
)

__version__ = "0.1.0"
