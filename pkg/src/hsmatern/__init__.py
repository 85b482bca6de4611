"""Matérn and inverse multiquadric kernels, Hankel-Schoenberg transforms,
Schoenberg matrix certificates and Lagrange-type interpolation."""
from .errors import (AccuracyError, DivergenceError, DomainError, HSMaternError, PointSetError,
                     PreconditionError, SingularMatrixError)
from .quadrature import QuadratureConfig
from .specfun import SeriesPolicy, bessel_k, matern, matern_norm, omega
from .hstransform import RadialDensity, TransformResult, hs_forward, hs_inverse
from .kernels import InnerProductSpace, KernelSpec, kernel_eval, radial_fourier
from .schoenberg import OperatorCertificate, PointSet, assemble, build_point_set, certify
from .interpolate import LagrangeInterpolator, SchoenbergCertifier, solve_lagrange

__version__ = "0.1.0"
