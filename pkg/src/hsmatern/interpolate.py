"""Lagrange-type radial basis interpolation on scattered points.

The cardinal functions are ``u_j(x) = sum_k c[j, k] phi(|x - x_k|)`` with
the coefficient matrix ``C = (S + reg I)^{-1}``, so that ``u_j(x_k)`` is the
Kronecker delta when ``reg = 0``.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, cho_factor, cho_solve, solve
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DomainError, SingularMatrixError
from .kernels import KernelSpec, kernel_eval, kernel_from_name
from .schoenberg import assemble, build_point_set, certify

__all__ = [
    "LagrangeBasis",
    "Interpolant",
    "solve_lagrange",
    "make_interpolant",
    "eval_interpolant",
    "cardinality_check",
    "LagrangeInterpolator",
    "SchoenbergCertifier",
]


@dataclass(frozen=True)
class LagrangeBasis:
    source: object
    coefficients: np.ndarray
    solve_residual: float
    reg: float = 0.0
    method: str = "cholesky"


@dataclass(frozen=True)
class Interpolant:
    basis: LagrangeBasis
    samples: np.ndarray
    kernel: object
    nodes: object
    weights: np.ndarray

    def __call__(self, x):
        return eval_interpolant(self, x)


def solve_lagrange(S, reg=0.0):
    """Coefficients of the cardinal functions for a Schoenberg matrix.

    Cholesky first; a symmetric indefinite solve is the fallback. A singular
    system without regularization raises SingularMatrixError.
    """
    reg = float(reg)
    if not reg >= 0:
        raise DomainError("reg must be nonnegative")
    A = np.array(S.entries, dtype=float)
    if not np.allclose(A, A.T, rtol=0, atol=1e-14 * np.abs(A).max()):
        raise DomainError("Schoenberg matrix is not symmetric")
    N = A.shape[0]
    A[np.diag_indices(N)] += reg
    eye = np.eye(N)
    method = "cholesky"
    try:
        C = cho_solve(cho_factor(A, lower=True), eye)
    except LinAlgError:
        method = "symmetric-indefinite"
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                C = solve(A, eye, assume_a="sym")
        except (LinAlgError, LinAlgWarning) as exc:
            hint = "" if reg > 0 else "; run certify first or pass reg > 0"
            raise SingularMatrixError(f"Schoenberg system is numerically singular{hint}") from exc
    C = 0.5 * (C + C.T)
    residual = float(np.abs(A @ C - eye).max())
    return LagrangeBasis(S, C, residual, reg, method)


def make_interpolant(basis, samples):
    samples = np.asarray(samples, dtype=float).ravel()
    S = basis.source
    if samples.shape[0] != S.size:
        raise DomainError(f"{samples.shape[0]} samples for {S.size} nodes")
    w = basis.coefficients.T @ samples
    return Interpolant(basis, samples, S.kernel, S.source, w)


def _kernel_values(kernel, r):
    if isinstance(kernel, KernelSpec):
        return kernel_eval(kernel, r)
    return np.asarray(kernel(r), dtype=float)


def eval_interpolant(interp, x):
    """Value of the interpolant at one point or at each row of ``x``."""
    pts = np.asarray(x, dtype=float)
    n = interp.nodes.ambient_dim
    single = pts.ndim <= 1 and pts.size == n
    pts = pts.reshape(-1, n)
    r = cdist(pts, interp.nodes.points)
    vals = _kernel_values(interp.kernel, r.ravel()).reshape(r.shape) @ interp.weights
    return float(vals[0]) if single else vals


def cardinality_check(basis, X, kernel):
    """``max |u_j(x_k) - delta_jk|`` with the kernel re-evaluated on X."""
    S = assemble(kernel, X).entries
    U = basis.coefficients @ S
    return float(np.abs(U - np.eye(U.shape[0])).max())


class _KernelParams:
    def _spec(self, n):
        return kernel_from_name(self.kernel, self.alpha, self.beta, self.lam, n)


class LagrangeInterpolator(_KernelParams, RegressorMixin, BaseEstimator):
    """Interpolating regressor built on a Schoenberg matrix.

    Parameters
    ----------
    kernel : str
        ``"matern-norm"``, ``"imq"``, ``"g"``, ``"f"`` or ``"matern"``.
    alpha, beta, lam : float
        Kernel parameters; unused ones are ignored.
    reg : float
        Diagonal shift added before solving.
    """

    def __init__(self, kernel="matern-norm", alpha=1.0, beta=1.0, lam=None, reg=0.0):
        self.kernel = kernel
        self.alpha = alpha
        self.beta = beta
        self.lam = lam
        self.reg = reg

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        nodes = build_point_set(X)
        spec = self._spec(nodes.ambient_dim)
        self.nodes_ = nodes
        self.kernel_spec_ = spec
        self.basis_ = solve_lagrange(assemble(spec, nodes), self.reg)
        self.interpolant_ = make_interpolant(self.basis_, y)
        self.n_features_in_ = nodes.ambient_dim
        return self

    def predict(self, X):
        check_is_fitted(self, "interpolant_")
        X = np.asarray(X, dtype=float).reshape(-1, self.n_features_in_)
        return eval_interpolant(self.interpolant_, X)


class SchoenbergCertifier(_KernelParams, BaseEstimator):
    """Estimator wrapper around ``certify``; ``fit`` stores ``certificate_``."""

    def __init__(self, kernel="matern-norm", alpha=1.0, beta=1.0, lam=None, spectral_N=None):
        self.kernel = kernel
        self.alpha = alpha
        self.beta = beta
        self.lam = lam
        self.spectral_N = spectral_N

    def fit(self, X, y=None):
        nodes = build_point_set(np.asarray(X, dtype=float))
        self.certificate_ = certify(self._spec(nodes.ambient_dim), nodes, self.spectral_N)
        return self
