"""Point sets, Schoenberg matrices and operator certificates."""
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist, squareform

from .errors import DomainError, PointSetError, PreconditionError
from .hstransform import hankel_integral
from .kernels import (KernelSpec, imq_tail_mass, kernel_eval,
                      mapped_kernel, matern_tail_mass)
from .quadrature import DEFAULT_CONFIG

__all__ = [
    "PointSet",
    "SchoenbergMatrixView",
    "OperatorCertificate",
    "build_point_set",
    "assemble",
    "normalize_kernel",
    "norm_bound",
    "invertibility_threshold",
    "certify",
    "gramian_of_translates",
    "riesz_certificate",
    "shell_counts",
    "project_to_span",
    "extreme_eigenvalues",
]

DENSE_LIMIT = 512


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    ambient_dim: int
    separation: float
    effective_dim: int
    closest_pair: tuple

    @property
    def size(self):
        return self.points.shape[0]

    def scaled(self, c):
        return build_point_set(self.points * float(c))

    def subset(self, count):
        return build_point_set(self.points[:count])


def build_point_set(coords, rank_tol=1e-10):
    """Validate ``coords`` (N x n, or a flat list for n = 1) into a PointSet.

    Duplicate points raise PointSetError carrying the offending index pair.
    """
    pts = np.asarray(coords, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
        raise PointSetError("need at least two points given as an N x n array")
    if not np.all(np.isfinite(pts)):
        raise PointSetError("coordinates must be finite")
    dist, idx = cKDTree(pts).query(pts, k=2)
    nearest = dist[:, 1]
    j = int(np.argmin(nearest))
    pair = tuple(sorted((j, int(idx[j, 1]))))
    if nearest[j] == 0.0:
        dup = np.flatnonzero(nearest == 0.0)
        others = [k for k in dup if k != j and np.array_equal(pts[k], pts[j])]
        pair = (int(min(j, others[0])), int(max(j, others[0]))) if others else pair
        raise PointSetError(f"duplicate points at indices {pair[0]} and {pair[1]}", pair=pair)
    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    d = int(np.sum(sv >= rank_tol * sv[0]))
    return PointSet(_frozen(pts), pts.shape[1], float(nearest[j]), max(d, 1), pair)


def project_to_span(X, rank_tol=1e-10):
    """Coordinates of X in an orthonormal basis of its affine span."""
    centered = X.points - X.points.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    d = int(np.sum(sv >= rank_tol * sv[0]))
    return centered @ vt[:d].T


@dataclass(frozen=True)
class SchoenbergMatrixView:
    kernel: object
    source: PointSet
    entries: np.ndarray
    label: str = ""

    @property
    def size(self):
        return self.entries.shape[0]


def _profile(kernel):
    if isinstance(kernel, KernelSpec):
        return lambda z: kernel_eval(kernel, z)
    if callable(kernel):
        return lambda z: np.asarray(kernel(np.asarray(z, dtype=float)), dtype=float)
    raise DomainError("kernel must be a KernelSpec or a callable radial profile")


def assemble(kernel, X, label=""):
    """Schoenberg matrix ``[phi(|x_j - x_k|)]`` of a kernel on X."""
    if isinstance(kernel, KernelSpec) and not kernel.finite_at_zero:
        raise DomainError(f"{kernel.describe()} is singular at the origin")
    f = _profile(kernel)
    diag = float(f(np.zeros(1))[0])
    if not math.isfinite(diag):
        raise DomainError("kernel is not finite at the origin")
    S = squareform(f(pdist(X.points)))
    np.fill_diagonal(S, diag)
    if not label:
        label = kernel.describe() if isinstance(kernel, KernelSpec) else "profile"
    return SchoenbergMatrixView(kernel, X, _frozen(S), label)


# ----------------------------------------------------------------------
# analytic bounds
# ----------------------------------------------------------------------

def normalize_kernel(spec):
    """``(normalized spec, value at 0)`` for kernels finite at the origin.

    Matérn-type kernels normalize to a normalized Matérn function, whose
    order is read off from the profile.
    """
    if not spec.finite_at_zero:
        raise DomainError(f"{spec.describe()} is singular at the origin")
    fam, a, n = spec.family, spec.alpha, spec.n
    if fam in ("matern_norm", "imq"):
        return spec, 1.0
    order = {
        "matern": a,
        "bessel_potential": a - n / 2,
        "f_kernel": a,
        "f_alpha_lambda": a + spec.lam + 1 - n / 2,
    }[fam]
    return KernelSpec.matern_norm(order, n), float(kernel_eval(spec, 0.0))


def _check_profile(f):
    t = np.concatenate([[0.0], np.geomspace(1e-6, 1e4, 400)])
    v = np.asarray(f(t), dtype=float)
    if not abs(v[0] - 1.0) <= 1e-12:
        raise PreconditionError("profile must equal 1 at the origin")
    if np.any(v < 0) or np.any(~np.isfinite(v)):
        raise PreconditionError("profile must be finite and nonnegative")
    if np.any(np.diff(v) > 1e-14):
        raise PreconditionError("profile must be monotone decreasing")


def _tail_integral(profile, d, cfg):
    """``int f(t) t^(d-1) dt`` (closed form for cataloged kernels)."""
    if isinstance(profile, KernelSpec):
        spec, _ = normalize_kernel(profile)
        if spec.family == "imq":
            return imq_tail_mass(spec.beta, d)
        return matern_tail_mass(spec.alpha, d)
    _check_profile(profile)
    return hankel_integral(lambda t: profile(t) * t ** (d - 1), 0.0, 0.0, cfg)[0]


def _check_d(d):
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    return int(d)


def norm_bound(profile, d, delta, cfg=DEFAULT_CONFIG):
    """Schur-test bound 1 + d (5^d - 1) / delta^d * int f(t) t^(d-1) dt."""
    d = _check_d(d)
    if not delta > 0:
        raise DomainError("separation must be positive")
    if math.isinf(delta):
        return 1.0
    return 1.0 + d * (5.0**d - 1.0) * _tail_integral(profile, d, cfg) / delta**d


def invertibility_threshold(profile, d, cfg=DEFAULT_CONFIG):
    """Separation beyond which the norm bound forces invertibility."""
    d = _check_d(d)
    return (d * (5.0**d - 1.0) * _tail_integral(profile, d, cfg)) ** (1.0 / d)


# ----------------------------------------------------------------------
# certificates
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorCertificate:
    norm_bound: float
    invertibility_threshold: float
    delta_observed: float
    decision: str
    spectral_evidence: tuple
    basis_for_decision: str
    d: int
    n: int
    kernel: str
    space: str = ""
    scale: float = 1.0

    @property
    def schur_lower_bound(self):
        """2 - bound, a lower bound for the smallest eigenvalue when positive."""
        return 2.0 - self.norm_bound

    def to_dict(self):
        out = {
            "delta": self.delta_observed,
            "d": self.d,
            "norm_bound": self.norm_bound,
            "threshold": self.invertibility_threshold,
            "decision": self.decision,
            "lambda_min": self.spectral_evidence[0],
            "lambda_max": self.spectral_evidence[1],
            "rule": self.basis_for_decision,
            "n": self.n,
            "kernel": self.kernel,
        }
        if self.space:
            out["space"] = self.space
        if self.scale != 1.0:
            out["scale"] = self.scale
        return out


def extreme_eigenvalues(S, tol=1e-10):
    """``(lambda_min, lambda_max)`` of a symmetric matrix."""
    S = np.asarray(S, dtype=float)
    N = S.shape[0]
    if N <= DENSE_LIMIT:
        w = eigh(S, eigvals_only=True)
        return float(w[0]), float(w[-1])
    lo = eigsh(S, k=1, which="SA", tol=tol, return_eigenvectors=False)[0]
    hi = eigsh(S, k=1, which="LA", tol=tol, return_eigenvectors=False)[0]
    return float(lo), float(hi)


def _has_laplace_rule(spec, d):
    # Gaussian mixtures with a Lebesgue-equivalent mixing density; the
    # mixing density must also have a finite t^(-d/2) moment
    if spec.family == "matern_norm":
        return True
    return spec.family == "imq" and spec.beta > d / 2


def certify(kernel, X, spectral_N=None, cfg=DEFAULT_CONFIG, *, space=""):
    """Analytic boundedness/invertibility decision plus truncated spectrum.

    Decisions: ``bounded_invertible`` (n >= 2 rule or separation rule),
    ``bounded_only`` (norm bound holds, invertibility not established) and
    ``inconclusive`` (no bound applies).
    """
    n, d, delta = X.ambient_dim, X.effective_dim, X.separation
    if isinstance(kernel, KernelSpec):
        spec, scale = normalize_kernel(kernel)
        label = kernel.describe()
        profile = spec
    else:
        spec, scale, label, profile = None, 1.0, "profile", kernel
    try:
        bound = norm_bound(profile, d, delta, cfg)
        threshold = invertibility_threshold(profile, d, cfg)
    except (ArithmeticError, PreconditionError) as exc:
        bound, threshold = math.inf, math.inf
        rule_note = f"no norm bound: {exc}"
    else:
        rule_note = ""
    if spec is not None and n >= 2 and _has_laplace_rule(spec, d) and math.isfinite(bound):
        decision, rule = "bounded_invertible", "laplace-mixture rule (n>=2)"
    elif math.isfinite(threshold) and delta > threshold:
        decision, rule = "bounded_invertible", "separation rule (delta > threshold)"
    elif math.isfinite(bound):
        decision, rule = "bounded_only", "norm bound only"
    else:
        decision, rule = "inconclusive", rule_note
    m = X.size if spectral_N is None else min(int(spectral_N), X.size)
    if m >= 2:
        sub = X.subset(m)
        S = assemble(spec if spec is not None else kernel, sub).entries
        evidence = extreme_eigenvalues(S)
    else:
        evidence = (1.0, 1.0)
    return OperatorCertificate(float(bound), float(threshold), float(delta), decision,
                               evidence, rule, d, n, label, space, float(scale))


def gramian_of_translates(space, spec, X):
    """Gramian of the translates ``spec(. - x_j)`` in ``space``."""
    if X.ambient_dim != space.n:
        raise DomainError("point set and space dimensions differ")
    mapped = mapped_kernel(space, spec)
    return assemble(mapped, X, label=f"Gram in {space.describe()} of {spec.describe()}")


def riesz_certificate(space, spec, X, spectral_N=None, cfg=DEFAULT_CONFIG):
    """Riesz-sequence status of the translates, via the mapped kernel."""
    if X.ambient_dim != space.n:
        raise DomainError("point set and space dimensions differ")
    mapped = mapped_kernel(space, spec)
    return certify(mapped, X, spectral_N, cfg, space=space.describe())


def shell_counts(X, j, delta=None, m_max=None):
    """Number of points of X in the shells [m delta, (m+1) delta) around x_j.

    Returns ``(counts, bounds)`` for m = 1..m_max with the geometric bound
    (5^d - 1) m^(d-1).
    """
    delta = X.separation if delta is None else float(delta)
    dist = np.linalg.norm(X.points - X.points[j], axis=1)
    dist = np.delete(dist, j)
    shells = np.floor(dist / delta).astype(int)
    if m_max is None:
        m_max = int(shells.max())
    m = np.arange(1, m_max + 1)
    counts = np.array([(shells == k).sum() for k in m])
    d = X.effective_dim
    return counts, (5**d - 1) * m.astype(float) ** (d - 1)
