"""Radial kernel catalog on R^n.

Every kernel is a function of ``z = |x - y|`` only. Fourier transforms use
the convention ``F(xi) = int f(x) exp(-i x.xi) dx`` and are computed from
the radial profile by a one-dimensional Omega-weighted integral.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DivergenceError, DomainError
from .hstransform import hankel_integral
from .quadrature import DEFAULT_CONFIG, exp_sinh
from .specfun import beta_fn, matern, matern_norm

__all__ = [
    "KernelSpec",
    "InnerProductSpace",
    "kernel_eval",
    "radial_fourier",
    "fourier_closed_form",
    "convolution_check",
    "r3_convolution_identities",
    "rkhs_inner",
    "mapped_kernel",
    "l2_norm_sq",
    "l2_norm_sq_closed",
    "moment_integral",
    "moment_integral_quad",
    "matern_tail_mass",
    "imq_tail_mass",
    "sobolev_norm_sq",
    "complete_monotonicity_check",
    "kernel_from_name",
]

FAMILIES = ("matern", "matern_norm", "bessel_potential", "f_kernel", "f_alpha_lambda", "imq")


@dataclass(frozen=True)
class KernelSpec:
    """One member of a radial kernel family.

    Use the classmethod constructors, which validate parameters.
    ``alpha`` is the order (``beta`` for ``imq``), ``lam`` is used by
    ``f_alpha_lambda`` only, and ``n`` is the ambient dimension.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    lam: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("dimension n must be a positive integer")
        a, n = self.alpha, self.n
        ok = {
            "matern": math.isfinite(a),
            "matern_norm": a > 0,
            "bessel_potential": a > 0,
            "f_kernel": a > -n / 4,
            "f_alpha_lambda": self.lam > (n - 2) / 2 and a + self.lam + 1 > 0,
            "imq": self.beta > 0,
        }[self.family]
        if not ok:
            raise DomainError(f"parameters out of range for {self.family}: {self}")

    @classmethod
    def matern(cls, alpha, n=1):
        return cls("matern", alpha=float(alpha), n=int(n))

    @classmethod
    def matern_norm(cls, alpha, n=1):
        return cls("matern_norm", alpha=float(alpha), n=int(n))

    @classmethod
    def bessel_potential(cls, alpha, n):
        return cls("bessel_potential", alpha=float(alpha), n=int(n))

    @classmethod
    def f_kernel(cls, alpha, n):
        return cls("f_kernel", alpha=float(alpha), n=int(n))

    @classmethod
    def f_alpha_lambda(cls, alpha, lam, n):
        return cls("f_alpha_lambda", alpha=float(alpha), lam=float(lam), n=int(n))

    @classmethod
    def imq(cls, beta, n=1):
        return cls("imq", beta=float(beta), n=int(n))

    @property
    def finite_at_zero(self):
        a, n = self.alpha, self.n
        return {
            "matern": a > 0,
            "matern_norm": True,
            "bessel_potential": a > n / 2,
            "f_kernel": a > 0,
            "f_alpha_lambda": a + self.lam + 1 > n / 2,
            "imq": True,
        }[self.family]

    @property
    def normalized(self):
        return self.family in ("matern_norm", "imq")

    def describe(self):
        if self.family == "imq":
            return f"imq(beta={self.beta!r}, n={self.n})"
        if self.family == "f_alpha_lambda":
            return f"f_alpha_lambda(alpha={self.alpha!r}, lambda={self.lam!r}, n={self.n})"
        return f"{self.family}(alpha={self.alpha!r}, n={self.n})"

    def __call__(self, z):
        return kernel_eval(self, z)


def _bp_log_const(alpha, n):
    # G_alpha = c * M_{alpha - n/2}
    return -((alpha - 1 + n / 2) * math.log(2.0) + (n / 2) * math.log(math.pi)
             + math.lgamma(alpha))


def _f_alpha_lambda(alpha, lam, n, z, cfg):
    e = 2.0 * lam - n + 1.0
    log_c = -((alpha + 2 * lam) * math.log(2.0) + (n / 2) * math.log(math.pi)
              + math.lgamma(lam + 1 - n / 2) + math.lgamma(alpha + lam + 1))

    # s = sqrt(z^2 + u^2) removes the endpoint singularity
    def f(u):
        s = np.hypot(z[:, None], u)
        return u**e * matern(alpha, s)

    val, _ = exp_sinh(f, 0.0, cfg)
    return math.exp(log_c) * val


def kernel_eval(spec, z, cfg=DEFAULT_CONFIG):
    """Radial profile of ``spec`` at ``z >= 0`` (scalar or array)."""
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    scalar = np.ndim(z) == 0
    if np.any(zz < 0) or np.any(~np.isfinite(zz)):
        raise DomainError("kernel argument must be finite and >= 0")
    if np.any(zz == 0) and not spec.finite_at_zero:
        raise DomainError(f"{spec.describe()} is singular at the origin")
    fam, a, n = spec.family, spec.alpha, spec.n
    if fam == "matern":
        out = matern(a, zz)
    elif fam == "matern_norm":
        out = matern_norm(a, zz)
    elif fam == "bessel_potential":
        out = math.exp(_bp_log_const(a, n)) * matern(a - n / 2, zz)
    elif fam == "f_kernel":
        log_c = -((a + n - 1) * math.log(2.0) + (n / 2) * math.log(math.pi)
                  + math.lgamma(a + n / 2))
        out = math.exp(log_c) * matern(a, zz)
    elif fam == "f_alpha_lambda":
        out = _f_alpha_lambda(a, spec.lam, n, zz, cfg)
    else:
        out = (1.0 + zz * zz) ** -spec.beta
    out = np.asarray(out, dtype=float)
    return float(out[0]) if scalar else out


def fourier_closed_form(spec, xi):
    """Known n-dimensional Fourier transform of ``spec`` at ``|xi|``."""
    xi = np.asarray(xi, dtype=float)
    fam, a, n = spec.family, spec.alpha, spec.n
    if fam == "bessel_potential":
        return (1.0 + xi * xi) ** -a
    if fam == "f_kernel":
        return (1.0 + xi * xi) ** -(a + n / 2)
    if fam == "f_alpha_lambda":
        return (1.0 + xi * xi) ** -(a + spec.lam + 1)
    if fam == "imq":
        g = KernelSpec.bessel_potential(spec.beta, n)
        return (2 * math.pi) ** n * kernel_eval(g, xi)
    if fam in ("matern", "matern_norm"):
        # M_alpha is a multiple of G_{alpha + n/2}
        if not a > 0 and fam == "matern_norm":
            raise DomainError("alpha must be positive")
        scale = math.exp(-_bp_log_const(a + n / 2, n))
        if fam == "matern_norm":
            scale *= 2.0 ** (1 - a) / math.gamma(a)
        return scale * (1.0 + xi * xi) ** -(a + n / 2)
    raise DomainError(f"no closed form for {fam}")


def radial_fourier(spec, xi_norm, cfg=DEFAULT_CONFIG):
    """n-dimensional Fourier transform of a radial kernel at ``|xi|``.

    Evaluated as 2 pi^(n/2)/Gamma(n/2) int Omega_{(n-2)/2}(|xi| t) f(t) t^(n-1) dt.
    """
    n = spec.n
    lam = 0.5 * (n - 2)
    g = lambda t: kernel_eval(spec, t, cfg) * t ** (n - 1)
    xs = np.atleast_1d(np.asarray(xi_norm, dtype=float))
    if np.any(xs < 0):
        raise DomainError("|xi| must be nonnegative")
    c = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)
    out = np.array([c * hankel_integral(g, lam, x, cfg)[0] for x in xs])
    return float(out[0]) if np.ndim(xi_norm) == 0 else out


def _inverse_radial(profile_hat, n, z, cfg):
    lam = 0.5 * (n - 2)
    c = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2) / (2 * math.pi) ** n
    g = lambda rho: profile_hat(rho) * rho ** (n - 1)
    return c * hankel_integral(g, lam, z, cfg)[0]


def convolution_check(alpha, beta, n, x_minus_y, cfg=DEFAULT_CONFIG):
    """``|(G_alpha * G_beta)(z) - G_{alpha+beta}(z)|`` with the convolution
    computed on the Fourier side."""
    alpha, beta = float(alpha), float(beta)
    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive")
    z = float(x_minus_y)
    conv = _inverse_radial(lambda rho: (1 + rho * rho) ** -(alpha + beta), int(n), z, cfg)
    target = kernel_eval(KernelSpec.bessel_potential(alpha + beta, n), z)
    return abs(conv - target)


def r3_convolution_identities(z, cfg=DEFAULT_CONFIG):
    """The two closed-form convolutions of exponential kernels in R^3.

    Returns ``{"first": (computed, closed), "second": (computed, closed)}``
    where ``first`` is int e^{-|u-x|-|u-y|}/(|u-x||u-y|) du and ``second``
    is int e^{-|u-x|-|u-y|} du, for ``|x - y| = z``.
    """
    z = float(z)
    g2 = _inverse_radial(lambda rho: (1 + rho * rho) ** -2.0, 3, z, cfg)
    g4 = _inverse_radial(lambda rho: (1 + rho * rho) ** -4.0, 3, z, cfg)
    return {
        "first": (16 * math.pi**2 * g2, 2 * math.pi * math.exp(-z)),
        "second": (64 * math.pi**2 * g4, math.pi * math.exp(-z) * (1 + z + z * z / 3)),
    }


@dataclass(frozen=True)
class InnerProductSpace:
    """``kind`` is ``"L2"``, ``"Sobolev"`` (H^alpha) or ``"KSpace"``."""

    kind: str
    n: int
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("L2", "Sobolev", "KSpace"):
            raise DomainError(f"unknown space {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("dimension n must be a positive integer")
        if self.kind == "Sobolev" and not self.alpha > self.n / 2:
            raise DomainError("Sobolev space needs alpha > n/2 to have a reproducing kernel")
        if self.kind == "KSpace" and not self.alpha > 0:
            raise DomainError("KSpace needs alpha > 0")

    def describe(self):
        if self.kind == "L2":
            return f"L2(R^{self.n})"
        return f"{self.kind}(alpha={self.alpha!r}, n={self.n})"


def mapped_kernel(space, spec):
    """Kernel whose profile gives inner products of translates of ``spec``."""
    if spec.n != space.n:
        raise DomainError("kernel and space dimensions differ")
    n = spec.n
    if space.kind == "L2":
        if spec.family == "bessel_potential":
            if not spec.alpha > n / 4:
                raise DomainError("G_alpha is square integrable only for alpha > n/4")
            return KernelSpec.bessel_potential(2 * spec.alpha, n)
        if spec.family == "f_kernel":
            return KernelSpec.f_kernel(2 * spec.alpha + n / 2, n)
        raise DomainError("L2 Gramians are available for G_alpha and F_alpha")
    if space.kind == "Sobolev":
        if spec.family != "bessel_potential" or spec.alpha != space.alpha:
            raise DomainError("H^alpha translates must be of G_alpha with the same alpha")
        return spec
    if spec.family != "imq" or not math.isclose(spec.beta, space.alpha + n / 2):
        raise DomainError("KSpace(alpha) translates must be of imq(alpha + n/2)")
    return spec


def rkhs_inner(space, spec, x, y, cfg=DEFAULT_CONFIG):
    """Inner product in ``space`` of the translates of ``spec`` by ``x`` and ``y``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != (space.n,) or y.shape != (space.n,):
        raise DomainError("points must have the space's dimension")
    return kernel_eval(mapped_kernel(space, spec), float(np.linalg.norm(x - y)), cfg)


def l2_norm_sq_closed(alpha, lam):
    alpha, lam = float(alpha), float(lam)
    if not (lam > -1 and 2 * alpha + lam + 1 > 0):
        raise DomainError("need lambda > -1 and 2 alpha + lambda + 1 > 0")
    return math.exp(0.5 * math.log(math.pi) + math.lgamma(alpha + lam + 1)
                    + math.lgamma(2 * alpha + lam + 1) + math.lgamma(lam + 1)
                    - math.log(4.0) - math.lgamma(alpha + lam + 1.5))


def l2_norm_sq(alpha, lam, cfg=DEFAULT_CONFIG):
    """``int (K_alpha(t) t^alpha)^2 t^(2 lam + 1) dt`` by quadrature."""
    l2_norm_sq_closed(alpha, lam)
    p = 2.0 * float(lam) + 1.0
    return hankel_integral(lambda t: matern(alpha, t) ** 2 * t**p, 0.0, 0.0, cfg)[0]


def moment_integral(alpha, beta):
    """``int K_alpha(t) t^(beta-1) dt`` in closed form."""
    alpha, beta = float(alpha), float(beta)
    if not beta > abs(alpha):
        raise DomainError("moment integral diverges unless beta > |alpha|")
    return math.exp((beta - 2) * math.log(2.0) + math.lgamma(0.5 * (beta + alpha))
                    + math.lgamma(0.5 * (beta - alpha)))


def moment_integral_quad(alpha, beta, cfg=DEFAULT_CONFIG):
    alpha, beta = float(alpha), float(beta)
    if not beta > abs(alpha):
        raise DomainError("moment integral diverges unless beta > |alpha|")
    a = abs(alpha)
    f = lambda t: matern(a, t) * t ** (beta - 1.0 - a)
    return hankel_integral(f, 0.0, 0.0, cfg)[0]


def matern_tail_mass(alpha, d):
    """``int normalized_matern_alpha(t) t^(d-1) dt``."""
    alpha = float(alpha)
    return math.exp((d - 1) * math.log(2.0) + math.lgamma(alpha + d / 2)
                    + math.lgamma(d / 2) - math.lgamma(alpha))


def imq_tail_mass(beta, d):
    """``int (1+t^2)^(-beta) t^(d-1) dt``, finite for beta > d/2."""
    beta = float(beta)
    if not beta > d / 2:
        raise DivergenceError("imq tail mass diverges unless beta > d/2")
    return 0.5 * beta_fn(beta - d / 2, d / 2)


def sobolev_norm_sq(beta, alpha, n, cfg=DEFAULT_CONFIG):
    """Squared H^alpha norm of G_beta on R^n by radial quadrature in xi.

    Raises DivergenceError when the integral does not settle.
    """
    s = 2 * float(beta) - float(alpha)
    c = 2.0 * math.pi ** (n / 2) / math.gamma(n / 2) / (2 * math.pi) ** n
    try:
        val = hankel_integral(lambda r: (1 + r * r) ** -s * r ** (n - 1), 0.0, 0.0, cfg)[0]
    except AccuracyError as exc:
        raise DivergenceError("G_beta is not in H^alpha") from exc
    return c * val


def complete_monotonicity_check(alpha, grid, max_order=4):
    """Signed finite differences of t -> normalized_matern_alpha(sqrt t).

    Returns the smallest value of (-1)^k Delta^k over orders k <= max_order;
    it is nonnegative for a completely monotone function.
    """
    t = np.asarray(grid, dtype=float)
    h = np.diff(t)
    if np.any(h <= 0) or not np.allclose(h, h[0]):
        raise DomainError("grid must be equally spaced and increasing")
    vals = matern_norm(alpha, np.sqrt(t))
    worst = np.inf
    diff = vals
    for k in range(max_order + 1):
        worst = min(worst, float(np.min((-1) ** k * diff)))
        diff = np.diff(diff)
    return worst


_CLI_NAMES = {
    "matern": "matern",
    "matern-norm": "matern_norm",
    "matern_norm": "matern_norm",
    "g": "bessel_potential",
    "bessel_potential": "bessel_potential",
    "f": "f_kernel",
    "f_kernel": "f_kernel",
    "f-alpha-lambda": "f_alpha_lambda",
    "f_alpha_lambda": "f_alpha_lambda",
    "imq": "imq",
}


def kernel_from_name(name, alpha=None, beta=None, lam=None, n=1):
    """Build a KernelSpec from a short family name and loose parameters."""
    fam = _CLI_NAMES.get(name)
    if fam is None:
        raise DomainError(f"unknown kernel {name!r}")
    if fam == "imq":
        if beta is None:
            raise DomainError("imq needs beta")
        return KernelSpec.imq(beta, n)
    if alpha is None:
        raise DomainError(f"{name} needs alpha")
    if fam == "f_alpha_lambda":
        if lam is None:
            raise DomainError("f_alpha_lambda needs lambda")
        return KernelSpec.f_alpha_lambda(alpha, lam, n)
    return getattr(KernelSpec, fam)(float(alpha), int(n))
