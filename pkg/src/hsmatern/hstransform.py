"""Hankel-Schoenberg transforms of radial measures on [0, inf).

A measure is an optional point mass at the origin plus a density. The
transform of order ``lam`` is

    phi(r) = atom + int_0^inf Omega_lam(r t) p(t) dt .

Oscillatory integrals are split at the zeros of Omega_lam (and at dyadic
points, so that scale changes in the density are resolved) and the
alternating partial sums are accelerated with Wynn's epsilon algorithm.
"""
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_jacobi

from .errors import AccuracyError, DivergenceError, DomainError
from .quadrature import DEFAULT_CONFIG, exp_sinh, tanh_sinh, wynn_epsilon
from .specfun import beta_fn, matern, omega, omega_zeros

__all__ = [
    "RadialDensity",
    "TransformResult",
    "hankel_integral",
    "hs_forward",
    "hs_inverse",
    "parseval_residual",
    "order_lower",
    "omega_self_consistency",
    "order_lowering_moment",
    "laplace_density",
    "beta_type_density",
    "k_power_density",
    "binomial_density",
    "dirac",
]

_GEO_START = -8  # first dyadic breakpoint is 2**-8
_ZERO_CHUNK = 64


@dataclass(frozen=True)
class RadialDensity:
    """Positive measure ``atom_at_zero * delta_0 + density(t) dt`` on [0, inf).

    ``density`` must accept a 1-D array of positive abscissae. ``support``
    narrows the integration range when the density vanishes outside it.
    ``moment_hint`` is free-form metadata such as ``("power", 3.0)`` or
    ``("exp", 1.0)`` describing the decay at infinity.
    """

    density: Optional[Callable] = None
    atom_at_zero: float = 0.0
    support: tuple = (0.0, math.inf)
    moment_hint: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        if not self.atom_at_zero >= 0:
            raise DomainError("atom_at_zero must be nonnegative")
        lo, hi = self.support
        if not (0.0 <= lo < hi):
            raise DomainError("support must satisfy 0 <= lo < hi")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.density is None:
            return np.zeros_like(t)
        lo, hi = self.support
        inside = (t >= lo) & (t <= hi)
        out = np.zeros(t.shape)
        if np.any(inside):
            out[inside] = self.density(t[inside])
        return out

    def mass(self, cfg=DEFAULT_CONFIG):
        """Total mass; raises DivergenceError when the tail does not settle."""
        if self.density is None:
            return self.atom_at_zero
        try:
            value, _, _ = hankel_integral(self, 0.0, 0.0, cfg, support=self.support)
        except AccuracyError as exc:
            raise DivergenceError(f"total mass of {self.label or 'density'} "
                                  f"does not converge") from exc
        return self.atom_at_zero + value


@dataclass(frozen=True)
class TransformResult:
    values: tuple
    est_error: float
    panels_used: int

    @property
    def r(self):
        return np.array([v[0] for v in self.values])

    @property
    def phi(self):
        return np.array([v[1] for v in self.values])


# ----------------------------------------------------------------------
# oscillatory engine
# ----------------------------------------------------------------------

def _breakpoints(lam, r, lo, hi, cfg):
    """Yield ``(t, zero_index or None)`` in increasing order on (lo, hi]."""
    oscillate = r > 0 and cfg.oscillatory_mode == "zero-splitting"
    zeros = np.empty(0)
    k = 0
    m = _GEO_START
    while 2.0**m <= lo:
        m += 1
    hi_eff = min(hi, cfg.tail_cut)
    while True:
        geo = 2.0**m
        if oscillate:
            if k >= len(zeros):
                zeros = omega_zeros(lam, max(_ZERO_CHUNK, 2 * len(zeros))) / r
            while k < len(zeros) and zeros[k] <= lo:
                k += 1
            zk = zeros[k]
        else:
            zk = math.inf
        nxt = min(geo, zk)
        if nxt >= hi_eff:
            yield hi_eff, None
            return
        if zk <= geo:
            yield zk, k
            k += 1
            if geo - zk <= 1e-12 * geo:
                m += 1
        else:
            yield geo, None
            m += 1


def hankel_integral(g, lam, r, cfg=DEFAULT_CONFIG, support=(0.0, math.inf)):
    """``int Omega_lam(r t) g(t) dt`` over ``support``.

    Returns ``(value, est_error, pieces)``. ``g`` is vectorized over ``t``.
    With ``r == 0`` this is a plain semi-infinite integral.
    """
    r = abs(float(r))
    lo, hi = float(support[0]), float(support[1])
    if r > 0:
        integrand = lambda t: omega(lam, r * t) * g(t)
    else:
        integrand = g

    total = 0.0
    quad_err = 0.0
    pieces = 0
    small_run = 0
    peak_c, t_peak = 0.0, lo
    sums, wynn = [], []
    left = lo
    for right, zero_idx in _breakpoints(lam, r, lo, hi, cfg):
        c, e = tanh_sinh(integrand, left, right, cfg)
        total += c
        quad_err += e
        pieces += 1
        if abs(c) > peak_c:
            peak_c, t_peak = abs(c), right
        tol = cfg.tolerance(total)
        past_bulk = right >= 2.0 * t_peak and total != 0.0
        small_run = small_run + 1 if abs(c) <= 1e-2 * tol else 0
        if small_run >= 3 and past_bulk:
            return total, quad_err + 3 * abs(c), pieces
        if right >= hi:
            return total, quad_err, pieces
        if right >= cfg.tail_cut:
            if small_run >= 3 or (total == 0.0 and peak_c == 0.0):
                return total, quad_err, pieces
            raise AccuracyError("integral not settled at tail_cut",
                                partial=total, est_error=abs(c))
        if zero_idx is not None or (r == 0 and right >= 1.0):
            # alternating sums at zeros; nearly geometric dyadic sums otherwise
            sums.append(total)
            if len(sums) >= 8:
                wynn.append(wynn_epsilon(sums[-40:]))
                if len(wynn) >= 3 and (past_bulk or r == 0 and total != 0.0):
                    d1 = abs(wynn[-1] - wynn[-2])
                    d2 = abs(wynn[-2] - wynn[-3])
                    if max(d1, d2) <= cfg.tolerance(wynn[-1]):
                        return wynn[-1], quad_err + max(d1, d2), pieces
            if len(sums) > cfg.max_panels:
                best = wynn[-1] if wynn else total
                raise AccuracyError(f"oscillatory integral needs more than "
                                    f"{cfg.max_panels} panels",
                                    partial=best, est_error=abs(c))
        elif pieces > cfg.max_panels + 200:
            raise AccuracyError("too many quadrature pieces", partial=total,
                                est_error=abs(c))
        left = right
    raise AssertionError("unreachable")


# ----------------------------------------------------------------------
# forward, inverse, Parseval
# ----------------------------------------------------------------------

def _check_lambda(lam, lowest=-1.0, strict=True):
    lam = float(lam)
    ok = lam > lowest if strict else lam >= lowest
    if not ok:
        raise DomainError(f"order lambda={lam} out of range")
    return lam


def _grid(grid):
    pts = np.atleast_1d(np.asarray(grid, dtype=float))
    if pts.ndim != 1 or np.any(pts < 0) or np.any(~np.isfinite(pts)):
        raise DomainError("grid must be a 1-D array of finite nonnegative values")
    if np.any(np.diff(pts) <= 0):
        raise DomainError("grid must be strictly increasing")
    return pts


def hs_forward(nu, lam, grid, cfg=DEFAULT_CONFIG):
    """Transform of order ``lam`` of the measure ``nu`` on ``grid``."""
    lam = _check_lambda(lam)
    pts = _grid(grid)
    nu.mass(cfg)
    values, err, panels = [], 0.0, 0
    for r in pts:
        if nu.density is None:
            v, e, p = 0.0, 0.0, 0
        else:
            v, e, p = hankel_integral(nu, lam, r, cfg, support=nu.support)
        values.append((float(r), float(nu.atom_at_zero + v)))
        err = max(err, e)
        panels += p
    return TransformResult(tuple(values), float(err), int(panels))


def hs_inverse(phi, lam, t_grid, cfg=DEFAULT_CONFIG):
    """Density ``f`` whose order-``lam`` transform is ``phi``, on ``t_grid``.

    ``phi`` is vectorized over ``r``. Points must be positive; the origin is
    excluded because the recovered density may vanish or blow up there.
    """
    lam = _check_lambda(lam, -0.5, strict=False)
    pts = _grid(t_grid)
    if np.any(pts == 0):
        raise DomainError("inversion grid must exclude t = 0")
    p = 2.0 * lam + 1.0
    g = lambda r: phi(r) * r**p
    log_c = -lam * math.log(4.0) - 2.0 * math.lgamma(lam + 1.0)
    values, err, panels = [], 0.0, 0
    for t in pts:
        v, e, n = hankel_integral(g, lam, t, cfg)
        scale = math.exp(log_c) * t**p
        values.append((float(t), float(scale * v)))
        err = max(err, scale * e)
        panels += n
    return TransformResult(tuple(values), float(err), int(panels))


def _outer_nodes(lam, a, order=24):
    """Nodes/weights on [0, a] for ``int_0^a h(r) r**(2 lam + 1) dr``."""
    x, w = roots_jacobi(order, 0.0, 2.0 * lam + 1.0)
    r = 0.5 * a * (1.0 + x)
    return r, w * (0.5 * a) ** (2.0 * lam + 2.0)


def _profile(f, lam, cfg):
    p = 2.0 * lam + 1.0
    g = lambda t: f(t) * t**p
    cache = {}

    def phi(r):
        key = float(r)
        if key not in cache:
            cache[key] = hankel_integral(g, lam, key, cfg)[0]
        return cache[key]

    return phi


def parseval_residual(f1, f2, lam, cfg=DEFAULT_CONFIG, *, return_sides=False):
    """Relative gap between the two sides of Parseval's relation.

    ``f1`` and ``f2`` are functions of ``t``; their transforms are taken with
    the weight ``t**(2 lam + 1)``. With ``return_sides`` the tuple
    ``(residual, lhs, rhs)`` is returned. The right-hand side nests one
    transform inside another integral, so its relative tolerance is capped
    at 1e-10.
    """
    lam = _check_lambda(lam)
    p = 2.0 * lam + 1.0
    try:
        lhs, _, _ = hankel_integral(lambda t: f1(t) * f2(t) * t**p, lam, 0.0, cfg)
    except AccuracyError as exc:
        raise DivergenceError("left-hand side of Parseval does not converge") from exc
    for f in (f1, f2):
        if hankel_integral(lambda t: np.abs(f(t)) * t**p, lam, 0.0, cfg)[0] == 0.0:
            return (0.0, 0.0, 0.0) if return_sides else 0.0
    pcfg = replace(cfg, rel_tol=max(cfg.rel_tol, 1e-10))
    phi1 = _profile(f1, lam, pcfg)
    phi2 = phi1 if f2 is f1 else _profile(f2, lam, pcfg)

    def h(r):
        return np.array([phi1(x) * phi2(x) for x in r])

    # Gauss-Jacobi on [0, 2**-4], Gauss-Legendre on dyadic pieces beyond;
    # the algebraic tail is extrapolated from the dyadic partial sums
    a = 2.0**-4
    r, w = _outer_nodes(lam, a)
    rhs = float(np.dot(w, h(r)))
    xg, wg = np.polynomial.legendre.leggauss(20)
    sums, est = [], []
    for _ in range(60):
        b = 2.0 * a
        rr = a + 0.5 * (b - a) * (1.0 + xg)
        rhs += 0.5 * (b - a) * float(np.dot(wg, h(rr) * rr**p))
        a = b
        if a < 1.0:
            continue
        sums.append(rhs)
        if rhs == 0.0 and lhs == 0.0 and a >= 16.0:
            break
        if len(sums) >= 4:
            est.append(wynn_epsilon(sums[-12:]))
            if len(est) >= 3 and max(abs(est[-1] - est[-2]),
                                     abs(est[-2] - est[-3])) <= pcfg.tolerance(est[-1]):
                rhs = est[-1]
                break
    else:
        raise DivergenceError("right-hand side of Parseval does not converge")
    rhs *= math.exp(-lam * math.log(4.0) - 2.0 * math.lgamma(lam + 1.0))
    scale = max(abs(lhs), abs(rhs))
    res = 0.0 if scale == 0.0 else abs(lhs - rhs) / scale
    return (res, lhs, rhs) if return_sides else res


# ----------------------------------------------------------------------
# order changes
# ----------------------------------------------------------------------

def order_lower(nu, lam, n, cfg=DEFAULT_CONFIG):
    """Measure ``mu`` with ``hs_forward(mu, (n-2)/2) == hs_forward(nu, lam)``.

    ``mu`` has the same atom at the origin as ``nu`` and the density
    ``c * int_{s>t} (1 - t^2/s^2)^(lam - n/2) s^-n (t^(n-1)) p(s) ds``.
    """
    lam = float(lam)
    n = int(n)
    if n < 1:
        raise DomainError("n must be a positive integer")
    if not lam > 0.5 * (n - 2):
        raise DomainError("order_lower needs lambda > (n-2)/2")
    if nu.density is None:
        raise DomainError("measure is concentrated at zero")
    e = lam - 0.5 * n
    c = 2.0 / beta_fn(0.5 * n, lam + 1.0 - 0.5 * n)
    lo, hi = nu.support

    def unbounded(t):
        # s = t (1 + y)
        def f(y):
            s = t[:, None] * (1.0 + y)
            return (y * (2.0 + y) / (1.0 + y) ** 2) ** e * (1.0 + y) ** -n * nu(s)

        return exp_sinh(f, 0.0, cfg)[0]

    def bounded(t):
        start = np.maximum(t, lo)
        width = hi - start

        def f(u, ul, ur):
            s = start[:, None] + width[:, None] * u
            gap = (start - t)[:, None] + width[:, None] * ul
            w = (gap * (s + t[:, None]) / s**2) ** e * s**-n * nu(s)
            return w * width[:, None] * t[:, None] ** (n - 1)

        return tanh_sinh(f, 0.0, 1.0, cfg, offsets=True)[0]

    def density(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        live = t < hi
        if np.any(live):
            tl = t[live]
            out[live] = c * (unbounded(tl) if math.isinf(hi) else bounded(tl))
        return out

    return RadialDensity(density, nu.atom_at_zero, (0.0, hi), nu.moment_hint,
                         f"order_lower({nu.label}, {lam}, {n})")


def omega_self_consistency(lam, rho, r, cfg=DEFAULT_CONFIG):
    """``|Omega_lam(r) - E[Omega_rho(r T)]|`` for the Beta-type law of T."""
    lam, rho = float(lam), float(rho)
    if not lam > rho > -1:
        raise DomainError("need lam > rho > -1")
    c = 2.0 / beta_fn(rho + 1.0, lam - rho)
    f = lambda t, tl, tr: (omega(rho, r * t) * (tr * (1.0 + t)) ** (lam - rho - 1.0)
                           * t ** (2.0 * rho + 1.0))
    avg, _ = tanh_sinh(f, 0.0, 1.0, cfg, offsets=True)
    return abs(omega(lam, r) - c * avg)


def order_lowering_moment(lam, rho, k, cfg=DEFAULT_CONFIG):
    """Even moment ``int t^(2k)`` of the Beta-type law; returns (quad, closed)."""
    lam, rho = float(lam), float(rho)
    if not lam > rho > -1:
        raise DomainError("need lam > rho > -1")
    c = 2.0 / beta_fn(rho + 1.0, lam - rho)
    f = lambda t, tl, tr: ((tr * (1.0 + t)) ** (lam - rho - 1.0)
                           * t ** (2.0 * rho + 1.0 + 2 * k))
    quad = c * tanh_sinh(f, 0.0, 1.0, cfg, offsets=True)[0]
    closed = math.exp(math.lgamma(k + rho + 1) + math.lgamma(lam + 1)
                      - math.lgamma(rho + 1) - math.lgamma(k + lam + 1))
    return quad, closed


# ----------------------------------------------------------------------
# catalog
# ----------------------------------------------------------------------

def dirac(mass=1.0):
    return RadialDensity(None, float(mass), label="dirac")


def _positive_alpha(alpha):
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return alpha


def _f_alpha(alpha):
    log_c = -alpha * math.log(4.0) - math.lgamma(alpha)

    def f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.exp(log_c - 0.25 / t - (alpha + 1.0) * np.log(t))
        return np.where(t > 0, out, 0.0)

    return f


@lru_cache(maxsize=256)
def _g_alpha_values(alpha, key):
    u = np.frombuffer(key, dtype=float)
    log_c = -(2.0 * alpha + 1.0) * math.log(2.0) - 0.5 * math.log(math.pi) - math.lgamma(alpha)

    def inner(t):
        return np.exp(-0.25 / t - t * t / (4.0 * u[:, None]) - alpha * np.log(t))

    val, _ = exp_sinh(inner, 0.0)
    out = np.exp(log_c - 1.5 * np.log(u)) * val
    out.setflags(write=False)
    return out


def _g_alpha(alpha):
    def g(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros(u.shape)
        pos = u > 0
        if np.any(pos):
            out[pos] = _g_alpha_values(alpha, np.ascontiguousarray(u[pos]).tobytes())
        return out

    return g


def laplace_density(kind, alpha):
    """Probability densities behind the Laplace-type representation.

    ``"f_alpha"``: int e^{-z^2 t} f_alpha(t) dt is the normalized Matérn
    function at z. ``"g_alpha"``: int e^{-z^2 u} g_alpha(u) du is the
    normalized Matérn function at sqrt(z).
    """
    alpha = _positive_alpha(alpha)
    if kind == "f_alpha":
        return RadialDensity(_f_alpha(alpha), moment_hint=("power", alpha + 1.0),
                             label=f"f_{alpha}")
    if kind == "g_alpha":
        return RadialDensity(_g_alpha(alpha), moment_hint=("power", 1.5),
                             label=f"g_{alpha}")
    raise DomainError(f"unknown Laplace density {kind!r}")


def beta_type_density(alpha, lam):
    """Probability density 2/B(alpha, lam+1) (1+t^2)^(-alpha-lam-1) t^(2 lam+1).

    Its transform of order ``lam`` is the normalized Matérn function.
    """
    alpha = _positive_alpha(alpha)
    lam = _check_lambda(lam)
    log_c = math.log(2.0) - math.log(beta_fn(alpha, lam + 1.0))

    def p(t):
        return np.exp(log_c - (alpha + lam + 1.0) * np.log1p(t * t)
                      + (2.0 * lam + 1.0) * np.log(t))

    return RadialDensity(p, moment_hint=("power", 2.0 * alpha + 1.0),
                         label=f"nu_{alpha},{lam}")


def k_power_density(alpha, beta):
    """Probability density K_alpha(t) t^(beta-1) / (2^(beta-2) G((b+a)/2) G((b-a)/2)).

    Its transform of order ``lam`` is 2F1((b-a)/2, (b+a)/2; lam+1; -r^2).
    """
    alpha, beta = float(alpha), float(beta)
    if not beta > abs(alpha):
        raise DomainError("need beta > |alpha|")
    log_c = -((beta - 2.0) * math.log(2.0) + math.lgamma(0.5 * (beta + alpha))
              + math.lgamma(0.5 * (beta - alpha)))
    a = abs(alpha)

    def p(t):
        return math.exp(log_c) * matern(a, t) * t ** (beta - 1.0 - a)

    return RadialDensity(p, moment_hint=("exp", 1.0), label=f"K_{alpha}t^{beta - 1}")


def binomial_density(alpha, lam):
    """Density whose order-``lam`` transform is (1+r^2)^(-alpha-lam-1)."""
    return k_power_density(alpha, float(alpha) + 2.0 * float(lam) + 2.0)
