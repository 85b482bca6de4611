"""Special functions: Gamma family, 2F1 on the negative axis, K_alpha,
Matérn functions and the normalized Bessel kernels Omega_lambda.

K_alpha is evaluated along four independent routes so each can be checked
against the others:

* ``"series"``    -- ascending series of I_{-alpha} - I_alpha (non-integer order)
* ``"integer"``   -- logarithmic ascending series for integer order, with a
                     first-order correction in the order offset
* ``"schlafli"``  -- trapezoidal rule on the cosh-form integral, which is
                     exponentially convergent on the whole real line
* ``"asymptotic"``-- Hankel's large-argument expansion

Everything here is a pure function of its arguments.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, jv

from .errors import AccuracyError, BesselOverflowWarning, DomainError

__all__ = [
    "SeriesPolicy",
    "gamma_fn",
    "beta_fn",
    "pochhammer",
    "hyp2f1",
    "bessel_k",
    "matern",
    "matern_norm",
    "omega",
    "omega_zeros",
    "matern_derivative_check",
    "half_integer_matern",
]

EULER_GAMMA = 0.57721566490153286061
SERIES_RADIUS = 2.0


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation controls for the ascending series."""

    rel_tol: float = 1e-17
    max_terms: int = 20000
    near_integer_eps: float = 1e-6

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 8:
            raise DomainError("max_terms must be at least 8")
        if not 0 < self.near_integer_eps < 0.5:
            raise DomainError("near_integer_eps must lie in (0, 0.5)")


DEFAULT_POLICY = SeriesPolicy()


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def gamma_fn(x):
    if _is_nonpositive_integer(x):
        raise DomainError(f"Gamma has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError:
        return math.inf


def beta_fn(a, b):
    if not (a > 0 and b > 0):
        raise DomainError("beta_fn requires a > 0 and b > 0")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if int(k) != k or k < 0:
        raise DomainError("pochhammer needs a nonnegative integer k")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
    return out


def _rgamma(x):
    if _is_nonpositive_integer(x):
        return 0.0
    return 1.0 / math.gamma(x)


# ----------------------------------------------------------------------
# Gauss hypergeometric function on (-inf, 0]
# ----------------------------------------------------------------------

def _f21_series(a, b, c, z, policy):
    term = 1.0
    total = 1.0
    small = 0
    for k in range(policy.max_terms):
        term *= (a + k) * (b + k) / ((k + 1) * (c + k)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= policy.rel_tol * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise AccuracyError(f"2F1 series did not converge in {policy.max_terms} terms",
                        partial=total, est_error=abs(term))


def _f21_large(a, b, c, x, policy):
    w = 1.0 / (1.0 - x)
    out = 0.0
    for p, q in ((a, b), (b, a)):
        coef = math.gamma(c) * math.gamma(q - p) * _rgamma(q) * _rgamma(c - p)
        if coef:
            out += coef * (1.0 - x) ** (-p) * _f21_series(p, c - q, p - q + 1.0, w, policy)
    return out


NEAR_GAP = 1e-3
GAP_STEP = 2e-3


def _rgamma_psi(x):
    # psi(x) / Gamma(x), finite at the poles
    if _is_nonpositive_integer(x):
        j = int(-x)
        return (-1.0) ** (j + 1) * math.factorial(j)
    return _rgamma(x) * float(digamma(x))


def _f21_integer_gap(a, b, c, x, policy):
    """Logarithmic connection formula for b = a + m, m = 0, 1, ..., x < -1."""
    if b < a:
        a, b = b, a
    m = int(round(b - a))
    w = 1.0 / x
    head = sum(pochhammer(a, k) * math.factorial(m - k - 1) / math.factorial(k)
               * _rgamma(c - a - k) * w**k for k in range(m)) * _rgamma(a + m)
    log_mx = math.log(-x)
    coef = w**m / math.factorial(m)
    tail = 0.0
    small = 0
    for k in range(policy.max_terms):
        if k:
            coef *= (a + m + k - 1) * (-w) / (k * (k + m))
        arg = c - a - m - k
        digammas = float(digamma(1 + m + k) + digamma(1 + k) - digamma(a + m + k))
        term = coef * (_rgamma(arg) * (log_mx + digammas) - _rgamma_psi(arg))
        tail += term
        small = small + 1 if abs(term) <= policy.rel_tol * abs(tail) else 0
        if small >= 2 or (term == 0.0 and k > m):
            return math.gamma(c) * (-x) ** (-a) * (head + _rgamma(a) * tail)
    raise AccuracyError("2F1 logarithmic series did not converge", partial=tail,
                        est_error=abs(term))


def hyp2f1(a, b, c, x, policy=DEFAULT_POLICY):
    """Gauss hypergeometric 2F1(a, b; c; x) for x <= 0; ``x`` may be an array.

    For -2 <= x < -1/2 Pfaff's transformation maps the argument to
    x / (x - 1) in [1/3, 2/3]; the variant whose series terminates is
    preferred when available. Below -2 the connection formula in
    1 / (1 - x) is used.
    """
    if np.ndim(x):
        flat = [hyp2f1(a, b, c, float(v), policy) for v in np.ravel(x)]
        return np.array(flat).reshape(np.shape(x))
    if _is_nonpositive_integer(c):
        raise DomainError("c must not be a nonpositive integer")
    if x > 0:
        raise DomainError("hyp2f1 is only implemented for x <= 0")
    if x == 0:
        return 1.0
    if x >= -0.5:
        return _f21_series(a, b, c, x, policy)
    terminating = _is_nonpositive_integer(c - a) or _is_nonpositive_integer(c - b)
    if x < -2.0 and not terminating:
        gap = b - a
        offset = gap - round(gap)
        if abs(offset) > NEAR_GAP:
            return _f21_large(a, b, c, x, policy)
        b0 = a + round(gap)
        if abs(offset) < 1e-14:
            return _f21_integer_gap(a, b0, c, x, policy)
        # quartic interpolation in b: exact formula at b0, generic one away from it
        nodes = (-2.0, -1.0, 0.0, 1.0, 2.0)
        vals = [_f21_integer_gap(a, b0, c, x, policy) if k == 0.0
                else _f21_large(a, b0 + k * GAP_STEP, c, x, policy) for k in nodes]
        u = offset / GAP_STEP
        out = 0.0
        for i, ki in enumerate(nodes):
            wgt = 1.0
            for kj in nodes:
                if kj != ki:
                    wgt *= (u - kj) / (ki - kj)
            out += wgt * vals[i]
        return out
    z = x / (x - 1.0)
    if _is_nonpositive_integer(c - a) and not _is_nonpositive_integer(c - b):
        return (1.0 - x) ** (-b) * _f21_series(c - a, b, c, z, policy)
    return (1.0 - x) ** (-a) * _f21_series(a, c - b, c, z, policy)


# ----------------------------------------------------------------------
# Modified Bessel function K_nu, nu >= 0
# ----------------------------------------------------------------------

def _as_float_array(z):
    arr = np.asarray(z, dtype=float)
    return np.atleast_1d(arr), arr.ndim == 0


def _ascending_sum(nu, x, policy):
    """sum_k x**k / (k! Gamma(k + nu + 1)) for an array x >= 0."""
    term = np.full_like(x, _rgamma(nu + 1.0))
    total = term.copy()
    kmin = max(0, int(-nu) + 1)
    for k in range(1, policy.max_terms):
        term = term * x / (k * (k + nu))
        total += term
        if k > kmin and np.all(np.abs(term) <= policy.rel_tol * np.abs(total)):
            return total
    raise AccuracyError("ascending Bessel series did not converge", partial=total)


def _matern_series(nu, z, policy):
    """z**nu K_nu(z) from I_{-nu} - I_nu, non-integer nu > 0, small z."""
    x = 0.25 * z * z
    s = math.sin(math.pi * nu)
    lead = 2.0**nu * _ascending_sum(-nu, x, policy)
    tail = 2.0**-nu * z ** (2 * nu) * _ascending_sum(nu, x, policy)
    return 0.5 * math.pi * (lead - tail) / s


def _digamma_int(m):
    """psi(m) for a positive integer m."""
    return -EULER_GAMMA + math.fsum(1.0 / j for j in range(1, m))


def _matern_integer_series(n, z, policy):
    """z**n K_n(z) for a nonnegative integer n (logarithmic series)."""
    half = 0.5 * z
    x = half * half
    finite = np.zeros_like(z)
    for k in range(n):
        with np.errstate(over="ignore", invalid="ignore"):
            finite += np.exp(math.lgamma(n - k) - math.lgamma(k + 1.0)) * (-x) ** k
    finite *= 0.5 * 2.0**n

    # z**n I_n(z) and the digamma-weighted companion series
    term = np.full_like(z, math.exp(-math.lgamma(n + 1.0)))
    i_sum = term.copy()
    psi_sum = (_digamma_int(1) + _digamma_int(n + 1)) * term
    for k in range(1, policy.max_terms):
        term = term * x / (k * (k + n))
        i_sum += term
        psi_sum += (_digamma_int(k + 1) + _digamma_int(n + k + 1)) * term
        if np.all(np.abs(term) <= policy.rel_tol * np.abs(i_sum)):
            break
    else:
        raise AccuracyError("integer-order K series did not converge")
    scale = 2.0**n * half ** (2 * n)
    sign = (-1.0) ** n
    # z/2 underflows for subnormal z; log z does not
    log_half = np.log(z) - math.log(2.0)
    return finite - sign * log_half * scale * i_sum + sign * 0.5 * scale * psi_sum


def _matern_near_integer(nu, z, policy):
    """z**nu K_nu(z) for nu within near_integer_eps of an integer n."""
    n = int(round(nu))
    base = _matern_integer_series(n, z, policy)
    offset = nu - n
    if offset == 0.0:
        return base
    # d/dnu [z**nu K_nu(z)] at nu = n
    deriv = np.log(z) * base
    if n > 0:
        acc = np.zeros_like(z)
        for k in range(n):
            acc += 2.0**-k * _matern_integer_series(k, z, policy) / ((n - k) * math.factorial(k))
        deriv += math.factorial(n) * 2.0 ** (n - 1) * acc
    return base + offset * deriv


def _log_kve_schlafli(nu, z):
    """log(exp(z) K_nu(z)) by the trapezoidal rule on
    K_nu(z) = 1/2 int_R exp(-z cosh t + nu t) dt.

    The rule is truncated where the exponent has dropped by 45 below its
    peak; the step resolves both the peak and the double-exponential cutoff.
    """
    tstar = np.arcsinh(nu / z)
    ch = np.cosh(tstar)
    peak = -z * ch + nu * tstar
    span_r = np.arccosh(1.0 + 45.0 / (z * ch))
    span_l = np.minimum(np.sqrt(90.0 / z), tstar + np.arccosh(1.0 + 45.0 / z))
    curv = np.maximum(np.sqrt(z * z + nu * nu), z * np.cosh(tstar + span_r))
    h_max = 1.0 / (3.0 * np.sqrt(curv))
    npts = int(min(20001, max(64, math.ceil(np.max((span_l + span_r) / h_max)) + 1)))
    s = np.linspace(0.0, 1.0, npts)
    t = (tstar - span_l)[:, None] + (span_l + span_r)[:, None] * s[None, :]
    h = (span_l + span_r) / (npts - 1)
    expo = -z[:, None] * np.cosh(t) + nu * t - peak[:, None]
    body = np.exp(expo).sum(axis=1)
    return np.log(0.5 * h * body) + peak + z


def _kve_asymptotic(nu, z):
    """exp(z) K_nu(z) from Hankel's expansion, summed to the smallest term."""
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    total = term.copy()
    last = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = np.abs(term)
        active &= mag < last
        total = np.where(active, total + term, total)
        last = np.where(active, mag, last)
        if not np.any(active & (mag > 1e-17 * np.abs(total))):
            break
    return np.sqrt(0.5 * math.pi / z) * total


HUGE_ORDER_LGAMMA = 600.0
SERIES_MIN_GAP = 1e-2


def _asymptotic_threshold(nu):
    return 30.0 + nu * nu


def _pick_path(nu, z, policy, path):
    if path not in (None, "auto", "series", "integer", "schlafli", "asymptotic"):
        raise DomainError(f"unknown K path {path!r}")
    near_int = abs(nu - round(nu)) < policy.near_integer_eps
    if path in (None, "auto"):
        # huge orders go to the integral, which is evaluated in log form
        # just outside the integer window the sine quotient loses eps/gap
        gap = abs(nu - round(nu))
        series_ok = near_int or gap >= SERIES_MIN_GAP
        small = (z <= SERIES_RADIUS) & series_ok & (math.lgamma(nu + 1.0) < HUGE_ORDER_LGAMMA)
        large = z >= _asymptotic_threshold(nu)
        return small, large, near_int
    if path == "series" and near_int:
        raise DomainError("the non-integer series is unstable this close to an integer order")
    if path == "integer" and not near_int:
        raise DomainError("the integer-order series needs an order near an integer")
    small = np.full(z.shape, path in ("series", "integer"))
    large = np.full(z.shape, path == "asymptotic")
    return small, large, near_int


def _matern_pieces(nu, z, policy, path=None):
    """Split evaluation. Returns (small_mask, matern_small, log_kve_rest)."""
    small, large, near_int = _pick_path(nu, z, policy, path)
    m_small = np.full(z.shape, np.nan)
    log_kve = np.full(z.shape, np.nan)
    if np.any(small):
        zs = z[small]
        m_small[small] = (_matern_near_integer(nu, zs, policy) if near_int
                          else _matern_series(nu, zs, policy))
    mid = ~small & ~large
    if np.any(mid):
        log_kve[mid] = _log_kve_schlafli(nu, z[mid])
    if np.any(large):
        log_kve[large] = np.log(_kve_asymptotic(nu, z[large]))
    return small, m_small, log_kve


def _check_positive(z):
    if np.any(~(z > 0)):
        raise DomainError("argument must be positive")


def bessel_k(alpha, z, policy=DEFAULT_POLICY, *, path=None):
    """Modified Bessel function of the second kind K_alpha(z), z > 0.

    ``path`` forces one evaluation route (see module docstring); by default
    the series is used for z <= 2, the asymptotic expansion for
    z >= 30 + alpha**2 and Schläfli's integral in between (and for orders
    so large that the series would overflow). Overflow near z = 0 returns ``inf`` and emits ``BesselOverflowWarning``.
    """
    zz, scalar = _as_float_array(z)
    _check_positive(zz)
    nu = abs(float(alpha))
    small, m_small, log_kve = _matern_pieces(nu, zz, policy, path)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        out = np.where(small, m_small * zz**-nu, np.exp(log_kve - zz))
    if np.any(np.isinf(out)):
        warnings.warn(f"K_{alpha} overflowed near z=0", BesselOverflowWarning, stacklevel=2)
    return float(out[0]) if scalar else out


def matern(alpha, z, policy=DEFAULT_POLICY, *, path=None):
    """Matérn function M_alpha(z) = K_alpha(z) z**alpha.

    For alpha > 0 the value at z = 0 is the limit 2**(alpha-1) Gamma(alpha).
    """
    alpha = float(alpha)
    zz, scalar = _as_float_array(z)
    if np.any(zz < 0) or np.any(~np.isfinite(zz)):
        raise DomainError("matern needs finite z >= 0")
    zero = zz == 0
    if np.any(zero) and alpha <= 0:
        raise DomainError("M_alpha diverges at z = 0 for alpha <= 0")
    out = np.empty_like(zz)
    if np.any(zero):
        out[zero] = 2.0 ** (alpha - 1.0) * gamma_fn(alpha)
    pos = ~zero
    if np.any(pos):
        zp = zz[pos]
        nu = abs(alpha)
        small, m_small, log_kve = _matern_pieces(nu, zp, policy, path)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out[pos] = np.where(small, m_small * zp ** (alpha - nu),
                                np.exp(log_kve - zp + alpha * np.log(zp)))
    return float(out[0]) if scalar else out


def log_matern(alpha, z, policy=DEFAULT_POLICY):
    """log M_alpha(z) for z > 0, free of intermediate overflow."""
    alpha = float(alpha)
    zz, scalar = _as_float_array(z)
    _check_positive(zz)
    nu = abs(alpha)
    small, m_small, log_kve = _matern_pieces(nu, zz, policy)
    with np.errstate(divide="ignore", invalid="ignore"):
        lz = np.log(zz)
        out = np.where(small, np.log(m_small) + (alpha - nu) * lz, log_kve - zz + alpha * lz)
    return float(out[0]) if scalar else out


def matern_norm(alpha, z, policy=DEFAULT_POLICY):
    """Normalized Matérn function 2**(1-alpha)/Gamma(alpha) K_alpha(z) z**alpha.

    Equals 1 at z = 0 and decreases strictly; ``alpha`` must be positive.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError("matern_norm needs alpha > 0")
    zz, scalar = _as_float_array(z)
    if np.any(zz < 0):
        raise DomainError("matern_norm needs z >= 0")
    out = np.ones_like(zz)
    pos = zz > 0
    if np.any(pos):
        logc = (1.0 - alpha) * math.log(2.0) - math.lgamma(alpha)
        # true values are below 1; clip the rounding excess near z = 0
        out[pos] = np.minimum(np.exp(logc + log_matern(alpha, zz[pos], policy)), 1.0)
    return float(out[0]) if scalar else out


def half_integer_matern(n, z, negative=False):
    """Closed form of M_{n+1/2} (or M_{-n-1/2} with ``negative``), n >= 0."""
    z = np.asarray(z, dtype=float)
    poly = sum(math.factorial(n + k) / (math.factorial(k) * math.factorial(n - k))
               * (2.0 * z) ** -k for k in range(n + 1))
    power = z ** (-n - 1.0) if negative else z**n
    return math.sqrt(0.5 * math.pi) * np.exp(-z) * power * poly


def matern_derivative_check(alpha, z, policy=DEFAULT_POLICY):
    """d/dz [K_alpha(z) z**alpha] evaluated as -K_{alpha-1}(z) z**alpha."""
    if not z > 0:
        raise DomainError("z must be positive")
    return -bessel_k(alpha - 1.0, z, policy) * z**alpha


# ----------------------------------------------------------------------
# Omega_lambda(t) = Gamma(lambda+1) (t/2)**(-lambda) J_lambda(t)
# ----------------------------------------------------------------------

OMEGA_SERIES_RADIUS = 4.0


def _omega_series(lam, t):
    x = -0.25 * t * t
    term = np.ones_like(t)
    total = np.ones_like(t)
    comp = np.zeros_like(t)
    for k in range(1, 200):
        term = term * x / (k * (lam + k))
        # Kahan-compensated accumulation
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _omega_asymptotic(lam, t):
    mu = 4.0 * lam * lam
    p = np.ones_like(t)
    q = np.zeros_like(t)
    term = np.ones_like(t)
    last = np.full_like(t, np.inf)
    active = np.ones(t.shape, dtype=bool)
    for k in range(1, 120):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * t)
        mag = np.abs(term)
        active &= mag < last
        sign = (-1.0) ** (k // 2)
        if k % 2:
            q = np.where(active, q + sign * term, q)
        else:
            p = np.where(active, p + sign * term, p)
        last = np.where(active, mag, last)
        if not np.any(active & (mag > 1e-17)):
            break
    chi = t - (2.0 * lam + 1.0) * math.pi / 4.0
    amp = np.exp(math.lgamma(lam + 1.0) - (lam + 0.5) * np.log(0.5 * t)) / math.sqrt(math.pi)
    return amp * (p * np.cos(chi) - q * np.sin(chi))


def _omega_bessel(lam, t):
    logc = math.lgamma(lam + 1.0) - lam * np.log(0.5 * t)
    return np.exp(logc) * jv(lam, t)


def omega_asymptotic_threshold(lam):
    return 25.0 * (lam + 2.0)


def omega(lam, t):
    """Normalized Bessel kernel Omega_lambda(t), even in t with Omega(0) = 1.

    Power series for |t| <= 4, Hankel's expansion beyond 25 (lambda + 2),
    and the Bessel function J_lambda in between.
    """
    lam = float(lam)
    if not lam > -1:
        raise DomainError("omega needs lambda > -1")
    tt, scalar = _as_float_array(t)
    tt = np.abs(tt)
    out = np.empty_like(tt)
    near = tt <= OMEGA_SERIES_RADIUS
    far = tt > omega_asymptotic_threshold(lam)
    mid = ~near & ~far
    if np.any(near):
        out[near] = _omega_series(lam, tt[near])
    if np.any(mid):
        out[mid] = _omega_bessel(lam, tt[mid])
    if np.any(far):
        out[far] = _omega_asymptotic(lam, tt[far])
    return float(out[0]) if scalar else out


def omega_envelope(lam, t):
    """Upper envelope min(1, C t**(-lambda-1/2)) of |Omega_lambda(t)| for large t."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        env = np.exp(math.lgamma(lam + 1.0) - (lam + 0.5) * np.log(0.5 * t)) / math.sqrt(math.pi)
    return np.minimum(1.0, 1.5 * env)


_ZERO_CACHE = {}


def omega_zeros(lam, count):
    """First ``count`` positive zeros of Omega_lambda (those of J_lambda)."""
    from scipy.optimize import brentq

    lam = float(lam)
    known = _ZERO_CACHE.get(lam, [])
    if len(known) >= count:
        return np.array(known[:count])
    zeros = list(known)
    f = lambda x: float(omega(lam, x))
    if len(zeros) < 8:
        step = 0.25
        x0 = zeros[-1] + 1e-3 if zeros else 1e-3
        f0 = f(x0)
        while len(zeros) < 8:
            x1 = x0 + step
            f1 = f(x1)
            if f0 == 0.0:
                zeros.append(x0)
            elif f0 * f1 < 0:
                zeros.append(brentq(f, x0, x1, xtol=1e-15))
            x0, f0 = x1, f1
    while len(zeros) < count:
        gap = zeros[-1] - zeros[-2]
        lo = zeros[-1] + 0.5 * gap
        hi = zeros[-1] + 1.5 * gap
        zeros.append(brentq(f, lo, hi, xtol=1e-15))
    _ZERO_CACHE[lam] = zeros
    return np.array(zeros[:count])
