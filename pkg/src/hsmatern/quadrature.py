"""Double-exponential quadrature rules and sequence acceleration.

All rules take vectorized integrands: ``f(x)`` receives a 1-D array of
abscissae and may return an array whose *last* axis runs over them, so a
batch of related integrals (one per parameter value) is computed in one
sweep and shares the node set.
"""
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadratureConfig",
    "tanh_sinh",
    "exp_sinh",
    "wynn_epsilon",
]

_HALF_PI = 0.5 * math.pi


def _default_max_panels():
    raw = os.environ.get("MS_QUAD_MAX_PANELS")
    if raw is None:
        return 2000
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"MS_QUAD_MAX_PANELS must be an integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits shared by every integration routine.

    Parameters
    ----------
    abs_tol, rel_tol : float
        Requested accuracy; a result is accepted once the error estimate is
        below ``max(abs_tol, rel_tol * |value|)``.
    max_panels : int
        Cap on the number of oscillation panels in Hankel-type integrals.
        Defaults to ``$MS_QUAD_MAX_PANELS`` when set.
    oscillatory_mode : {"zero-splitting", "plain-adaptive"}
        Panel layout for oscillatory integrals.
    tail_cut : float
        Largest abscissa ever visited on a semi-infinite oscillatory range.
    max_level : int
        Deepest step-halving level of the double-exponential rules.
    """

    abs_tol: float = 1e-14
    rel_tol: float = 1e-12
    max_panels: int = field(default_factory=_default_max_panels)
    oscillatory_mode: str = "zero-splitting"
    tail_cut: float = 1e8
    max_level: int = 9

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_panels < 16:
            raise DomainError("max_panels must be at least 16")
        if self.oscillatory_mode not in ("zero-splitting", "plain-adaptive"):
            raise DomainError(f"unknown oscillatory_mode {self.oscillatory_mode!r}")
        if not self.tail_cut > 0:
            raise DomainError("tail_cut must be positive")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * float(np.max(np.abs(value))))


DEFAULT_CONFIG = QuadratureConfig()


def _level_nodes(level, h0, lo, hi):
    """Abscissae tau introduced at ``level`` (all of them at level 0)."""
    h = h0 / 2**level
    if level == 0:
        k = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
    else:
        k = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
        k = k[k % 2 == 1]
    return k * h, h


def _run_levels(evaluate, cfg, min_level, what):
    total = None
    prev = None
    err = np.inf
    for level in range(cfg.max_level + 1):
        part, h = evaluate(level)
        if total is None:
            total = h * part
        else:
            total = 0.5 * total + h * part
        if prev is not None and level >= min_level:
            err = np.max(np.abs(total - prev))
            if err <= cfg.tolerance(total):
                return total, err
        prev = total
    raise AccuracyError(f"{what}: no convergence after level {cfg.max_level}",
                        partial=total, est_error=err)


def _weighted_sum(f, x, w, *extra):
    with np.errstate(all="ignore"):
        vals = np.asarray(f(x, *extra), dtype=float)
        terms = vals * w
    terms = np.where(np.isfinite(terms), terms, 0.0)
    return terms.sum(axis=-1)


def tanh_sinh(f, a, b, cfg=DEFAULT_CONFIG, *, offsets=False, min_level=3):
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Endpoint singularities of algebraic type are handled. With
    ``offsets=True`` the integrand is called as ``f(x, x - a, b - x)`` where
    both offsets are computed without cancellation, which matters for
    factors like ``(1 - x)**p`` with ``p < 0``.

    Returns ``(value, est_error)``; ``value`` has the integrand's batch shape.
    """
    a = float(a)
    b = float(b)
    if not b > a:
        if b == a:
            probe = np.asarray(f(np.array([a]), np.zeros(1), np.zeros(1))
                               if offsets else f(np.array([a])))
            return np.zeros(probe.shape[:-1]) if probe.ndim > 1 else 0.0, 0.0
        raise DomainError("tanh_sinh requires a <= b")
    width = b - a

    def evaluate(level):
        tau, h = _level_nodes(level, 0.5, -6.0, 6.0)
        u = _HALF_PI * np.sinh(tau)
        left = width * expit(2.0 * u)
        right = width * expit(-2.0 * u)
        keep = (left > 0) & (right > 0)
        tau, u, left, right = tau[keep], u[keep], left[keep], right[keep]
        e = np.exp(-2.0 * np.abs(u))
        w = width * math.pi * np.cosh(tau) * e / (1.0 + e) ** 2
        x = np.where(u < 0, a + left, b - right)
        if offsets:
            return _weighted_sum(f, x, w, left, right), h
        return _weighted_sum(f, x, w), h

    return _run_levels(evaluate, cfg, min_level, "tanh_sinh")


def exp_sinh(f, a=0.0, cfg=DEFAULT_CONFIG, *, offsets=False, min_level=3):
    """Integrate ``f`` over ``[a, inf)``.

    Suited to integrands with an algebraic singularity at ``a`` and
    algebraic or exponential decay at infinity. With ``offsets=True`` the
    integrand is called as ``f(x, x - a)``.
    """
    a = float(a)

    def evaluate(level):
        tau, h = _level_nodes(level, 0.5, -6.7, 6.3)
        u = _HALF_PI * np.sinh(tau)
        with np.errstate(over="ignore"):
            off = np.exp(u)
            w = _HALF_PI * np.cosh(tau) * off
        keep = np.isfinite(w) & (off > 0)
        off, w = off[keep], w[keep]
        x = a + off
        if offsets:
            return _weighted_sum(f, x, w, off), h
        return _weighted_sum(f, x, w), h

    return _run_levels(evaluate, cfg, min_level, "exp_sinh")


def wynn_epsilon(partial_sums):
    """Wynn's epsilon extrapolation of a sequence of partial sums.

    Returns the highest-order even-column entry. A vanishing difference means
    the sequence is already stationary and its last value is returned.
    """
    s = [float(v) for v in partial_sums]
    if len(s) < 3:
        return s[-1]
    best = s[-1]
    prev = [0.0] * (len(s) + 1)
    cur = s
    for j in range(1, len(s)):
        nxt = []
        for k in range(len(cur) - 1):
            d = cur[k + 1] - cur[k]
            if d == 0.0 or abs(d) <= 1e-300:
                return best
            nxt.append(prev[k + 1] + 1.0 / d)
        prev, cur = cur, nxt
        if j % 2 == 0 and cur:
            if not math.isfinite(cur[-1]):
                return best
            best = cur[-1]
        if len(cur) < 2:
            break
    return best
