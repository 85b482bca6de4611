"""Identity suite run by ``hsmatern verify``."""
import math

import numpy as np

from .hstransform import (beta_type_density, binomial_density, hankel_integral, hs_forward,
                          hs_inverse, laplace_density, omega_self_consistency, order_lower,
                          parseval_residual)
from .kernels import (KernelSpec, l2_norm_sq, l2_norm_sq_closed, moment_integral,
                      moment_integral_quad, r3_convolution_identities, radial_fourier)
from .quadrature import DEFAULT_CONFIG
from .specfun import half_integer_matern, matern, matern_norm

__all__ = ["run_identity_suite", "IDENTITIES"]


def _rel(a, b):
    return abs(a - b) / abs(b)


def _half_integer(cfg):
    z = np.linspace(0.1, 20.0, 100)
    worst = 0.0
    for k in range(3):
        for neg in (False, True):
            alpha = -(k + 0.5) if neg else k + 0.5
            ref = half_integer_matern(k, z, negative=neg)
            worst = max(worst, float(np.max(np.abs(matern(alpha, z) / ref - 1))))
    return {"alpha": "+-1/2,+-3/2,+-5/2"}, worst


def _binomial_transform(cfg):
    a, lam, r = 1.0, 0.0, 1.0
    v = hs_forward(binomial_density(a, lam), lam, [r], cfg).phi[0]
    return {"alpha": a, "lambda": lam, "r": r}, _rel(v, (1 + r * r) ** (-a - lam - 1))


def _binomial_inverse(cfg):
    a, lam, z = 1.0, 0.0, 1.0
    f = hs_inverse(lambda r: (1 + r * r) ** (-a - lam - 1), lam, [z], cfg).phi[0]
    m = f * 2 ** (a + 2 * lam) * math.gamma(lam + 1) * math.gamma(a + lam + 1) / z ** (2 * lam + 1)
    return {"alpha": a, "lambda": lam, "z": z}, _rel(m, matern(a, z))


def _bessel_fourier(cfg):
    v = radial_fourier(KernelSpec.bessel_potential(1.0, 3), 1.0, cfg)
    return {"alpha": 1.0, "n": 3, "xi": 1.0}, _rel(v, 0.5)


def _falam_fourier(cfg):
    v = radial_fourier(KernelSpec.f_alpha_lambda(-0.25, 1.0, 2), 1.0, cfg)
    return {"alpha": -0.25, "lambda": 1.0, "n": 2, "xi": 1.0}, _rel(v, 2.0**-1.75)


def _beta_transform(cfg):
    a, lam, r = 1.0, 0.5, 1.0
    v = hs_forward(beta_type_density(a, lam), lam, [r], cfg).phi[0]
    return {"alpha": a, "lambda": lam, "r": r}, _rel(v, matern_norm(a, r))


def _parseval(cfg):
    f = lambda t: matern(0.5, t)
    res, lhs, _ = parseval_residual(f, f, -0.5, cfg, return_sides=True)
    return {"alpha": 0.5, "lambda": -0.5}, max(abs(lhs - math.pi / 4), res)


def _l2_lemma(cfg):
    return {"alpha": 1.0, "lambda": 0.0}, _rel(l2_norm_sq(1.0, 0.0, cfg), l2_norm_sq_closed(1.0, 0.0))


def _moment_lemma(cfg):
    return {"alpha": 0.5, "beta": 1.5}, _rel(moment_integral_quad(0.5, 1.5, cfg),
                                             moment_integral(0.5, 1.5))


def _conv_first(cfg):
    got, ref = r3_convolution_identities(1.0, cfg)["first"]
    return {"z": 1.0}, abs(got - ref)


def _conv_second(cfg):
    got, ref = r3_convolution_identities(1.0, cfg)["second"]
    return {"z": 1.0}, abs(got - ref)


def _omega_lemma(cfg):
    return {"lambda": 0.5, "rho": -0.5, "r": 3.0}, omega_self_consistency(0.5, -0.5, 3.0, cfg)


def _laplace(cfg):
    f = laplace_density("f_alpha", 0.5)
    z = 1.0
    v = hankel_integral(lambda t: np.exp(-z * z * t) * f(t), 0.0, 0.0, cfg)[0]
    return {"alpha": 0.5, "z": z}, _rel(v, math.exp(-z))


def _order_walk(cfg):
    nu = beta_type_density(1.0, 2.0)
    mu = order_lower(nu, 2.0, 2, cfg)
    a = hs_forward(mu, 0.0, [1.0], cfg).phi[0]
    b = hs_forward(nu, 2.0, [1.0], cfg).phi[0]
    return {"alpha": 1.0, "lambda": 2.0, "n": 2, "r": 1.0}, abs(a - b)


IDENTITIES = [
    ("half-integer", _half_integer, 1e-12),
    ("binomial-transform", _binomial_transform, 1e-6),
    ("binomial-inverse", _binomial_inverse, 1e-5),
    ("bessel-potential-fourier", _bessel_fourier, 1e-6),
    ("f-alpha-lambda-fourier", _falam_fourier, 1e-6),
    ("beta-density-transform", _beta_transform, 1e-6),
    ("parseval", _parseval, 1e-8),
    ("l2-lemma", _l2_lemma, 1e-8),
    ("moment-lemma", _moment_lemma, 1e-8),
    ("conv-R3", _conv_first, 1e-3),
    ("conv-R3-second", _conv_second, 1e-3),
    ("omega-lemma", _omega_lemma, 1e-10),
    ("laplace", _laplace, 1e-10),
    ("order-walk", _order_walk, 1e-6),
]


def run_identity_suite(cfg=DEFAULT_CONFIG, tol=None):
    """Evaluate every identity; ``tol`` overrides the per-identity tolerances."""
    rows = []
    for name, fn, default_tol in IDENTITIES:
        limit = default_tol if tol is None else float(tol)
        try:
            params, residual = fn(cfg)
            error = None
        except ArithmeticError as exc:
            params, residual, error = {}, math.inf, str(exc)
        row = {"name": name, "params": params, "residual": float(residual),
               "tolerance": limit, "pass": bool(residual <= limit)}
        if error:
            row["error"] = error
        rows.append(row)
    return {"identities": rows, "all_pass": all(r["pass"] for r in rows)}
