import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.special import gamma, kv

from hsmatern.errors import AccuracyError, DivergenceError, DomainError
from hsmatern.hstransform import (RadialDensity, beta_type_density, binomial_density, dirac,
                                  hankel_integral, hs_forward, hs_inverse, k_power_density,
                                  laplace_density, omega_self_consistency, order_lower,
                                  order_lowering_moment, parseval_residual)
from hsmatern.kernels import l2_norm_sq_closed
from hsmatern.quadrature import QuadratureConfig
from hsmatern.specfun import hyp2f1, matern, matern_norm

CATALOG = [
    beta_type_density(1.0, 0.0),
    beta_type_density(2.0, 0.5),
    binomial_density(1.0, 0.5),
    k_power_density(0.3, 2.0),
    laplace_density("f_alpha", 1.0),
]


class TestRadialDensity:
    def test_negative_atom(self):
        with pytest.raises(DomainError):
            RadialDensity(None, -1.0)

    def test_bad_support(self):
        with pytest.raises(DomainError):
            RadialDensity(lambda t: t, support=(2.0, 1.0))

    def test_masks_outside_support(self):
        nu = RadialDensity(lambda t: np.ones_like(t), support=(1.0, 2.0))
        assert_allclose(nu(np.array([0.5, 1.5, 3.0])), [0.0, 1.0, 0.0])

    def test_divergent_mass(self):
        nu = RadialDensity(lambda t: 1.0 / (1.0 + t), label="harmonic")
        cfg = QuadratureConfig(tail_cut=1e4)
        with pytest.raises(DivergenceError):
            nu.mass(cfg)
        with pytest.raises(DivergenceError):
            hs_forward(nu, 0.0, [1.0], cfg)


class TestForward:
    def test_dirac(self):
        res = hs_forward(dirac(2.5), 0.7, [0.0, 1.0, 10.0])
        assert_allclose(res.phi, 2.5)
        assert res.est_error == 0.0

    @pytest.mark.parametrize("nu", CATALOG, ids=lambda d: d.label)
    def test_value_at_zero_is_mass(self, nu):
        assert hs_forward(nu, 0.5, [0.0]).phi[0] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("alpha,lam", [(0.5, 0.0), (1.0, 1.0), (2.5, -0.5), (0.3, 2.0)])
    def test_beta_density_gives_normalized_matern(self, alpha, lam):
        r = np.array([0.0, 0.5, 1.0, 3.0, 8.0])
        res = hs_forward(beta_type_density(alpha, lam), lam, r)
        assert_allclose(res.phi, matern_norm(alpha, r), rtol=1e-8, atol=1e-12)
        assert res.est_error >= 0 and res.panels_used > 0
        assert_allclose(res.r, r)

    def test_cosine_transform_case(self):
        # order -1/2: 2/B(a, 1/2) (1+t^2)^(-a-1/2), scipy quad with cosine weight as oracle
        a = 1.5
        c = 2.0 * gamma(a + 0.5) / (gamma(a) * math.sqrt(math.pi))
        for r in (0.7, 2.0):
            ref = quad(lambda t: c * (1 + t * t) ** (-a - 0.5), 0, np.inf, weight="cos", wvar=r)[0]
            got = hs_forward(beta_type_density(a, -0.5), -0.5, [r]).phi[0]
            assert got == pytest.approx(ref, rel=1e-8)
            assert got == pytest.approx(matern_norm(a, r), rel=1e-10)

    def test_k_power_density_hypergeometric(self):
        a, b, lam = 0.4, 3.0, 0.5
        r = np.array([0.5, 1.5, 4.0])
        got = hs_forward(k_power_density(a, b), lam, r).phi
        ref = hyp2f1((b - a) / 2, (b + a) / 2, lam + 1, -r * r)
        assert_allclose(got, ref, rtol=1e-8)

    def test_explicit_binomial_density(self):
        # K_a(t) t^(a+2l+1) / (2^(a+2l) G(l+1) G(a+l+1)) -> (1+r^2)^(-a-l-1)
        a, lam = 1.0, 0.5
        c = 1.0 / (2 ** (a + 2 * lam) * gamma(lam + 1) * gamma(a + lam + 1))
        nu = RadialDensity(lambda t: c * kv(a, t) * t ** (a + 2 * lam + 1))
        r = np.array([0.5, 2.0])
        assert_allclose(hs_forward(nu, lam, r).phi, (1 + r * r) ** (-a - lam - 1), rtol=1e-8)

    def test_lambda_domain(self):
        with pytest.raises(DomainError):
            hs_forward(dirac(), -1.0, [1.0])

    def test_panel_cap(self):
        cfg = QuadratureConfig(max_panels=16)
        nu = RadialDensity(lambda t: (1 + t * t) ** -0.6)
        with pytest.raises(AccuracyError) as info:
            hs_forward(nu, 0.0, [300.0], cfg)
        assert info.value.partial is not None

    def test_bit_stable(self):
        nu = beta_type_density(1.2, 0.3)
        a = hs_forward(nu, 0.3, [0.4, 2.2]).values
        b = hs_forward(nu, 0.3, [0.4, 2.2]).values
        assert a == b


class TestInverse:
    @pytest.mark.parametrize("alpha,lam", [(1.0, 0.0), (2.0, 0.5), (0.5, 1.5)])
    def test_round_trip(self, alpha, lam):
        nu = beta_type_density(alpha, lam)
        t = np.array([0.5, 1.0, 2.0])
        got = hs_inverse(lambda r: matern_norm(alpha, r), lam, t).phi
        assert_allclose(got, nu(t), rtol=1e-6)

    def test_binomial_inverse(self):
        a, lam = 1.5, 0.5
        z = np.array([0.5, 1.0, 2.0])
        f = hs_inverse(lambda r: (1 + r * r) ** (-a - lam - 1), lam, z).phi
        ref = (matern(a, z) * z ** (2 * lam + 1)
               / (2 ** (a + 2 * lam) * gamma(lam + 1) * gamma(a + lam + 1)))
        assert_allclose(f, ref, rtol=1e-6)

    def test_exponential_at_half_order(self):
        # (2/pi) t^2 int sin(rt)/(rt) e^-r r^2 dr = 4 t^2 / (pi (1+t^2)^2)
        t = np.array([0.3, 1.0, 2.5])
        got = hs_inverse(lambda r: np.exp(-r), 0.5, t).phi
        assert_allclose(got, 4 * t**2 / (math.pi * (1 + t**2) ** 2), rtol=1e-8)

    def test_origin_excluded(self):
        with pytest.raises(DomainError):
            hs_inverse(lambda r: np.exp(-r), 0.5, [0.0, 1.0])

    def test_order_domain(self):
        with pytest.raises(DomainError):
            hs_inverse(lambda r: np.exp(-r), -0.7, [1.0])


class TestParseval:
    def test_half_order_exponential(self):
        f = lambda t: matern(0.5, t)
        res, lhs, rhs = parseval_residual(f, f, -0.5, return_sides=True)
        assert lhs == pytest.approx(math.pi / 4, rel=1e-12)
        assert res <= 1e-6

    def test_matches_l2_closed_form(self):
        f = lambda t: matern(1.0, t)
        res, lhs, _ = parseval_residual(f, f, 0.5, return_sides=True)
        assert lhs == pytest.approx(l2_norm_sq_closed(1.0, 0.5), rel=1e-10)
        assert res <= 1e-6

    def test_zero_function(self):
        f = lambda t: matern(1.0, t)
        res, lhs, rhs = parseval_residual(f, lambda t: np.zeros_like(t), 0.0, return_sides=True)
        assert (res, lhs, rhs) == (0.0, 0.0, 0.0)


class TestOrderLower:
    def test_mass_preserved(self):
        nu = beta_type_density(1.0, 2.0)
        mu = order_lower(nu, 2.0, 2)
        assert mu.mass() == pytest.approx(1.0, abs=1e-8)

    def test_transforms_commute(self):
        nu = beta_type_density(1.0, 2.0)
        mu = order_lower(nu, 2.0, 2)
        r = [0.5, 1.0, 2.0]
        assert_allclose(hs_forward(mu, 0.0, r).phi, hs_forward(nu, 2.0, r).phi, atol=1e-6)

    def test_compact_support(self):
        nu = RadialDensity(lambda t: np.ones_like(t), support=(1.0, 2.0))
        mu = order_lower(nu, 1.0, 1)
        t = np.array([0.5, 1.5, 2.5, 4.0])
        vals = mu(t)
        assert vals[0] > 0 and vals[1] > 0
        assert_allclose(vals[2:], 0.0)
        assert mu.mass() == pytest.approx(1.0, abs=1e-8)

    def test_atom_carried(self):
        nu = RadialDensity(beta_type_density(1.0, 1.0).density, atom_at_zero=0.25)
        assert order_lower(nu, 1.0, 1).atom_at_zero == 0.25

    def test_domain(self):
        with pytest.raises(DomainError):
            order_lower(beta_type_density(1.0, 0.5), 0.5, 3)
        with pytest.raises(DomainError):
            order_lower(dirac(), 2.0, 1)


class TestOmegaAverages:
    def test_sine_from_cosines(self):
        assert omega_self_consistency(0.5, -0.5, 3.0) <= 1e-10

    def test_at_zero(self):
        assert omega_self_consistency(2.0, 0.5, 0.0) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("lam,rho", [(0.5, -0.5), (2.0, 0.3), (3.5, -0.8)])
    @pytest.mark.parametrize("k", range(5))
    def test_moments(self, lam, rho, k):
        q, closed = order_lowering_moment(lam, rho, k)
        assert q == pytest.approx(closed, rel=1e-9)

    def test_first_moment_formula(self):
        lam, rho = 2.0, 0.3
        assert order_lowering_moment(lam, rho, 1)[1] == pytest.approx((rho + 1) / (lam + 1))

    def test_domain(self):
        with pytest.raises(DomainError):
            omega_self_consistency(0.5, 0.5, 1.0)


class TestLaplaceDensities:
    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
    def test_f_alpha_probability(self, alpha):
        assert laplace_density("f_alpha", alpha).mass() == pytest.approx(1.0, abs=1e-8)

    def test_f_alpha_laplace_transform(self):
        f = laplace_density("f_alpha", 0.5)
        for z in (0.3, 1.0, 2.0):
            v = hankel_integral(lambda t: np.exp(-z * z * t) * f(t), 0.0, 0.0)[0]
            assert v == pytest.approx(math.exp(-z), rel=1e-10)

    def test_f_alpha_negative_moment(self):
        f = laplace_density("f_alpha", 1.0)
        v = hankel_integral(lambda t: t**-1.0 * f(t), 0.0, 0.0)[0]
        assert v == pytest.approx(4.0, rel=1e-10)

    def test_g_alpha(self):
        g = laplace_density("g_alpha", 1.5)
        assert g.mass() == pytest.approx(1.0, abs=1e-8)
        for z in (0.5, 2.0):
            v = hankel_integral(lambda u: np.exp(-z * z * u) * g(u), 0.0, 0.0)[0]
            assert v == pytest.approx(matern_norm(1.5, math.sqrt(z)), rel=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            laplace_density("f_alpha", 0.0)
        with pytest.raises(DomainError):
            laplace_density("h_alpha", 1.0)
