import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import gamma

from hsmatern.errors import DivergenceError, DomainError
from hsmatern.kernels import (InnerProductSpace, KernelSpec, complete_monotonicity_check,
                              convolution_check, fourier_closed_form, imq_tail_mass,
                              kernel_eval, kernel_from_name, l2_norm_sq, l2_norm_sq_closed,
                              mapped_kernel, matern_tail_mass, moment_integral,
                              moment_integral_quad, r3_convolution_identities, radial_fourier,
                              rkhs_inner, sobolev_norm_sq)
from hsmatern.hstransform import hankel_integral

from oracles import bessel_potential_scipy, gramian_1d


class TestKernelSpec:
    @pytest.mark.parametrize("build", [
        lambda: KernelSpec.matern_norm(0.0),
        lambda: KernelSpec.bessel_potential(-1.0, 2),
        lambda: KernelSpec.f_kernel(-0.6, 2),
        lambda: KernelSpec.f_alpha_lambda(1.0, 0.4, 3),
        lambda: KernelSpec.f_alpha_lambda(-2.5, 1.0, 2),
        lambda: KernelSpec.imq(0.0),
        lambda: KernelSpec("gauss"),
        lambda: KernelSpec.matern(1.0, 0),
    ])
    def test_invalid(self, build):
        with pytest.raises(DomainError):
            build()

    def test_finite_at_zero(self):
        assert not KernelSpec.bessel_potential(1.0, 3).finite_at_zero
        assert KernelSpec.bessel_potential(2.0, 3).finite_at_zero
        assert KernelSpec.imq(0.1).finite_at_zero

    def test_describe_and_call(self):
        spec = KernelSpec.imq(2.0, 3)
        assert spec.describe() == "imq(beta=2.0, n=3)"
        assert spec(1.0) == 0.25

    def test_frozen(self):
        with pytest.raises(Exception):
            KernelSpec.imq(2.0).beta = 3.0

    @pytest.mark.parametrize("name,fam", [("matern-norm", "matern_norm"), ("g", "bessel_potential"),
                                          ("f", "f_kernel"), ("imq", "imq"),
                                          ("f-alpha-lambda", "f_alpha_lambda")])
    def test_from_name(self, name, fam):
        spec = kernel_from_name(name, alpha=1.5, beta=2.0, lam=1.0, n=2)
        assert spec.family == fam

    def test_from_name_validates(self):
        with pytest.raises(DomainError):
            kernel_from_name("matern-norm", alpha=-1.0)
        with pytest.raises(DomainError):
            kernel_from_name("imq")
        with pytest.raises(DomainError):
            kernel_from_name("gauss", alpha=1.0)


class TestEval:
    def test_bessel_potential_r3(self):
        z = np.linspace(0.1, 10, 50)
        got = kernel_eval(KernelSpec.bessel_potential(1.0, 3), z)
        assert_allclose(got, np.exp(-z) / (4 * math.pi * z), rtol=1e-13)

    @pytest.mark.parametrize("alpha,n", [(0.3, 1), (1.2, 2), (2.5, 3), (0.75, 4)])
    def test_bessel_potential_vs_scipy(self, alpha, n):
        z = np.geomspace(0.01, 30, 40)
        assert_allclose(kernel_eval(KernelSpec.bessel_potential(alpha, n), z),
                        bessel_potential_scipy(alpha, n, z), rtol=1e-12)

    def test_imq(self):
        z = np.array([0.0, 1.0, 3.0])
        assert_allclose(kernel_eval(KernelSpec.imq(1.5), z), (1 + z * z) ** -1.5)

    def test_singular_origin(self):
        with pytest.raises(DomainError):
            kernel_eval(KernelSpec.bessel_potential(1.0, 3), 0.0)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            kernel_eval(KernelSpec.imq(1.0), -1.0)

    @pytest.mark.parametrize("alpha,lam,n", [(0.5, 1.0, 3), (-0.25, 1.0, 2), (1.0, 0.2, 1),
                                             (0.3, 2.5, 3)])
    def test_f_alpha_lambda_is_bessel_potential(self, alpha, lam, n):
        z = np.array([0.2, 1.0, 4.0])
        got = kernel_eval(KernelSpec.f_alpha_lambda(alpha, lam, n), z)
        ref = bessel_potential_scipy(alpha + lam + 1, n, z)
        assert_allclose(got, ref, rtol=1e-10)

    def test_f_kernel_integrates_to_one(self):
        spec = KernelSpec.f_kernel(0.5, 2)
        total = 2 * math.pi * hankel_integral(lambda t: kernel_eval(spec, t) * t, 0.0, 0.0)[0]
        assert total == pytest.approx(1.0, rel=1e-10)


class TestFourier:
    def test_bessel_potential_examples(self):
        xi = np.array([0.0, 1.0, 2.0])
        assert_allclose(radial_fourier(KernelSpec.bessel_potential(1.0, 3), xi),
                        (1 + xi * xi) ** -1.0, rtol=1e-8)

    def test_f_alpha_lambda_example(self):
        xi = np.array([0.5, 1.0, 3.0])
        assert_allclose(radial_fourier(KernelSpec.f_alpha_lambda(-0.25, 1.0, 2), xi),
                        (1 + xi * xi) ** -1.75, rtol=1e-8)

    def test_imq(self):
        xi = np.array([0.3, 1.0, 2.5])
        ref = (2 * math.pi) * bessel_potential_scipy(2.0, 1, xi)
        assert_allclose(radial_fourier(KernelSpec.imq(2.0, 1), xi), ref, rtol=1e-8)

    @pytest.mark.parametrize("spec", [KernelSpec.matern_norm(1.5, 2), KernelSpec.f_kernel(0.5, 3),
                                      KernelSpec.imq(2.0, 2), KernelSpec.matern(0.7, 1)],
                             ids=lambda s: s.describe())
    def test_positive_and_matches_closed_form(self, spec):
        xi = np.array([0.0, 0.5, 2.0, 6.0])
        got = radial_fourier(spec, xi)
        assert np.all(got > 0)
        assert_allclose(got, fourier_closed_form(spec, xi), rtol=1e-8)

    def test_negative_frequency(self):
        with pytest.raises(DomainError):
            radial_fourier(KernelSpec.imq(1.0), -1.0)


class TestConvolutions:
    @pytest.mark.parametrize("alpha,beta", [(1.0, 1.0), (1.0, 2.0), (0.5, 1.5)])
    @pytest.mark.parametrize("n", [1, 3])
    def test_semigroup(self, alpha, beta, n):
        assert convolution_check(alpha, beta, n, 1.3) <= 1e-6

    def test_r3_examples(self):
        pairs = r3_convolution_identities(1.0)
        for got, closed in pairs.values():
            assert got == pytest.approx(closed, rel=1e-8)
        assert pairs["first"][1] == pytest.approx(2 * math.pi / math.e)

    def test_domain(self):
        with pytest.raises(DomainError):
            convolution_check(0.0, 1.0, 3, 1.0)


class TestInnerProducts:
    def test_space_validation(self):
        with pytest.raises(DomainError):
            InnerProductSpace("Sobolev", 2, 1.0)
        with pytest.raises(DomainError):
            InnerProductSpace("KSpace", 1, 0.0)
        with pytest.raises(DomainError):
            InnerProductSpace("Besov", 1, 1.0)

    def test_l2_example(self):
        v = rkhs_inner(InnerProductSpace("L2", 3), KernelSpec.bessel_potential(1.0, 3),
                       [0, 0, 0], [1, 0, 0])
        assert v == pytest.approx(math.exp(-1) / (8 * math.pi), rel=1e-13)

    def test_l2_needs_square_integrable(self):
        with pytest.raises(DomainError):
            mapped_kernel(InnerProductSpace("L2", 4), KernelSpec.bessel_potential(1.0, 4))

    def test_f_kernel_l2(self):
        m = mapped_kernel(InnerProductSpace("L2", 2), KernelSpec.f_kernel(0.5, 2))
        assert (m.family, m.alpha) == ("f_kernel", 2.0)

    def test_sobolev_diagonal(self):
        space = InnerProductSpace("Sobolev", 3, 2.0)
        spec = KernelSpec.bessel_potential(2.0, 3)
        assert rkhs_inner(space, spec, [1, 2, 3], [1, 2, 3]) == pytest.approx(1 / (8 * math.pi))
        with pytest.raises(DomainError):
            rkhs_inner(space, KernelSpec.bessel_potential(2.5, 3), [0, 0, 0], [1, 0, 0])

    def test_kspace_diagonal(self):
        space = InnerProductSpace("KSpace", 2, 1.0)
        assert rkhs_inner(space, KernelSpec.imq(2.0, 2), [0.5, 0.5], [0.5, 0.5]) == 1.0
        with pytest.raises(DomainError):
            rkhs_inner(space, KernelSpec.imq(3.0, 2), [0, 0], [1, 0])

    def test_point_dimension(self):
        with pytest.raises(DomainError):
            rkhs_inner(InnerProductSpace("L2", 2), KernelSpec.bessel_potential(1.0, 2), [0], [1])

    @pytest.mark.parametrize("alpha", [0.3, 0.6, 1.1])
    @pytest.mark.parametrize("sep", [0.4, 1.0, 2.7])
    def test_l2_against_direct_convolution(self, alpha, sep):
        v = rkhs_inner(InnerProductSpace("L2", 1), KernelSpec.bessel_potential(alpha, 1), [0.0], [sep])
        assert v == pytest.approx(gramian_1d(alpha, sep), rel=1e-6)

    def test_membership_in_sobolev(self):
        # G_beta in H^alpha iff beta > (2 alpha + n)/4
        assert np.isfinite(sobolev_norm_sq(1.5, 1.0, 2))
        from hsmatern.quadrature import QuadratureConfig
        with pytest.raises(DivergenceError):
            sobolev_norm_sq(0.7, 1.0, 2, QuadratureConfig(tail_cut=1e6))


class TestLemmas:
    def test_l2_examples(self):
        assert l2_norm_sq(0.5, -0.5) == pytest.approx(math.pi / 4, rel=1e-12)
        assert l2_norm_sq_closed(1.0, 0.0) == pytest.approx(2 / 3, rel=1e-14)
        assert l2_norm_sq(1.0, 0.0) == pytest.approx(2 / 3, rel=1e-10)

    def test_l2_dimension_form(self):
        alpha, n = 0.25, 3
        closed_n = (math.sqrt(math.pi) * gamma(alpha + n / 2) * gamma(2 * alpha + n / 2)
                    * gamma(n / 2) / (4 * gamma(alpha + (n + 1) / 2)))
        assert l2_norm_sq_closed(alpha, n / 2 - 1) == pytest.approx(closed_n, rel=1e-14)

    def test_l2_domain(self):
        with pytest.raises(DomainError):
            l2_norm_sq(-1.0, 0.0)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=-0.9, max_value=3.0), st.floats(min_value=0.0, max_value=1.0))
    def test_l2_random(self, lam, u):
        lo = max(-(lam + 1) / 2 + 0.1, -1.5)
        alpha = lo + u * (2.5 - lo)
        assert l2_norm_sq(alpha, lam) == pytest.approx(l2_norm_sq_closed(alpha, lam), rel=1e-8)

    def test_moment_examples(self):
        assert moment_integral(0.0, 2.0) == pytest.approx(1.0, rel=1e-15)
        assert moment_integral(0.5, 1.5) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-15)
        assert moment_integral_quad(0.5, 1.5) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
        with pytest.raises(DomainError):
            moment_integral(1.0, 1.0)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=-2.0, max_value=2.0), st.floats(min_value=0.2, max_value=4.0))
    def test_moment_random(self, alpha, gap):
        beta = abs(alpha) + gap
        assert moment_integral_quad(alpha, beta) == pytest.approx(moment_integral(alpha, beta),
                                                                  rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_tail_masses(self, alpha, d):
        spec = KernelSpec.matern_norm(alpha)
        q = hankel_integral(lambda t: kernel_eval(spec, t) * t ** (d - 1), 0.0, 0.0)[0]
        assert matern_tail_mass(alpha, d) == pytest.approx(q, rel=1e-10)
        beta = d / 2 + alpha
        q = hankel_integral(lambda t: (1 + t * t) ** -beta * t ** (d - 1), 0.0, 0.0)[0]
        assert imq_tail_mass(beta, d) == pytest.approx(q, rel=1e-10)

    def test_imq_tail_diverges(self):
        with pytest.raises(DivergenceError):
            imq_tail_mass(1.0, 2)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 3.5])
    def test_complete_monotonicity(self, alpha):
        assert complete_monotonicity_check(alpha, np.linspace(0.0, 4.0, 41)) >= 0.0

    def test_complete_monotonicity_grid(self):
        with pytest.raises(DomainError):
            complete_monotonicity_check(1.0, [0.0, 0.1, 0.5])
