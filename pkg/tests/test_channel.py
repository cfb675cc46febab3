import logging
import math

import numpy as np
import pytest
from scipy import integrate, special

from src.errors import BoundaryError, InvalidParameter
from src.numerics import SeriesNumerics
from src.channel import (
    CorrelatedLink,
    MalagaParams,
    component_cdf,
    component_sf,
    coupling_constant,
    db_to_linear,
    derive_constants,
    irradiance_second_moment,
    joint_cdf,
    joint_pdf,
    marginal_cdf,
    marginal_pdf,
    marginal_sf,
    preset_params,
    small_scale_weights,
)


class TestParams:
    def test_scatter_power_of_the_presets(self):
        constants = derive_constants(preset_params("strong"))
        assert constants.xi == pytest.approx(2.0 * 0.423 * 0.16, rel=1e-14)
        assert constants.xi == pytest.approx(0.13536, rel=1e-12)
        assert not constants.degenerate

    def test_vanishing_scatter_is_flagged(self, caplog):
        params = MalagaParams(alpha=2.0, beta=2, b0=0.423, delta=1.0 - 1e-10, omega1=2.04)
        with caplog.at_level(logging.WARNING):
            assert derive_constants(params).degenerate
        assert "scattering power vanishes" in caplog.text

    def test_coupling_constant_against_hand_formula(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            alpha = rng.uniform(0.5, 10.0)
            beta = int(rng.integers(1, 8))
            b0 = rng.uniform(0.05, 1.0)
            delta = rng.uniform(0.05, 0.95)
            omega = rng.uniform(0.1, 3.0)
            omega1 = rng.uniform(0.1, 5.0)
            rho = rng.uniform(0.0, 0.95)
            params = MalagaParams(alpha=alpha, beta=beta, b0=b0, delta=delta, omega=omega, omega1=omega1)
            xi = 2.0 * b0 * (1.0 - delta)
            expected = beta / (omega * (xi * beta + omega1)) / (1.0 - rho * rho)
            link = CorrelatedLink(params=params, mu1=10.0, mu2=1.0, rho=rho)
            assert coupling_constant(link) == pytest.approx(expected, rel=1e-13)

    def test_los_power_from_phases(self):
        params = MalagaParams(alpha=2.0, beta=3, b0=0.4, delta=0.5, omega_prime=1.2, phi_a=0.3, phi_b=1.1)
        coupled = 2.0 * 0.4 * 0.5
        expected = 1.2 + coupled + 2.0 * math.sqrt(coupled * 1.2) * math.cos(0.3 - 1.1)
        assert params.los_power == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("kwargs", [
        dict(alpha=2.0, beta=1.5, b0=0.4, delta=0.5, omega1=1.0),
        dict(alpha=-1.0, beta=2, b0=0.4, delta=0.5, omega1=1.0),
        dict(alpha=2.0, beta=2, b0=0.4, delta=1.0, omega1=1.0),
        dict(alpha=2.0, beta=2, b0=0.4, delta=0.5),
        dict(alpha=2.0, beta=2, b0=0.4, delta=0.5, omega1=1.0, omega_prime=1.0),
    ])
    def test_invalid_params(self, kwargs):
        with pytest.raises(InvalidParameter):
            MalagaParams(**kwargs)

    @pytest.mark.parametrize("kwargs", [dict(mu1=0.0), dict(rho=1.0), dict(rho=-0.1), dict(mu2=math.inf)])
    def test_invalid_link(self, kwargs):
        fields = dict(params=preset_params("strong"), mu1=10.0, mu2=1.0, rho=0.5)
        fields.update(kwargs)
        with pytest.raises(InvalidParameter):
            CorrelatedLink(**fields)

    def test_unknown_preset(self):
        with pytest.raises(InvalidParameter):
            preset_params("calm")

    @pytest.mark.parametrize("preset", ["strong", "moderate", "weak"])
    def test_small_scale_weights_sum_to_one(self, preset):
        weights = small_scale_weights(preset_params(preset))
        assert weights.sum() == pytest.approx(1.0, rel=1e-14)
        assert np.all(weights >= 0.0)

    @pytest.mark.parametrize("preset", ["strong", "weak"])
    def test_second_moment_matches_closed_form(self, preset):
        params = preset_params(preset)
        k = np.arange(1, params.beta + 1)
        scale = params.small_scale_scale
        large = params.alpha * (params.alpha + 1.0) * params.omega ** 2
        small = float(np.dot(small_scale_weights(params), k * (k + 1.0))) * scale ** 2
        assert irradiance_second_moment(params) == pytest.approx(large * small, rel=1e-8)

    def test_db_conversion(self):
        assert db_to_linear(10.0) == pytest.approx(10.0)
        np.testing.assert_allclose(db_to_linear([0.0, 20.0]), [1.0, 100.0])


def _log_quad(fn, lo=-30.0, hi=12.0):
    """Integral of fn(g) dg over g = exp(u)."""
    value, _ = integrate.quad(lambda u: fn(math.exp(u)) * math.exp(u), lo, hi, limit=400,
                              epsabs=1e-13, epsrel=1e-10)
    return value


class TestMarginal:
    @pytest.mark.parametrize("preset", ["strong", "moderate", "weak"])
    def test_density_integrates_to_one(self, preset):
        params, mu = preset_params(preset), db_to_linear(10.0)
        total = _log_quad(lambda g: marginal_pdf(params, mu, g), math.log(mu) - 40.0, math.log(mu) + 12.0)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_mean_snr(self):
        params, mu = preset_params("moderate"), db_to_linear(10.0)
        mean = _log_quad(lambda g: g * marginal_pdf(params, mu, g), math.log(mu) - 40.0, math.log(mu) + 14.0)
        assert mean == pytest.approx(mu, rel=1e-6)

    @pytest.mark.parametrize("g", [0.05, 3.0, 40.0, 400.0])
    def test_cdf_is_integral_of_density(self, g):
        params, mu = preset_params("strong"), db_to_linear(10.0)
        integral = _log_quad(lambda x: marginal_pdf(params, mu, x), math.log(mu) - 70.0, math.log(g))
        assert marginal_cdf(params, mu, g) == pytest.approx(integral, rel=1e-7, abs=1e-12)

    def test_cdf_and_sf_are_complements(self):
        params, mu = preset_params("weak"), db_to_linear(10.0)
        g = np.array([0.01, 1.0, 10.0, 100.0])
        np.testing.assert_allclose(marginal_cdf(params, mu, g) + marginal_sf(params, mu, g), 1.0, atol=1e-10)

    def test_component_cdf_routes_agree_at_switch_point(self):
        x = math.sqrt(16.0 * 25.0)
        for shape, k in [(2.296, 1), (2.296, 2), (8.0, 4)]:
            assert component_cdf(shape, k, x) == pytest.approx(1.0 - component_sf(shape, k, x), abs=1e-9)

    @pytest.mark.parametrize("shape,k", [(2.0, 1), (3.0, 1), (4.0, 2), (6.0, 1), (8.0, 3)])
    @pytest.mark.parametrize("x", [2.0, 6.0, 10.0, 14.0])
    def test_component_cdf_with_integer_spaced_parameters(self, shape, k, x):
        assert component_cdf(shape, k, x) == pytest.approx(1.0 - component_sf(shape, k, x), abs=1e-6)

    def test_component_cdf_of_gamma_product(self):
        # Z = G_a G_b with unit scales; P[Z <= x] = E[P(G_a <= x / G_b)]
        shape, k, x = 3.1, 2, 4.0
        expected, _ = integrate.quad(
            lambda y: special.gammainc(shape, x / y) * y ** (k - 1) * math.exp(-y) / special.gamma(k),
            0.0, np.inf, epsabs=1e-14, epsrel=1e-12)
        assert component_cdf(shape, k, x) == pytest.approx(expected, rel=1e-9)


class TestJoint:
    def test_uncorrelated_is_product_of_marginals(self, make_link):
        link = make_link(rho=0.0)
        g1, g2 = np.array([0.5, 20.0, 300.0]), np.array([0.1, 2.0, 9.0])
        expected = marginal_pdf(link.params, link.mu1, g1) * marginal_pdf(link.params, link.mu2, g2)
        np.testing.assert_allclose(joint_pdf(link, g1, g2), expected, rtol=1e-14)

    def test_weak_correlation_limit(self, make_link):
        link = make_link(rho=1e-6)
        g1 = np.array([0.5, 20.0, 300.0, 2000.0])
        g2 = np.array([0.1, 2.0, 9.0, 30.0])
        expected = marginal_pdf(link.params, link.mu1, g1) * marginal_pdf(link.params, link.mu2, g2)
        np.testing.assert_allclose(joint_pdf(link, g1, g2), expected, rtol=1e-6)

    def test_joint_density_marginalizes(self, make_link):
        link = make_link(rho=0.5)
        for g1 in (3.0, 150.0):
            total = _log_quad(lambda g2: joint_pdf(link, g1, g2), math.log(link.mu2) - 40.0,
                              math.log(link.mu2) + 12.0)
            assert total == pytest.approx(marginal_pdf(link.params, link.mu1, g1), rel=1e-6)

    def test_exchanging_the_links_mirrors_the_density(self, make_link):
        link = make_link(mu1_db=15.0, mu2_db=5.0, rho=0.6)
        swapped = CorrelatedLink(params=link.params, mu1=link.mu2, mu2=link.mu1, rho=link.rho)
        g1 = np.array([0.5, 20.0, 300.0])
        g2 = np.array([0.1, 2.0, 9.0])
        np.testing.assert_allclose(joint_pdf(swapped, g2, g1), joint_pdf(link, g1, g2), rtol=1e-12)

    def test_joint_cdf_exchange_symmetry(self, make_link):
        link = make_link("weak", mu1_db=12.0, mu2_db=8.0, rho=0.5)
        swapped = CorrelatedLink(params=link.params, mu1=link.mu2, mu2=link.mu1, rho=link.rho)
        assert joint_cdf(swapped, 3.0, 40.0) == pytest.approx(joint_cdf(link, 40.0, 3.0), rel=1e-12)

    def test_broadcasting(self, strong_link):
        grid = joint_pdf(strong_link, np.array([[1.0], [10.0]]), np.array([0.5, 5.0, 50.0]))
        assert grid.shape == (2, 3)
        assert np.all(grid > 0.0)

    def test_boundary(self, strong_link):
        with pytest.raises(BoundaryError):
            joint_pdf(strong_link, 0.0, 1.0)

    def test_gamma_t_convention_changes_the_density(self, strong_link):
        default = joint_pdf(strong_link, 10.0, 2.0)
        shifted = joint_pdf(strong_link, 10.0, 2.0, SeriesNumerics(denominator_convention="gamma_t"))
        assert shifted != pytest.approx(default, rel=1e-3)

    def test_joint_cdf_limits(self, make_link):
        independent = make_link(rho=0.0)
        expected = (marginal_cdf(independent.params, independent.mu1, 50.0)
                    * marginal_cdf(independent.params, independent.mu2, 2.0))
        assert joint_cdf(independent, 50.0, 2.0) == pytest.approx(expected, rel=1e-14)
        correlated = make_link(rho=0.7)
        assert joint_cdf(correlated, 1e9, 1e9) == pytest.approx(1.0, abs=1e-9)
        assert joint_cdf(correlated, 50.0, 2.0) <= min(
            marginal_cdf(correlated.params, correlated.mu1, 50.0),
            marginal_cdf(correlated.params, correlated.mu2, 2.0)) + 1e-12
