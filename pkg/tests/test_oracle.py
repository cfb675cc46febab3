import math

import numpy as np
import pytest

from src.errors import InvalidParameter, NumericalFailure
from src.numerics import SeriesNumerics
from src.secrecy import SecrecyTarget, pnzsc_exact, sop_exact
from src.oracle import (
    AdaptiveCubature,
    McEstimate,
    normalization_check,
    pnzsc_mc,
    sop_mc,
    sop_quad2d,
)


class TestMonteCarlo:
    def test_standard_error(self):
        estimate = McEstimate(value=0.25, std_error=math.sqrt(0.25 * 0.75 / 10_000), samples=10_000, seed=1)
        assert estimate.within(0.25 + 2.9 * estimate.std_error)
        assert not estimate.within(0.25 + 3.1 * estimate.std_error)

    def test_too_few_samples(self, strong_link):
        with pytest.raises(InvalidParameter):
            sop_mc(strong_link, SecrecyTarget(rs=0.1), 9_999, seed=1)

    def test_symmetric_links(self, make_link):
        link = make_link(mu1_db=10.0, mu2_db=10.0, rho=0.0)
        estimate = sop_mc(link, SecrecyTarget(rs=0.0), 400_000, seed=42)
        assert estimate.within(0.5)
        assert pnzsc_mc(link, 400_000, seed=42).within(0.5)

    def test_pnzsc_is_complement_on_the_same_stream(self, strong_link):
        sop = sop_mc(strong_link, SecrecyTarget(rs=0.0), 50_000, seed=4)
        pnz = pnzsc_mc(strong_link, 50_000, seed=4)
        assert pnz.value + sop.value == pytest.approx(1.0, abs=1e-12)

    def test_seed_reproducibility(self, strong_link):
        target = SecrecyTarget(rs=0.2)
        assert sop_mc(strong_link, target, 20_000, seed=3) == sop_mc(strong_link, target, 20_000, seed=3)

    def test_high_snr_outage_is_small(self, make_link):
        target = SecrecyTarget(rs=0.1)
        high = sop_mc(make_link(mu1_db=60.0, mu2_db=5.0), target, 100_000, seed=42)
        low = sop_mc(make_link(mu1_db=30.0, mu2_db=5.0), target, 100_000, seed=42)
        assert high.value < 0.01
        assert high.value < low.value

    def test_pnzsc_with_a_stronger_eavesdropper(self, make_link):
        link = make_link("strong", mu1_db=10.0, mu2_db=16.0, rho=0.3)
        assert pnzsc_mc(link, 300_000, seed=42).within(pnzsc_exact(link))

    @pytest.mark.parametrize("preset,rho,rs", [("strong", 0.5, 0.1), ("weak", 0.3, 0.5)])
    def test_exact_within_three_standard_errors(self, make_link, preset, rho, rs):
        link = make_link(preset, mu1_db=10.0, mu2_db=5.0, rho=rho)
        target = SecrecyTarget(rs=rs)
        assert sop_mc(link, target, 300_000, seed=42).within(sop_exact(link, target).value)
        assert pnzsc_mc(link, 300_000, seed=42).within(pnzsc_exact(link))


class TestAdaptiveCubature:
    def test_smooth_integrand(self):
        value, error = AdaptiveCubature(lambda u, v: np.exp(u + v), abs_tol=1e-10).integrate()
        assert value == pytest.approx((math.e - 1.0) ** 2, abs=1e-10)
        assert error <= 1e-10

    def test_kinked_integrand_is_refined(self):
        cubature = AdaptiveCubature(lambda u, v: np.abs(u - 0.3) * np.ones_like(v), abs_tol=1e-7)
        value, _ = cubature.integrate()
        assert value == pytest.approx(0.3 ** 2 / 2.0 + 0.7 ** 2 / 2.0, abs=1e-7)
        assert cubature.evaluations > 2 * (15 * 15 + 7 * 7)

    def test_exhausted_refinement_reports_tolerance(self):
        cubature = AdaptiveCubature(lambda u, v: (u < 1.0 / 3.0).astype(float) * np.ones_like(v),
                                    abs_tol=1e-12, max_levels=3)
        with pytest.raises(NumericalFailure) as info:
            cubature.integrate()
        assert info.value.diagnostics["achieved_tolerance"] > 1e-12


class TestQuad2d:
    def test_rejects_tiny_tolerance(self, strong_link):
        with pytest.raises(InvalidParameter):
            sop_quad2d(strong_link, SecrecyTarget(rs=0.1), abs_tol=1e-9)

    def test_independent_links_normalize(self, make_link):
        assert abs(normalization_check(make_link(rho=0.0), abs_tol=1e-7)) < 1e-6

    def test_correlated_links_normalize(self, make_link):
        assert abs(normalization_check(make_link(rho=0.5), abs_tol=1e-5)) < 1e-3

    def test_gamma_t_convention_shows_up_as_deviation(self, make_link):
        link = make_link(rho=0.5)
        deviation = normalization_check(link, SeriesNumerics(denominator_convention="gamma_t"), abs_tol=1e-5)
        mean_index = link.params.alpha * 0.25 / 0.75
        assert deviation == pytest.approx(mean_index - 1.0, abs=1e-3)

    def test_full_quadrant(self, strong_link):
        value = sop_quad2d(strong_link, SecrecyTarget(rs=0.1), abs_tol=1e-5, full_quadrant=True)
        assert value == pytest.approx(1.0, abs=1e-3)

    def test_symmetric_links(self, make_link):
        link = make_link(mu1_db=10.0, mu2_db=10.0, rho=0.05)
        assert sop_quad2d(link, SecrecyTarget(rs=0.0), abs_tol=1e-6) == pytest.approx(0.5, abs=2e-6)

    @pytest.mark.parametrize("preset,rho,mu1_db,rs", [
        ("strong", 0.5, 20.0, 0.5),
        ("weak", 0.1, 10.0, 0.0),
    ])
    def test_matches_exact(self, make_link, preset, rho, mu1_db, rs):
        link = make_link(preset, mu1_db=mu1_db, mu2_db=5.0, rho=rho)
        target = SecrecyTarget(rs=rs)
        assert sop_exact(link, target).value == pytest.approx(sop_quad2d(link, target), rel=1e-3)

    @pytest.mark.slow
    @pytest.mark.parametrize("preset", ["strong", "weak"])
    @pytest.mark.parametrize("rho", [0.0, 0.3, 0.6, 0.9])
    def test_normalization_grid(self, make_link, preset, rho):
        link = make_link(preset, mu1_db=10.0, mu2_db=10.0, rho=rho)
        assert abs(normalization_check(link, abs_tol=1e-5)) < 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("preset", ["strong", "weak"])
    @pytest.mark.parametrize("rho", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("mu1_db", [10.0, 30.0, 50.0])
    @pytest.mark.parametrize("rs", [0.0, 0.5])
    def test_oracle_grid(self, make_link, preset, rho, mu1_db, rs):
        link = make_link(preset, mu1_db=mu1_db, mu2_db=5.0, rho=rho)
        target = SecrecyTarget(rs=rs)
        exact = sop_exact(link, target).value
        assert exact == pytest.approx(sop_quad2d(link, target, abs_tol=max(1e-8, exact * 1e-5)), rel=1e-3)
        assert sop_mc(link, target, 1_000_000, seed=42).within(exact)
        if rs == 0.0:
            assert pnzsc_exact(link) == pytest.approx(1.0 - exact, abs=1e-4)
