import math

import pytest

from src.errors import ConvergenceError, InvalidParameter
from src.numerics import SeriesNumerics, mixture_log_weight, mixture_tail_mass, sum_mixture, truncation_limit
from src.secrecy import (
    SecrecyTarget,
    classify_profile,
    critical_rho,
    pnzsc_exact,
    secrecy_rate,
    sop_exact,
)
from src.secrecy.pnzsc import pair_below, pair_below_hypergeometric, pair_below_meijer


class TestSecrecyRate:
    @pytest.mark.parametrize("g1,g2,expected", [(5.0, 5.0, 0.0), (math.e - 1.0, 0.0, 1.0), (1.0, 3.0, 0.0)])
    def test_examples(self, g1, g2, expected):
        assert secrecy_rate(g1, g2) == pytest.approx(expected, abs=1e-15)

    def test_negative_snr(self):
        with pytest.raises(InvalidParameter):
            secrecy_rate(-1.0, 2.0)


class TestTarget:
    def test_theta(self):
        assert SecrecyTarget(rs=0.5).theta == pytest.approx(math.exp(0.5))

    def test_from_bits(self):
        assert SecrecyTarget.from_bits(1.0).rs == pytest.approx(math.log(2.0))

    @pytest.mark.parametrize("rs", [-0.1, math.inf, math.nan])
    def test_invalid_rate(self, rs):
        with pytest.raises(InvalidParameter):
            SecrecyTarget(rs=rs)


class TestSeriesNumerics:
    @pytest.mark.parametrize("kwargs", [dict(rel_tol=1e-3), dict(quad_order=65), dict(t_max=0),
                                        dict(epsilon_shift=1e-3)])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameter):
            SeriesNumerics(**kwargs)

    def test_conventions_from_strings(self):
        num = SeriesNumerics(denominator_convention="gamma_t", kummer_convention="printed")
        assert num.denominator_convention.value == "gamma_t"
        assert num.kummer_convention.value == "printed"

    @pytest.mark.parametrize("convention", ["factorial_t", "gamma_t"])
    def test_tail_mass_matches_the_weights(self, convention):
        alpha, rho, t = 8.0, 0.9, 40
        weights = [math.exp(mixture_log_weight(alpha, rho, s, convention)) for s in range(t + 1, 4000)]
        assert mixture_tail_mass(alpha, rho, t, convention) == pytest.approx(math.fsum(weights), rel=1e-9)

    def test_t_max_is_a_floor_unless_strict(self):
        adaptive = truncation_limit(8.0, 0.9, SeriesNumerics())
        assert adaptive > 120
        assert mixture_tail_mass(8.0, 0.9, adaptive, "factorial_t") <= 1e-18
        assert truncation_limit(8.0, 0.9, SeriesNumerics(adaptive_t_max=False)) == 120
        assert truncation_limit(2.296, 0.1, SeriesNumerics()) == 120

    def test_bounded_terms_stop_on_the_weight_tail(self):
        num = SeriesNumerics(rel_tol=1e-6)
        mix = sum_mixture(2.0, 0.5, num, lambda t: 1.0, term_bound=1.0)
        assert mix.value == pytest.approx(1.0, abs=1e-6)
        assert mixture_tail_mass(2.0, 0.5, mix.terms_used - 1) <= 1e-6 * mix.value


class TestSopExact:
    @pytest.mark.parametrize("preset", ["strong", "weak"])
    def test_equal_links_give_one_half(self, make_link, preset):
        link = make_link(preset, mu1_db=10.0, mu2_db=10.0, rho=1e-6)
        assert sop_exact(link, SecrecyTarget(rs=0.0)).value == pytest.approx(0.5, abs=1e-3)

    def test_decreasing_in_mu1(self, make_link):
        target = SecrecyTarget(rs=0.1)
        values = [sop_exact(make_link(mu1_db=mu1, rho=0.5), target).value for mu1 in (10.0, 20.0, 30.0)]
        assert values[0] > values[1] > values[2]

    def test_increasing_in_mu2_and_rate(self, make_link):
        link = make_link(mu1_db=20.0, rho=0.5)
        base = sop_exact(link, SecrecyTarget(rs=0.1)).value
        assert sop_exact(link.with_mu(mu2=link.mu2 * 4.0), SecrecyTarget(rs=0.1)).value > base
        assert sop_exact(link, SecrecyTarget(rs=0.5)).value > base

    def test_result_in_unit_interval(self, make_link):
        result = sop_exact(make_link("moderate", mu1_db=5.0, mu2_db=15.0, rho=0.3), SecrecyTarget(rs=1.0))
        assert 0.0 <= result.value <= 1.0

    def test_diagnostics(self, strong_link):
        result = sop_exact(strong_link, SecrecyTarget(rs=0.1))
        assert result.terms_used == len(result.diagnostics["term_magnitudes"])
        assert result.diagnostics["quad_order"] == 30
        assert result.diagnostics["kummer_convention"] == "derived"
        assert 0.0 <= result.diagnostics["quadrature_residual"] < 0.05

    def test_printed_kummer_convention_is_selectable(self, strong_link):
        target = SecrecyTarget(rs=0.1)
        derived = sop_exact(strong_link, target).value
        printed = sop_exact(strong_link, target, SeriesNumerics(kummer_convention="printed")).value
        assert printed != derived

    def test_truncation_reports_partial_value(self, make_link):
        with pytest.raises(ConvergenceError) as info:
            sop_exact(make_link(rho=0.9), SecrecyTarget(rs=0.1), SeriesNumerics(t_max=2, adaptive_t_max=False))
        assert info.value.terms_used == 3
        assert 0.0 < info.value.partial_value < 1.0

    def test_partial_sums_grow_toward_the_converged_value(self, make_link):
        link = make_link("weak", mu1_db=30.0, rho=0.7)
        target = SecrecyTarget(rs=0.1)
        partial = []
        for t_max in (5, 10, 20):
            with pytest.raises(ConvergenceError) as info:
                sop_exact(link, target, SeriesNumerics(t_max=t_max, adaptive_t_max=False))
            partial.append(info.value.partial_value)
        converged = [sop_exact(link, target, SeriesNumerics(t_max=t_max)).value for t_max in (60, 120, 240)]
        assert partial == sorted(partial)
        assert partial[-1] < converged[0]
        assert converged[2] == pytest.approx(converged[0], rel=1e-9)

    @pytest.mark.slow
    def test_strong_correlation_extends_past_t_max(self, make_link):
        result = sop_exact(make_link("weak", mu1_db=70.0, rho=0.9), SecrecyTarget(rs=0.1))
        assert 0.0 < result.value < 1.0
        assert result.terms_used > SeriesNumerics().t_max + 1


class TestPnzsc:
    @pytest.mark.parametrize("preset", ["strong", "moderate"])
    def test_equal_links_give_one_half(self, make_link, preset):
        assert pnzsc_exact(make_link(preset, mu1_db=10.0, mu2_db=10.0, rho=1e-6)) == pytest.approx(0.5, abs=1e-3)

    def test_strong_main_link(self, make_link):
        assert pnzsc_exact(make_link("moderate", mu1_db=60.0, mu2_db=0.0, rho=0.5)) > 0.999

    @pytest.mark.parametrize("preset,mu1_db,mu2_db,rho", [
        ("strong", 30.0, 5.0, 0.5),
        ("strong", 10.0, 5.0, 0.1),
        ("weak", 10.0, 5.0, 0.3),
        ("moderate", 5.0, 20.0, 0.6),
    ])
    def test_complement_of_zero_rate_outage(self, make_link, preset, mu1_db, mu2_db, rho):
        link = make_link(preset, mu1_db=mu1_db, mu2_db=mu2_db, rho=rho)
        sop = sop_exact(link, SecrecyTarget(rs=0.0)).value
        assert pnzsc_exact(link) == pytest.approx(1.0 - sop, abs=1e-4)

    @pytest.mark.parametrize("mu2_db,expected", [(12.0, 0.4408), (13.0, 0.4116), (16.0, 0.3280)])
    def test_weaker_main_link(self, make_link, mu2_db, expected):
        link = make_link("strong", mu1_db=10.0, mu2_db=mu2_db, rho=0.3)
        value = pnzsc_exact(link)
        assert value == pytest.approx(expected, abs=2e-3)
        assert value == pytest.approx(1.0 - sop_exact(link, SecrecyTarget(rs=0.0)).value, abs=1e-4)

    @pytest.mark.parametrize("ratio", [0.05, 0.3, 1.7, 3.9, 20.0])
    @pytest.mark.parametrize("k1,k2", [(1, 2), (2, 1), (2, 2)])
    def test_exchanging_the_links_complements_the_pair(self, ratio, k1, k2):
        for shape in (2.296, 8.0):
            total = pair_below(shape, k1, k2, ratio) + pair_below(shape, k2, k1, 1.0 / ratio)
            assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("k1,k2", [(1, 1), (2, 1), (1, 2), (2, 2)])
    @pytest.mark.parametrize("ratio", [0.05, 20.0])
    def test_meijer_and_hypergeometric_forms_agree(self, k1, k2, ratio):
        shape = 2.296
        assert pair_below_meijer(shape, k1, k2, ratio) == pytest.approx(
            pair_below_hypergeometric(shape, k1, k2, ratio), rel=1e-6, abs=1e-10)

    def test_unit_ratio_pair(self):
        for shape in (2.296, 8.0):
            assert pair_below_hypergeometric(shape, 1, 1, 1.0) == pytest.approx(0.5, abs=1e-14)


class TestCriticalRho:
    def test_single_point_grid_echoes(self, strong_link):
        result = critical_rho(strong_link, SecrecyTarget(rs=0.1), grid=[0.3])
        assert result.rho_star == 0.3
        assert len(result.curve) == 1

    def test_short_grid_warns(self, strong_link, caplog):
        critical_rho(strong_link, SecrecyTarget(rs=0.1), grid=[0.1, 0.2])
        assert "grid point" in caplog.text

    @pytest.mark.parametrize("grid", [[], [0.5, 0.2], [0.2, 1.0]])
    def test_invalid_grid(self, strong_link, grid):
        with pytest.raises(InvalidParameter):
            critical_rho(strong_link, SecrecyTarget(rs=0.1), grid=grid)

    def test_curve_follows_grid_order(self, strong_link):
        grid = [0.0, 0.2, 0.4, 0.6]
        result = critical_rho(strong_link, SecrecyTarget(rs=0.1), grid=grid, max_workers=3)
        assert [rho for rho, _ in result.curve] == grid
        expected = [sop_exact(strong_link.with_rho(r), SecrecyTarget(rs=0.1)).value for r in grid]
        assert [value for _, value in result.curve] == expected

    def test_pnzsc_curve_and_its_minimum(self, make_link):
        link = make_link("strong", mu1_db=20.0, mu2_db=10.0, rho=0.0)
        grid = [0.0, 0.3, 0.6, 0.9]
        result = critical_rho(link, None, grid=grid, metric="pnzsc")
        values = [pnzsc_exact(link.with_rho(r)) for r in grid]
        assert result.metric == "pnzsc"
        assert [value for _, value in result.curve] == values
        assert result.rho_star == grid[values.index(min(values))]

    def test_unknown_metric(self, strong_link):
        with pytest.raises(InvalidParameter):
            critical_rho(strong_link, SecrecyTarget(rs=0.1), grid=[0.3], metric="capacity")

    @pytest.mark.slow
    def test_pnzsc_recovers_toward_full_correlation(self, make_link):
        link = make_link("strong", mu1_db=20.0, mu2_db=10.0, rho=0.0)
        result = critical_rho(link, None, metric="pnzsc")
        lowest = min(value for _, value in result.curve)
        assert result.rho_star < 0.95
        assert result.curve[-1][1] > lowest

    @pytest.mark.slow
    def test_strong_correlation_improves_after_the_peak(self, make_link):
        results = {}
        for preset in ("strong", "weak"):
            link = make_link(preset, mu1_db=45.0, mu2_db=5.0, rho=0.0)
            results[preset] = critical_rho(link, SecrecyTarget(rs=0.1))
            assert results[preset].is_up_down
        assert results["weak"].rho_star < results["strong"].rho_star


@pytest.mark.parametrize("values,shape", [
    ([1.0, 2.0, 3.0, 2.5], "up-down"),
    ([0.9, 0.8, 0.85, 0.95], "down-up"),
    ([1.0, 2.0, 3.0], "increasing"),
    ([3.0, 2.0, 1.0], "decreasing"),
    ([1.0, 1.0], "flat"),
    ([1.0, 3.0, 2.0, 4.0], "irregular"),
    ([0.7], "flat"),
])
def test_classify_profile(values, shape):
    assert classify_profile(values) == shape
