"""Instantaneous secrecy rate and the exact secrecy outage probability"""
import logging
import math

import numpy as np
from scipy import special

from src.errors import InvalidParameter, NumericalFailure
from src.numerics import (
    KummerConvention,
    SeriesNumerics,
    clamp_probability,
    mixture_log_weight,
    sum_mixture,
)
from src.specfun import halfrange_gauss_rule, log_kummer_u
from src.channel.density import component_cdf
from src.channel.params import link_scales, small_scale_weights
from src.secrecy.models import SopResult

logger = logging.getLogger(__name__)

_LOG_2 = math.log(2.0)
_LOG_SQRT_PI = 0.5 * math.log(math.pi)


def secrecy_rate(g1, g2):
    """[ln(1 + g1) - ln(1 + g2)]^+ in nats."""
    if not (g1 >= 0.0 and g2 >= 0.0):
        raise InvalidParameter("g1/g2", f"SNRs must be >= 0, got {g1}, {g2}")
    return max(math.log1p(g1) - math.log1p(g2), 0.0)


def log_outer_density(shape, k, nodes, convention=KummerConvention.DERIVED):
    """Log of the wiretap-link component density after the change of variables
    gamma2 = s^8 / (16 a2^2), with the exp(-s^2) weight taken out:

        2^{3-2k} sqrt(pi) / (Gamma(shape) Gamma(k)) s^{4 shape - 1} U(v + 1/2, 2v + 1; 2 s^2),

    v = shape - k. The printed convention swaps U for U((v+1)/2, v+1; 2 s^2).
    """
    v = shape - k
    z = 2.0 * nodes * nodes
    if KummerConvention(convention) is KummerConvention.DERIVED:
        log_u = log_kummer_u(v + 0.5, 2.0 * v + 1.0, z)
    else:
        log_u = log_kummer_u((v + 1.0) / 2.0, v + 1.0, z)
    return ((3.0 - 2.0 * k) * _LOG_2 + _LOG_SQRT_PI - special.gammaln(shape) - special.gammaln(k)
            + (4.0 * shape - 1.0) * np.log(nodes) + log_u)


def outage_nodes(link, target, quad_order):
    """Quadrature nodes, log weights and the main-link arguments at each node."""
    rule = halfrange_gauss_rule(quad_order)
    nodes = rule.nodes_array
    a1, a2 = link_scales(link)
    gamma2 = nodes ** 8 / (16.0 * a2 * a2)
    gamma1 = target.theta * (1.0 + gamma2) - 1.0
    return nodes, np.log(rule.weights_array), gamma1, a1


def sop_exact(link, target, num=None):
    """Secrecy outage probability P[gamma1 <= Theta gamma2 + Theta - 1].

    Each mixture term pairs a half-range Gauss sum over the wiretap-link
    component density with the main-link component distribution function
    evaluated at the outage threshold.

    Raises:
        ConvergenceError: the t-series did not settle within num.t_max.
        NumericalFailure: a special-function evaluation failed; the
            diagnostics name the (t, k) term.
        ProbabilityRangeError: the result left [0, 1] beyond rounding.
    """
    num = num or SeriesNumerics()
    params = link.params
    weights = small_scale_weights(params)
    nodes, log_weights, gamma1, a1 = outage_nodes(link, target, num.quad_order)
    x1 = a1 * np.sqrt(gamma1)
    residuals = {}

    def term(t):
        shape = params.alpha + t
        cdf = np.zeros_like(nodes)
        outer = np.zeros_like(nodes)
        residual = 0.0
        for k, weight in enumerate(weights, start=1):
            if weight == 0.0:
                continue
            try:
                cdf += weight * component_cdf(shape, k, x1, num.epsilon_shift)
                component = np.exp(log_weights + log_outer_density(shape, k, nodes, num.kummer_convention))
            except NumericalFailure as e:
                raise NumericalFailure(f"sop_exact failed at t={t}, k={k}: {e}",
                                       {**e.diagnostics, "t": t, "k": k}) from e
            mass = float(component.sum())
            residual = max(residual, abs(mass - 1.0))
            if num.normalize_outer and mass > 0.0:
                component = component / mass
            outer += weight * component
        residuals[t] = residual
        return float(np.dot(outer, cdf))

    mix = sum_mixture(params.alpha, link.rho, num, term, "sop_exact", term_bound=1.0)
    diagnostics = {
        "term_magnitudes": mix.term_magnitudes,
        "quadrature_residual": _weighted_residual(params.alpha, link.rho, num, residuals),
        "quad_order": num.quad_order,
        "kummer_convention": num.kummer_convention.value,
        "normalize_outer": num.normalize_outer,
    }
    if diagnostics["quadrature_residual"] > 1e-3:
        logger.warning("sop_exact: quadrature mass off by %.3g; raise quad_order or check the "
                       "Kummer convention", diagnostics["quadrature_residual"])
    return SopResult(value=clamp_probability(mix.value, "SOP"), terms_used=mix.terms_used,
                     diagnostics=diagnostics)


def _weighted_residual(alpha, rho, num, residuals):
    """Mixture-weighted deviation of the outer quadrature mass from one."""
    if rho == 0.0:
        return residuals[0]
    return float(sum(math.exp(mixture_log_weight(alpha, rho, t, num.denominator_convention)) * r
                     for t, r in residuals.items()))
