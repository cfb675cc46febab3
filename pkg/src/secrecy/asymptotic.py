"""High-SNR secrecy outage: leading residue terms and the diversity slope

As mu1 grows the main-link argument of every component distribution
function shrinks, every pFq in its residue expansion tends to one, and only
the leading power x^{b_h} of each of the four residue terms survives. Each
survivor scales as mu1^{-b_h}; the smallest exponent, min(alpha/2, 1/2),
sets the slope of log10(SOP) per decade of mu1.
"""
import logging
import math
from collections import defaultdict

import numpy as np
from scipy import special

from src.errors import InvalidParameter
from src.numerics import SeriesNumerics, mixture_log_weight, sum_mixture
from src.specfun.gamma import log_gamma_split_terms
from src.specfun.meijer import confluence_ranks
from src.channel.params import coupling_constant, irradiance_second_moment, small_scale_weights
from src.secrecy.models import AsymptoticResult
from src.secrecy.outage import log_outer_density, outage_nodes

logger = logging.getLogger(__name__)

VALIDITY_DB = 35.0
SCOPES = ("series", "dominant")

_LOG_2 = math.log(2.0)
_LOG_PI = math.log(math.pi)
_LOG_MAX = math.log(np.finfo(float).max)


def asymptotic_slope(alpha):
    """Decades of SOP lost per decade of mu1 at high SNR."""
    return min(alpha / 2.0, 0.5)


def leading_log_terms(shape, k, epsilon_shift):
    """leading_terms with each coefficient as (exponent, sign, log|coefficient|)."""
    b = np.array([shape / 2.0, (shape + 1.0) / 2.0, k / 2.0, (k + 1.0) / 2.0])
    log_prefactor = ((shape + k - 2.0) * _LOG_2 - _LOG_PI
                     - special.gammaln(shape) - special.gammaln(k))
    ranks = confluence_ranks(tuple(b), epsilon_shift)
    regularized = bool(np.any(ranks))
    shifts = [(1.0, np.zeros(4))] if not regularized else [
        (0.5, ranks * epsilon_shift), (0.5, -ranks * epsilon_shift)]
    terms = []
    for share, shift in shifts:
        for h in range(4):
            bh = b[h] + shift[h]
            log_mag, sign, _ = log_gamma_split_terms(
                [(b[g] - b[h], shift[g] - shift[h]) for g in range(4) if g != h])
            terms.append((float(bh), sign, math.log(share) + log_prefactor + log_mag - math.log(bh)))
    return terms, regularized


def leading_terms(shape, k, epsilon_shift):
    """(exponent, signed coefficient) pairs of the small-argument expansion of
    the component distribution function in powers of y = x^2/16.

    Coefficient h is 2^{shape+k-2} / (pi Gamma(shape) Gamma(k)) *
    prod_{g != h} Gamma(b_g - b_h) / b_h over b = (shape/2, (shape+1)/2, k/2,
    (k+1)/2). Integer-spaced exponents are split by +/- epsilon_shift; both
    shifted sets are returned with half weight, so the poles cancel in the sum
    and leave the logarithmic finite part. The second item reports whether
    that happened.
    """
    log_terms, regularized = leading_log_terms(shape, k, epsilon_shift)
    return [(bh, sign * math.exp(log_coef)) for bh, sign, log_coef in log_terms], regularized


def sop_asymptotic(link, target, num=None, scope="series"):
    """Asymptotic secrecy outage probability and slope.

    Args:
        link: CorrelatedLink; meaningful when mu1 is large
        target: SecrecyTarget
        num: SeriesNumerics
        scope: "series" keeps the leading residue terms of every mixture
            index t and every small-scale pair (k1, k2); "dominant" keeps only
            t = 0, k1 = k2 = 1

    Returns:
        AsymptoticResult with the value at link.mu1, the slope
        min(alpha/2, 1/2) and the aggregated (exponent, coefficient) terms;
        coefficients past float range are left out of the terms.
    """
    if scope not in SCOPES:
        raise InvalidParameter("scope", f"must be one of {SCOPES}, got {scope!r}")
    num = num or SeriesNumerics()
    params = link.params
    if link.mu1 < 10.0 ** (VALIDITY_DB / 10.0):
        logger.warning("sop_asymptotic: mu1 = %.1f dB is below %.0f dB; the high-SNR form may be loose",
                       10.0 * math.log10(link.mu1), VALIDITY_DB)

    weights = small_scale_weights(params)
    nodes, log_weights, gamma1, _ = outage_nodes(link, target, num.quad_order)
    # a1^2 gamma1 / 16 = exp(log_base) * gamma1 / mu1
    log_base = math.log(coupling_constant(link) ** 2 * irradiance_second_moment(params) / 16.0)
    log_mu1 = math.log(link.mu1)
    log_gamma1 = np.log(gamma1)
    exponent_terms = defaultdict(float)
    flags = {"regularized": False}

    def pair_contribution(t, k1, k2, weight, log_t_weight=0.0):
        shape = params.alpha + t
        log_outer = log_weights + log_outer_density(shape, k2, nodes, num.kummer_convention)
        if num.normalize_outer:
            log_outer = log_outer - special.logsumexp(log_outer)
        terms, regularized = leading_log_terms(shape, k1, num.epsilon_shift)
        flags["regularized"] |= regularized
        if weight <= 0.0:
            return 0.0
        log_weight = math.log(weight)
        total = 0.0
        for exponent, sign, log_coef in terms:
            log_moment = special.logsumexp(log_outer + exponent * log_gamma1)
            log_value = log_weight + log_coef + exponent * log_base + log_moment
            coefficient = log_t_weight + log_value
            if coefficient < _LOG_MAX:
                exponent_terms[exponent] += sign * math.exp(coefficient)
            total += sign * math.exp(min(log_value - exponent * log_mu1, _LOG_MAX))
        return total

    if scope == "dominant":
        log_weight = mixture_log_weight(params.alpha, link.rho, 0, num.denominator_convention)
        t_weight = 1.0 if link.rho == 0.0 else math.exp(log_weight)
        weight = t_weight * weights[0] * weights[0]
        value = pair_contribution(0, 1, 1, weight)
        terms_used = 1
    else:
        def term(t):
            log_weight = mixture_log_weight(params.alpha, link.rho, t, num.denominator_convention)
            log_t_weight = 0.0 if link.rho == 0.0 else log_weight
            total = 0.0
            for k1, w1 in enumerate(weights, start=1):
                for k2, w2 in enumerate(weights, start=1):
                    if w1 > 0.0 and w2 > 0.0:
                        total += pair_contribution(t, k1, k2, w1 * w2, log_t_weight)
            return total

        # sum_mixture applies the t weight itself
        mix = sum_mixture(params.alpha, link.rho, num, term, "sop_asymptotic")
        value, terms_used = mix.value, mix.terms_used

    slope = asymptotic_slope(params.alpha)
    terms = sorted(exponent_terms.items())
    diagnostics = {
        "scope": scope,
        "terms_used": terms_used,
        "regularized": flags["regularized"],
        "leading_exponent": terms[0][0] if terms else math.nan,
    }
    return AsymptoticResult(value=float(value), slope=slope, terms=terms, diagnostics=diagnostics)
