"""Probability of non-zero secrecy capacity"""
import logging
import math

import numpy as np
from scipy import special

from src.errors import NumericalFailure
from src.numerics import SeriesNumerics, clamp_probability, sum_mixture
from src.specfun import MeijerParams, meijer_g
from src.channel.params import small_scale_weights

logger = logging.getLogger(__name__)

# Primary route inside this band is the Gauss hypergeometric form; the 5F4
# series behind the Meijer G route converges like (mu2/mu1)^n and is used outside
UNIT_BAND = (0.25, 4.0)

_LOG_2 = math.log(2.0)
_LOG_PI = math.log(math.pi)


def pair_below_meijer(shape, k1, k2, ratio, epsilon_shift=1e-6):
    """P[gamma1 <= gamma2] for one (t, k1, k2) component pair, Meijer G form.

    2^{2 shape + k1 + k2 - 4} / (pi^2 Gamma(shape)^2 Gamma(k1) Gamma(k2)) times
    G^{4,5}_{5,5}(mu2/mu1 | 1, 1 - shape/2, (1 - shape)/2, 1 - k2/2, (1 - k2)/2;
                          shape/2, (shape + 1)/2, k1/2, (k1 + 1)/2, 0).
    Returns NaN where the expansion cannot deliver the value.
    """
    params = MeijerParams(
        4, 5, 5, 5,
        (1.0, 1.0 - shape / 2.0, (1.0 - shape) / 2.0, 1.0 - k2 / 2.0, (1.0 - k2) / 2.0),
        (shape / 2.0, (shape + 1.0) / 2.0, k1 / 2.0, (k1 + 1.0) / 2.0, 0.0),
        epsilon_shift,
    )
    log_prefactor = ((2.0 * shape + k1 + k2 - 4.0) * _LOG_2 - 2.0 * _LOG_PI
                     - 2.0 * special.gammaln(shape) - special.gammaln(k1) - special.gammaln(k2))
    return meijer_g(params, ratio, log_scale=log_prefactor, strict=False)


def pair_below_hypergeometric(shape, k1, k2, ratio):
    """Same probability from its terminating Gauss hypergeometric form.

    With r = sqrt(mu2/mu1) <= 1,
        P = 1 - sum_{j<k1} C(k2+j-1, j) r^j B(shape+j, shape+k2) / B(shape, shape)
                * 2F1(k2+j, shape+j; 2 shape+k2+j; 1-r);
    for r > 1 the links swap roles and the sum at 1/r gives P directly.
    """
    r = math.sqrt(ratio)
    if r > 1.0:
        return _pair_above(shape, k2, k1, 1.0 / r)
    return 1.0 - _pair_above(shape, k1, k2, r)


def _pair_above(shape, k1, k2, r):
    total = 0.0
    log_norm = special.betaln(shape, shape)
    for j in range(int(k1)):
        log_coef = (math.log(special.comb(k2 + j - 1, j, exact=True))
                    + special.betaln(shape + j, shape + k2) - log_norm)
        if j:
            log_coef += j * math.log(r)
        total += math.exp(log_coef) * special.hyp2f1(k2 + j, shape + j, 2.0 * shape + k2 + j, 1.0 - r)
    return total


def pair_below(shape, k1, k2, ratio, epsilon_shift=1e-6):
    """2F1 form inside UNIT_BAND, Meijer G outside with the 2F1 form as fallback."""
    if UNIT_BAND[0] <= ratio <= UNIT_BAND[1]:
        return pair_below_hypergeometric(shape, k1, k2, ratio)
    value = pair_below_meijer(shape, k1, k2, ratio, epsilon_shift)
    if not (np.isfinite(value) and -1e-9 <= value <= 1.0 + 1e-9):
        logger.debug("G^{4,5}_{5,5} route unusable at shape=%g k=(%d,%d) ratio=%g; "
                     "using the 2F1 form", shape, k1, k2, ratio)
        value = pair_below_hypergeometric(shape, k1, k2, ratio)
    return float(value)


def pnzsc_exact(link, num=None):
    """P[gamma1 > gamma2]: one minus the mixture of per-component probabilities
    that the main link is the weaker one.

    Raises:
        ConvergenceError: the t-series did not settle within num.t_max.
        ProbabilityRangeError: the result left [0, 1] beyond rounding.
    """
    num = num or SeriesNumerics()
    params = link.params
    weights = small_scale_weights(params)
    ratio = link.mu2 / link.mu1

    def term(t):
        shape = params.alpha + t
        total = 0.0
        for k1, w1 in enumerate(weights, start=1):
            for k2, w2 in enumerate(weights, start=1):
                if w1 == 0.0 or w2 == 0.0:
                    continue
                probability = pair_below(shape, k1, k2, ratio, num.epsilon_shift)
                if not np.isfinite(probability):
                    raise NumericalFailure(f"pnzsc_exact failed at t={t}, k=({k1},{k2})",
                                           {"t": t, "k1": k1, "k2": k2, "ratio": ratio})
                total += w1 * w2 * probability
        return total

    mix = sum_mixture(params.alpha, link.rho, num, term, "pnzsc_exact", term_bound=1.0)
    return clamp_probability(1.0 - mix.value, "PNZSC")
