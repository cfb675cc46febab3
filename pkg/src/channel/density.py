"""Joint and marginal SNR densities and distribution functions

Given the mixture index t, each link's SNR is a finite mixture over the
small-scale index k of components whose root a*sqrt(gamma) is the product of
independent unit-scale Gamma(alpha+t) and Gamma(k) variables. A component
density is a G^{2,0}_{0,2} factor; its distribution function is a
G^{4,1}_{1,5} evaluation or, in the upper range, a finite Bessel K tail sum.
"""
import logging
import math

import numpy as np
from scipy import special

from src.errors import BoundaryError, InvalidParameter
from src.numerics import SeriesNumerics, sum_mixture
from src.specfun import MeijerParams, meijer_g
from src.channel.params import link_scales, marginal_scale, small_scale_weights

logger = logging.getLogger(__name__)

# largest X^2/16 handed to the G^{4,1}_{1,5} expansion before the tail sum takes over
SLATER_ARGUMENT_LIMIT = 30.0

_LOG_2 = math.log(2.0)
_LOG_PI = math.log(math.pi)


def component_pdf(shape, k, a, g):
    """Density in gamma of a component with root a*sqrt(gamma) ~ Gamma(shape) x Gamma(k)."""
    g = np.asarray(g, dtype=float)
    params = MeijerParams(2, 0, 0, 2, (), (shape, k))
    log_scale = -_LOG_2 - np.log(g) - special.gammaln(shape) - special.gammaln(k)
    return meijer_g(params, a * np.sqrt(g), log_scale=log_scale)


def component_sf(shape, k, x):
    """P[Z > x] for Z = Gamma(shape) x Gamma(k), k integer.

    Exact finite sum sum_{j<k} G^{2,0}_{0,2}(x | shape, j) / (j! Gamma(shape)).
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.ones_like(flat)
    positive = flat > 0.0
    if np.any(positive):
        tail = np.zeros(int(positive.sum()))
        for j in range(int(k)):
            params = MeijerParams(2, 0, 0, 2, (), (shape, float(j)))
            term = meijer_g(params, flat[positive],
                            log_scale=-special.gammaln(shape) - special.gammaln(j + 1), strict=False)
            tail += np.nan_to_num(term, nan=0.0)
        out[positive] = np.clip(tail, 0.0, 1.0)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def component_cdf(shape, k, x, epsilon_shift=1e-6):
    """P[Z <= x] for Z = Gamma(shape) x Gamma(k).

    Small arguments use 2^{shape+k-2} / (pi Gamma(shape) Gamma(k)) times
    G^{4,1}_{1,5}(x^2/16 | 1; shape/2, (shape+1)/2, k/2, (k+1)/2, 0), which keeps
    relative accuracy when the probability is tiny; entries beyond
    SLATER_ARGUMENT_LIMIT or too ill-conditioned for the expansion fall back
    to 1 - component_sf.
    """
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = np.zeros_like(flat)
    arg = flat * flat / 16.0
    slater = (flat > 0.0) & (arg <= SLATER_ARGUMENT_LIMIT)
    if np.any(slater):
        params = MeijerParams(4, 1, 1, 5, (1.0,),
                              (shape / 2.0, (shape + 1.0) / 2.0, k / 2.0, (k + 1.0) / 2.0, 0.0),
                              epsilon_shift)
        log_prefactor = ((shape + k - 2.0) * _LOG_2 - _LOG_PI
                         - special.gammaln(shape) - special.gammaln(k))
        out[slater] = meijer_g(params, arg[slater], log_scale=log_prefactor, strict=False)
    fallback = (flat > 0.0) & (~slater | np.isnan(out))
    if np.any(fallback):
        out[fallback] = 1.0 - component_sf(shape, k, flat[fallback])
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if x.ndim == 0 else out.reshape(x.shape)


def _mixed(fn, weights):
    """sum_k w_k fn(k) over the small-scale index k = 1..beta."""
    total = 0.0
    for k, weight in enumerate(weights, start=1):
        if weight > 0.0:
            total = total + weight * fn(k)
    return total


def joint_pdf(link, g1, g2, num=None):
    """Joint density f(gamma1, gamma2) of the correlated SNR pair.

    Args:
        link: CorrelatedLink
        g1, g2: SNR values (> 0), scalars or broadcastable arrays
        num: SeriesNumerics; defaults apply when omitted

    Raises:
        BoundaryError: an SNR equals 0.
        ConvergenceError: the t-series did not settle within num.t_max.
    """
    num = num or SeriesNumerics()
    g1 = _positive_snr(g1, "g1")
    g2 = _positive_snr(g2, "g2")
    g1, g2 = np.broadcast_arrays(g1, g2)
    params = link.params
    if link.rho == 0.0:
        return _as_output(marginal_pdf(params, link.mu1, g1, num) * marginal_pdf(params, link.mu2, g2, num))

    weights = small_scale_weights(params)
    a1, a2 = link_scales(link)

    def term(t):
        shape = params.alpha + t
        f1 = _mixed(lambda k: component_pdf(shape, k, a1, g1), weights)
        f2 = _mixed(lambda k: component_pdf(shape, k, a2, g2), weights)
        return f1 * f2

    return _as_output(sum_mixture(params.alpha, link.rho, num, term, "joint_pdf").value)


def joint_cdf(link, g1, g2, num=None):
    """P[gamma1 <= g1, gamma2 <= g2]; factorizes per mixture index t."""
    num = num or SeriesNumerics()
    g1 = _nonnegative_snr(g1, "g1")
    g2 = _nonnegative_snr(g2, "g2")
    g1, g2 = np.broadcast_arrays(g1, g2)
    params = link.params
    if link.rho == 0.0:
        return _as_output(marginal_cdf(params, link.mu1, g1, num) * marginal_cdf(params, link.mu2, g2, num))

    weights = small_scale_weights(params)
    a1, a2 = link_scales(link)
    x1, x2 = a1 * np.sqrt(g1), a2 * np.sqrt(g2)

    def term(t):
        shape = params.alpha + t
        f1 = _mixed(lambda k: component_cdf(shape, k, x1, num.epsilon_shift), weights)
        f2 = _mixed(lambda k: component_cdf(shape, k, x2, num.epsilon_shift), weights)
        return f1 * f2

    return _as_output(sum_mixture(params.alpha, link.rho, num, term, "joint_cdf", term_bound=1.0).value)


def marginal_pdf(params, mu, g, num=None):
    """Single-link SNR density with E{gamma} = mu."""
    g = _positive_snr(g, "g")
    a = marginal_scale(params, mu)
    weights = small_scale_weights(params)
    return _as_output(_mixed(lambda k: component_pdf(params.alpha, k, a, g), weights))


def marginal_cdf(params, mu, g, num=None):
    """Single-link outage probability P[gamma <= g]."""
    num = num or SeriesNumerics()
    g = _nonnegative_snr(g, "g")
    x = marginal_scale(params, mu) * np.sqrt(g)
    weights = small_scale_weights(params)
    return _as_output(_mixed(lambda k: component_cdf(params.alpha, k, x, num.epsilon_shift), weights))


def marginal_sf(params, mu, g, num=None):
    """P[gamma > g], accurate deep in the upper tail."""
    g = _nonnegative_snr(g, "g")
    x = marginal_scale(params, mu) * np.sqrt(g)
    weights = small_scale_weights(params)
    return _as_output(_mixed(lambda k: component_sf(params.alpha, k, x), weights))


def _nonnegative_snr(g, field):
    g = np.asarray(g, dtype=float)
    if np.any(~np.isfinite(g)) or np.any(g < 0.0):
        raise InvalidParameter(field, "SNR values must be finite and >= 0")
    return g


def _positive_snr(g, field):
    g = _nonnegative_snr(g, field)
    if np.any(g == 0.0):
        raise BoundaryError(field, "density is not defined at gamma = 0")
    return g


def _as_output(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value
