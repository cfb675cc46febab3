"""Modified Bessel function of the second kind"""
import logging
import math

import mpmath
import numpy as np
from scipy import special

from src.errors import InvalidParameter, NumericalFailure

logger = logging.getLogger(__name__)

# rescale the forward recurrence before it leaves double range
_RESCALE_AT = 1e250


def bessel_k(nu, x):
    """K_nu(x) for real order and x > 0.

    Raises:
        InvalidParameter: x <= 0.
        NumericalFailure: the value overflows double precision; use
            log_bessel_k instead.
    """
    x = float(x)
    if not x > 0.0:
        raise InvalidParameter("x", f"Bessel K needs x > 0, got {x}")
    value = float(special.kv(abs(nu), x))
    if not math.isfinite(value):
        raise NumericalFailure(
            f"K_{nu}({x}) overflows double precision; evaluate log_bessel_k instead",
            {"nu": nu, "x": x, "log_value": float(log_bessel_k(nu, x))},
        )
    return value


def log_bessel_k(nu, x):
    """log K_nu(x), element-wise over ``x``.

    The exponentially scaled kve covers almost everything. Where the order
    is large compared with x the value overflows even after scaling; those
    entries are recomputed by the upward recurrence
    K_{mu+1} = K_{mu-1} + (2 mu / x) K_mu, which is stable for K, and mpmath
    is the last resort.
    """
    nu = abs(float(nu))
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0):
        raise InvalidParameter("x", "Bessel K needs x > 0")
    flat = np.atleast_1d(x_arr).astype(float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        scaled = special.kve(nu, flat)
        out = np.log(scaled) - flat
    bad = ~np.isfinite(out)
    if np.any(bad):
        out[bad] = _log_kv_recurrence(nu, flat[bad])
        still_bad = ~np.isfinite(out)
        for i in np.flatnonzero(still_bad):
            out[i] = float(mpmath.log(mpmath.besselk(nu, flat[i])))
    return float(out[0]) if x_arr.ndim == 0 else out.reshape(x_arr.shape)


def _log_kv_recurrence(nu, x):
    n = int(math.floor(nu))
    mu = nu - n
    with np.errstate(over="ignore", invalid="ignore"):
        k_prev = special.kve(mu, x)
        if n == 0:
            return np.log(k_prev) - x
        k_curr = special.kve(mu + 1.0, x)
        log_scale = np.zeros_like(x)
        for i in range(1, n):
            k_next = k_prev + (2.0 * (mu + i) / x) * k_curr
            k_prev, k_curr = k_curr, k_next
            big = k_curr > _RESCALE_AT
            if np.any(big):
                factor = np.where(big, k_curr, 1.0)
                log_scale += np.log(factor)
                k_prev = k_prev / factor
                k_curr = k_curr / factor
        return np.log(k_curr) + log_scale - x
