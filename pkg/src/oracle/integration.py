"""Brute-force 2-D integration of the joint SNR density

The integrand lives on log-SNR coordinates mapped to the unit square. An
adaptive rectangle scheme compares 15- and 7-point Gauss-Legendre tensor
rules on every rectangle and, level by level, splits every rectangle whose
error estimate exceeds its share of the tolerance. The refinement is
synchronous and all sums run in a fixed order, so the result does not depend
on evaluation order.
"""
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize

from src.errors import InvalidParameter, NumericalFailure
from src.numerics import SeriesNumerics
from src.channel.density import joint_pdf, marginal_cdf, marginal_sf

logger = logging.getLogger(__name__)

MIN_ABS_TOL = 1e-8
LOW_ORDER, HIGH_ORDER = 7, 15
MAX_LEVELS = 24
MAX_RECTANGLES = 4096
# marginal tail mass left out on each side, as a fraction of abs_tol
TAIL_FRACTION = 1.0 / 20.0


def _unit_rule(order):
    x, w = leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


class AdaptiveCubature:
    """Adaptive integration of a vectorized f(u, v) over [0, 1]^2."""

    def __init__(self, integrand, abs_tol, max_levels=MAX_LEVELS, max_rectangles=MAX_RECTANGLES):
        self.integrand = integrand
        self.abs_tol = abs_tol
        self.max_levels = max_levels
        self.max_rectangles = max_rectangles
        self.rules = (_unit_rule(HIGH_ORDER), _unit_rule(LOW_ORDER))
        self.evaluations = 0

    def _tensor_estimate(self, rects, rule):
        nodes, weights = rule
        x0, x1, y0, y1 = rects.T
        u = x0[:, None, None] + (x1 - x0)[:, None, None] * nodes[None, :, None]
        v = y0[:, None, None] + (y1 - y0)[:, None, None] * nodes[None, None, :]
        u, v = np.broadcast_arrays(u, v)
        values = np.asarray(self.integrand(u.ravel(), v.ravel()), dtype=float).reshape(u.shape)
        self.evaluations += values.size
        area = (x1 - x0) * (y1 - y0)
        return area * np.einsum("i,j,rij->r", weights, weights, values)

    def integrate(self):
        """Return (value, error_estimate).

        Raises:
            NumericalFailure: refinement exhausted; diagnostics carry the
                achieved tolerance.
        """
        active = np.array([[0.0, 1.0, 0.0, 1.0]])
        accepted_value, accepted_error = 0.0, 0.0
        total_value, total_error = math.nan, math.inf
        for level in range(self.max_levels):
            high = self._tensor_estimate(active, self.rules[0])
            low = self._tensor_estimate(active, self.rules[1])
            error = np.abs(high - low)
            total_value = accepted_value + float(np.sum(high))
            total_error = accepted_error + float(np.sum(error))
            logger.debug("cubature level %d: %d rectangles, value %.12g, error %.3g",
                         level, len(active), total_value, total_error)
            if total_error <= self.abs_tol:
                return total_value, total_error

            area = (active[:, 1] - active[:, 0]) * (active[:, 3] - active[:, 2])
            split = error > 0.5 * self.abs_tol * area
            if not np.any(split):
                split = error >= np.quantile(error, 0.75)
            accepted_value += float(np.sum(high[~split]))
            accepted_error += float(np.sum(error[~split]))

            parents = active[split]
            if 4 * len(parents) > self.max_rectangles:
                break
            x0, x1, y0, y1 = parents.T
            xm, ym = (x0 + x1) / 2.0, (y0 + y1) / 2.0
            active = np.concatenate([
                np.stack([x0, xm, y0, ym], axis=1),
                np.stack([xm, x1, y0, ym], axis=1),
                np.stack([x0, xm, ym, y1], axis=1),
                np.stack([xm, x1, ym, y1], axis=1),
            ])
        raise NumericalFailure(
            f"adaptive cubature reached only {total_error:.3g} (requested {self.abs_tol:.3g})",
            {"achieved_tolerance": total_error, "value": total_value, "evaluations": self.evaluations},
        )


def snr_range(params, mu, tail, num=None):
    """(low, high) with P[gamma < low] and P[gamma > high] both equal to ``tail``."""
    log_mu = math.log(mu)
    lo_bracket, hi_bracket = log_mu - 100.0, log_mu + 30.0

    def lower_gap(log_g):
        return math.log(max(marginal_cdf(params, mu, math.exp(log_g), num), 1e-300)) - math.log(tail)

    def upper_gap(log_g):
        return math.log(max(marginal_sf(params, mu, math.exp(log_g), num), 1e-300)) - math.log(tail)

    low = optimize.brentq(lower_gap, lo_bracket, log_mu, xtol=1e-6)
    high = optimize.brentq(upper_gap, log_mu, hi_bracket, xtol=1e-6)
    return math.exp(low), math.exp(high)


def _quad2d(link, abs_tol, num, threshold):
    """Integral of joint_pdf over {gamma1 <= threshold(gamma2)} within the
    truncated quadrant; ``threshold=None`` integrates the whole quadrant."""
    if not abs_tol >= MIN_ABS_TOL:
        raise InvalidParameter("abs_tol", f"must be >= {MIN_ABS_TOL}, got {abs_tol}")
    tail = abs_tol * TAIL_FRACTION
    lo1, hi1 = snr_range(link.params, link.mu1, tail, num)
    lo2, hi2 = snr_range(link.params, link.mu2, tail, num)
    log_lo1, log_hi1 = math.log(lo1), math.log(hi1)
    log_lo2, log_hi2 = math.log(lo2), math.log(hi2)

    def integrand(u1, u2):
        log_g2 = log_lo2 + u2 * (log_hi2 - log_lo2)
        g2 = np.exp(log_g2)
        if threshold is None:
            log_top = np.full_like(g2, log_hi1)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                log_top = np.minimum(np.log(threshold(g2)), log_hi1)
        span = log_top - log_lo1
        inside = span > 0.0
        out = np.zeros_like(g2)
        if np.any(inside):
            log_g1 = log_lo1 + u1[inside] * span[inside]
            g1 = np.exp(log_g1)
            density = joint_pdf(link, g1, g2[inside], num)
            out[inside] = density * g1 * g2[inside] * span[inside] * (log_hi2 - log_lo2)
        return out

    value, error = AdaptiveCubature(integrand, abs_tol).integrate()
    return value, error


def sop_quad2d(link, target, abs_tol=1e-6, num=None, full_quadrant=False):
    """Secrecy outage probability by direct integration of the joint density.

    ``full_quadrant=True`` drops the outage boundary (Theta -> infinity) and
    integrates the whole truncated quadrant, which should give one.
    """
    num = num or SeriesNumerics()
    if full_quadrant:
        threshold = None
    else:
        theta = target.theta
        threshold = lambda g2: theta * g2 + theta - 1.0  # noqa: E731
    value, error = _quad2d(link, abs_tol, num, threshold)
    logger.debug("sop_quad2d: %.12g (error estimate %.3g)", value, error)
    return value


def normalization_check(link, num=None, abs_tol=1e-6):
    """Integral of joint_pdf over the truncated quadrant, minus one."""
    num = num or SeriesNumerics()
    value, _ = _quad2d(link, abs_tol, num, None)
    return value - 1.0
