"""Gamma function in log-magnitude / sign form"""
import math
from typing import NamedTuple

import numpy as np
from scipy import special

from src.errors import PoleError


class SignedLog(NamedTuple):
    """A real number stored as log|value| plus its sign (+1 or -1)."""
    log: float
    sign: int

    @property
    def value(self):
        return self.sign * math.exp(self.log)


def is_nonpositive_integer(x, tol=0.0):
    x = np.asarray(x, dtype=float)
    return (x <= 0) & (np.abs(x - np.round(x)) <= tol)


def ln_gamma(x):
    """Natural log of |Gamma(x)| together with the sign of Gamma(x).

    Raises:
        PoleError: x is zero or a negative integer.
    """
    x = float(x)
    if is_nonpositive_integer(x):
        raise PoleError("x", f"Gamma has a pole at {x:g}")
    return SignedLog(float(special.gammaln(x)), int(special.gammasgn(x)))


def log_gamma_terms(values):
    """Sum of log|Gamma| and product of signs over ``values``.

    Returns (log_sum, sign, pole) where ``pole`` is True if any argument sits
    on a pole; callers treat that as an infinite factor.
    """
    log_sum = 0.0
    sign = 1
    for x in values:
        if is_nonpositive_integer(x):
            return math.inf, 1, True
        log_sum += float(special.gammaln(x))
        sign *= int(special.gammasgn(x))
    return log_sum, sign, False


def _near_integer(x):
    return abs(x - round(x)) <= 1e-12 * max(1.0, abs(x))


def log_gamma_split(center, offset):
    """log|Gamma(center + offset)| and sign, for a small ``offset`` near a pole.

    When ``center`` is a non-positive integer -m the distance to the pole is
    ``offset`` itself, so Gamma(offset - m) = Gamma(1 + offset) / prod_{j<=m}
    (offset - j) keeps full relative precision. Returns (log, sign, pole).
    """
    if offset == 0.0 or not (center <= 0.0 and _near_integer(center)):
        x = center + offset
        if is_nonpositive_integer(x):
            return math.inf, 1, True
        return float(special.gammaln(x)), int(special.gammasgn(x)), False
    m = -int(round(center))
    factors = offset - np.arange(m + 1)
    log_value = float(special.gammaln(1.0 + offset)) - float(np.sum(np.log(np.abs(factors))))
    sign = int(np.prod(np.sign(factors)))
    return log_value, sign, False


def log_gamma_split_terms(pairs):
    """log_gamma_terms over (center, offset) pairs."""
    log_sum = 0.0
    sign = 1
    for center, offset in pairs:
        value, s, pole = log_gamma_split(center, offset)
        if pole:
            return math.inf, 1, True
        log_sum += value
        sign *= s
    return log_sum, sign, False
