"""Generalized hypergeometric series and the Tricomi confluent function U"""
import logging
import math

import mpmath
import numpy as np

from src.errors import InvalidParameter, NumericalFailure, PoleError
from src.specfun.bessel import log_bessel_k
from src.specfun.gamma import is_nonpositive_integer

logger = logging.getLogger(__name__)

MAX_SERIES_TERMS = 10000
_SERIES_TOL = 1e-17
_B_EQUALS_2A_TOL = 1e-12


def neumaier_add(total, compensation, term):
    """One step of Neumaier compensated summation (element-wise)."""
    t = total + term
    compensation = compensation + np.where(
        np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
    return t, compensation


def _split(parameter):
    if isinstance(parameter, tuple):
        return float(parameter[0]), float(parameter[1])
    return float(parameter), 0.0


def pfq_series(a, b, z, max_terms=MAX_SERIES_TERMS):
    """Power series of pFq(a; b; z) for an array of arguments.

    Returns (value, abs_sum), where ``abs_sum`` is the sum of term magnitudes
    and bounds the cancellation inside the series. Parameters are taken as
    already validated. A parameter may be a (center, offset) pair; each
    Pochhammer factor is then formed as (center + n) + offset, so a small
    offset stays exact where center + n vanishes.
    """
    a_parts = [_split(v) for v in a]
    b_parts = [_split(v) for v in b]
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    compensation = np.zeros_like(z)
    abs_sum = np.ones_like(z)
    small_run = 0
    for n in range(max_terms):
        numerator = 1.0
        for center, offset in a_parts:
            numerator *= (center + n) + offset
        denominator = float(n + 1)
        for center, offset in b_parts:
            denominator *= (center + n) + offset
        ratio = numerator / denominator
        if ratio == 0.0:
            return total + compensation, abs_sum
        term = term * ratio * z
        total, compensation = neumaier_add(total, compensation, term)
        abs_sum = abs_sum + np.abs(term)
        decreasing = np.all(np.abs(ratio * z) < 1.0)
        if decreasing and np.all(np.abs(term) <= _SERIES_TOL * np.abs(total + compensation)):
            small_run += 1
            if small_run >= 2:
                return total + compensation, abs_sum
        else:
            small_run = 0
    raise NumericalFailure(
        f"{len(a)}F{len(b)} series not converged after {max_terms} terms",
        {"a": list(a), "b": list(b), "max_abs_z": float(np.max(np.abs(z)))},
    )


def hyp_pfq(a, b, z):
    """Generalized hypergeometric function pFq(a; b; z) by its power series.

    Args:
        a: numerator parameters
        b: denominator parameters (none may be zero or a negative integer)
        z: real argument inside the radius of convergence

    Raises:
        PoleError: a denominator parameter is a non-positive integer.
        NumericalFailure: the series diverges for this (p, q) and z, or
            did not converge within MAX_SERIES_TERMS terms.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    z = float(z)
    for bj in b:
        if is_nonpositive_integer(bj):
            raise PoleError("b", f"denominator parameter {bj:g} is a pole of {len(a)}F{len(b)}")
    if z == 0.0:
        return 1.0
    terminating = any(is_nonpositive_integer(ai) for ai in a)
    p, q = len(a), len(b)
    if not terminating:
        if p > q + 1:
            raise NumericalFailure(f"{p}F{q} diverges for every z != 0", {"z": z})
        if p == q + 1 and abs(z) >= 1.0:
            raise NumericalFailure(f"{p}F{q} series diverges for |z| >= 1", {"z": z})
    value, _ = pfq_series(a, b, np.array([z]))
    return float(value[0])


def log_kummer_u(a, b, z):
    """log U(a, b, z) for the Bessel-reducible family b = 2a, element-wise in z.

    U(a, 2a, z) = e^{z/2} K_{a-1/2}(z/2) / (sqrt(pi) z^{a-1/2}).
    """
    if abs(b - 2.0 * a) > _B_EQUALS_2A_TOL * max(1.0, abs(b)):
        raise InvalidParameter("b", f"log_kummer_u needs b = 2a, got a={a}, b={b}")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise InvalidParameter("z", "Kummer U needs z > 0")
    order = a - 0.5
    return log_bessel_k(order, z / 2.0) + z / 2.0 - 0.5 * math.log(math.pi) - order * np.log(z)


def kummer_u(a, b, z):
    """Tricomi confluent hypergeometric function U(a, b, z) for z > 0.

    The family b = 2a (which contains both U(v+1/2, 2v+1, .) and
    U((v+1)/2, v+1, .)) goes through the Bessel K identity; other
    parameters fall back to mpmath.hyperu.

    Raises:
        InvalidParameter: z <= 0.
        NumericalFailure: the fallback did not return a finite value.
    """
    a, b, z = float(a), float(b), float(z)
    if not z > 0.0:
        raise InvalidParameter("z", f"Kummer U needs z > 0, got {z}")
    if a == 0.0:
        return 1.0
    if abs(b - 2.0 * a) <= _B_EQUALS_2A_TOL * max(1.0, abs(b)):
        return math.exp(float(log_kummer_u(a, 2.0 * a, z)))
    try:
        value = float(mpmath.hyperu(a, b, z))
    except (ValueError, ZeroDivisionError, mpmath.libmp.NoConvergence) as e:
        raise NumericalFailure(f"U({a}, {b}, {z}) failed: {e}", {"a": a, "b": b, "z": z}) from e
    if not math.isfinite(value):
        raise NumericalFailure(f"U({a}, {b}, {z}) is not finite", {"a": a, "b": b, "z": z})
    return value
