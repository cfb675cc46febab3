"""Meijer G-function for the three parameter shapes the secrecy formulas need

G^{2,0}_{0,2} reduces to a Bessel K function. G^{4,1}_{1,5} and G^{4,5}_{5,5}
are summed from their Slater residue expansion: one Gamma-weighted pFq
series per lower parameter b_1..b_m, combined in log space with compensated
summation. Lower parameters spaced by integers produce coalescing poles;
these are split by +/- epsilon_shift and the two evaluations averaged. Shifted
parameter differences are formed as an exact center plus the shift, so each
split pole sits exactly epsilon_shift away and only the O(epsilon^2) bias and
a rounding loss of about 1/epsilon remain (see shift_error_bound).
"""
import logging
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from src.errors import InvalidParameter, NumericalFailure
from src.specfun.bessel import log_bessel_k
from src.specfun.gamma import log_gamma_split_terms
from src.specfun.hypergeometric import neumaier_add, pfq_series

logger = logging.getLogger(__name__)

SUPPORTED_SHAPES = frozenset({(2, 0, 0, 2), (4, 1, 1, 5), (4, 5, 5, 5)})
CONDITION_LIMIT = 1e9
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class MeijerParams:
    """Orders (m, n, p, q), numerator parameters a and denominator parameters b."""
    m: int
    n: int
    p: int
    q: int
    a: tuple
    b: tuple
    epsilon_shift: float = 1e-6

    def __post_init__(self):
        shape = (self.m, self.n, self.p, self.q)
        if shape not in SUPPORTED_SHAPES:
            raise InvalidParameter("shape", f"unsupported Meijer G shape {shape}")
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if len(self.a) != self.p or len(self.b) != self.q:
            raise InvalidParameter("a/b", f"expected {self.p} and {self.q} parameters, "
                                          f"got {len(self.a)} and {len(self.b)}")
        if not 0.0 < self.epsilon_shift <= 1e-5:
            raise InvalidParameter("epsilon_shift", f"must lie in (0, 1e-5], got {self.epsilon_shift}")

    @property
    def shape(self):
        return (self.m, self.n, self.p, self.q)


def shift_error_bound(epsilon_shift):
    """Relative error budget of the pole-splitting average at a given shift.

    The symmetric average removes the first-order term of the shift, leaving
    epsilon^2. The split residues are O(1/epsilon) and cancel; since every
    pole distance is carried exactly, each residue keeps full relative
    precision and the cancellation costs double-precision rounding times
    1/epsilon.
    """
    return epsilon_shift ** 2 + np.finfo(float).eps / epsilon_shift


def meijer_g(params, x, *, log_scale=0.0, strict=True):
    """Evaluate G^{m,n}_{p,q}(x | a; b) times exp(log_scale).

    Args:
        params: MeijerParams of a supported shape
        x: positive argument, scalar or array
        log_scale: added to the log of the result before exponentiation,
            scalar or broadcastable to x; keeps large Gamma prefactors out of
            floating range trouble
        strict: when False, entries the expansion cannot deliver (unit
            argument of G^{4,5}_{5,5}, cancellation beyond CONDITION_LIMIT,
            overflow) come back as NaN instead of raising

    Raises:
        InvalidParameter: x <= 0.
        NumericalFailure: strict and some entry could not be evaluated.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0.0)):
        raise InvalidParameter("x", "Meijer G argument must be > 0")
    flat = np.atleast_1d(x_arr).ravel()
    scale = np.broadcast_to(np.asarray(log_scale, dtype=float), x_arr.shape)
    scale = np.atleast_1d(scale).ravel().astype(float)

    if params.shape == (2, 0, 0, 2):
        b1, b2 = params.b
        with np.errstate(over="ignore"):
            log_value = (math.log(2.0) + 0.5 * (b1 + b2) * np.log(flat)
                         + log_bessel_k(b1 - b2, 2.0 * np.sqrt(flat)) + scale)
            out = np.exp(log_value)
        out[~np.isfinite(out)] = np.nan
        condition = np.ones_like(out)
    elif params.shape == (4, 1, 1, 5):
        out, condition = _slater(params.m, params.n, params.a, params.b, flat,
                                 params.epsilon_shift, scale)
    else:
        out = np.full_like(flat, np.nan)
        condition = np.full_like(flat, np.inf)
        below, above = flat < 1.0, flat > 1.0
        if np.any(below):
            out[below], condition[below] = _slater(params.m, params.n, params.a, params.b,
                                                   flat[below], params.epsilon_shift, scale[below])
        if np.any(above):
            # G^{m,n}_{p,q}(x | a; b) = G^{n,m}_{q,p}(1/x | 1-b; 1-a)
            inv_a = tuple(1.0 - v for v in params.b)
            inv_b = tuple(1.0 - v for v in params.a)
            out[above], condition[above] = _slater(params.n, params.m, inv_a, inv_b,
                                                   1.0 / flat[above], params.epsilon_shift,
                                                   scale[above])

    if strict and np.any(np.isnan(out)):
        bad = np.flatnonzero(np.isnan(out))
        raise NumericalFailure(
            f"G^{{{params.m},{params.n}}}_{{{params.p},{params.q}}} could not be evaluated "
            f"at {bad.size} argument(s)",
            {"params": params, "x": flat[bad][:5].tolist(),
             "condition": condition[bad][:5].tolist(), "limit": CONDITION_LIMIT},
        )
    return float(out[0]) if x_arr.ndim == 0 else out.reshape(x_arr.shape)


def confluence_ranks(b, epsilon_shift):
    """Shift multiplier for each parameter so that no two differ by an integer.

    Parameters are grouped by fractional part; within a group the k-th member
    gets rank k.
    """
    tol = 0.1 * epsilon_shift
    ranks = np.zeros(len(b))
    for g in range(len(b)):
        for h in range(g):
            d = b[g] - b[h]
            if abs(d - round(d)) < tol:
                ranks[g] = max(ranks[g], ranks[h] + 1)
    return ranks


def _slater(m, n, a, b, x, epsilon_shift, log_scale):
    ranks = confluence_ranks(b[:m], epsilon_shift)
    if not np.any(ranks):
        return _slater_sum(m, n, a, b, np.zeros(len(b)), x, log_scale)
    shift = np.zeros(len(b))
    shift[:m] = ranks * epsilon_shift
    plus, cond_plus = _slater_sum(m, n, a, b, shift, x, log_scale)
    minus, cond_minus = _slater_sum(m, n, a, b, -shift, x, log_scale)
    return 0.5 * (plus + minus), np.maximum(cond_plus, cond_minus)


def _slater_sum(m, n, a, b, shift, x, log_scale):
    """Residue sum over the poles of Gamma(b_h + shift_h - s), h < m.

    Every Gamma and Pochhammer argument is carried as (center, offset): the
    center comes from the unshifted parameters and the offset from the
    shifts alone, so a split pole sits at exactly its offset.
    """
    p, q = len(a), len(b)
    log_x = np.log(x)
    z = x if (p - m - n) % 2 == 0 else -x
    term_logs, term_signs, abs_logs = [], [], []
    for h in range(m):
        bh, sh = b[h], float(shift[h])
        log_num, sign_num, pole = log_gamma_split_terms(
            [(b[j] - bh, float(shift[j]) - sh) for j in range(m) if j != h]
            + [(1.0 + bh - a[j], sh) for j in range(n)])
        if pole:
            raise NumericalFailure("coalescing poles left unsplit", {"a": a, "b": b, "h": h})
        log_den, sign_den, vanishes = log_gamma_split_terms(
            [(1.0 + bh - b[j], sh - float(shift[j])) for j in range(m, q)]
            + [(a[j] - bh, -sh) for j in range(n, p)])
        if vanishes:
            continue
        series, abs_series = pfq_series(
            [(1.0 + bh - a[j], sh) for j in range(p)],
            [(1.0 + bh - b[j], sh - float(shift[j])) for j in range(q) if j != h],
            z,
        )
        base = log_num - log_den + (bh + sh) * log_x + log_scale
        with np.errstate(divide="ignore"):
            term_logs.append(base + np.log(np.abs(series)))
            abs_logs.append(base + np.log(abs_series))
        term_signs.append(sign_num * sign_den * np.sign(series))

    if not term_logs:
        return np.zeros_like(x), np.ones_like(x)
    term_logs = np.array(term_logs)
    abs_logs = np.array(abs_logs)
    term_signs = np.array(term_signs)
    peak = np.max(abs_logs, axis=0)

    total = np.zeros_like(x)
    compensation = np.zeros_like(x)
    magnitude = np.zeros_like(x)
    for h in range(term_logs.shape[0]):
        total, compensation = neumaier_add(total, compensation,
                                           term_signs[h] * np.exp(term_logs[h] - peak))
        magnitude = magnitude + np.exp(abs_logs[h] - peak)
    total = total + compensation

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        condition = magnitude / np.abs(total)
        log_result = peak + np.log(np.abs(total))
        value = np.sign(total) * np.exp(np.minimum(log_result, _LOG_MAX))
    bad = ~(condition <= CONDITION_LIMIT) | (log_result > _LOG_MAX)
    if np.any(bad):
        logger.debug("Slater expansion ill-conditioned at %d point(s), max condition %.3g",
                     int(bad.sum()), float(np.nanmax(np.where(bad, condition, 0.0))))
    value = np.where(bad, np.nan, value)
    return value, condition


def meijer_g_contour(m, n, a, b, x, dps=30):
    """Meijer G by numerical integration of its Mellin-Barnes line integral.

    Reference evaluator for tests. The path Re(s) = c runs between the poles
    of Gamma(1 - a_j + s), j < n, and those of Gamma(b_j - s), j < m, which
    requires max(a_j) - 1 < min(b_j) over those index ranges.
    """
    a = [mpmath.mpf(v) for v in a]
    b = [mpmath.mpf(v) for v in b]
    p, q = len(a), len(b)
    upper = min(b[:m])
    lower = max(a[:n]) - 1 if n else upper - 1
    if not lower < upper:
        raise InvalidParameter("a/b", "no vertical contour separates the two pole families")
    with mpmath.workdps(dps):
        c = (lower + upper) / 2
        x = mpmath.mpf(x)

        def integrand(tau):
            s = mpmath.mpc(c, tau)
            value = x ** s
            for j in range(m):
                value *= mpmath.gamma(b[j] - s)
            for j in range(n):
                value *= mpmath.gamma(1 - a[j] + s)
            for j in range(m, q):
                value /= mpmath.gamma(1 - b[j] + s)
            for j in range(n, p):
                value /= mpmath.gamma(a[j] - s)
            return value.real

        result = mpmath.quad(integrand, [-mpmath.inf, -10, 0, 10, mpmath.inf]) / (2 * mpmath.pi)
    return float(result)
