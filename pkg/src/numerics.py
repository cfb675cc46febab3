"""Series truncation policy and the correlation-mixture summation loop"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import special, stats

from src.errors import ConvergenceError, InvalidParameter, ProbabilityRangeError

logger = logging.getLogger(__name__)

CONSECUTIVE_SMALL_TERMS = 3
PROBABILITY_CLAMP = 1e-9
# adaptive truncation: the series may run on until the weight tail falls below
# rel_tol^2, never past HARD_T_MAX
HARD_T_MAX = 20000


class DenominatorConvention(str, Enum):
    """Denominator of the mixture coefficient: Gamma(t+1) or Gamma(t)."""
    FACTORIAL_T = "factorial_t"
    GAMMA_T = "gamma_t"


class KummerConvention(str, Enum):
    """Parameters of the Tricomi U factor in the outage quadrature."""
    DERIVED = "derived"    # U(v + 1/2, 2v + 1; 2 s^2)
    PRINTED = "printed"    # U((v + 1)/2, v + 1; 2 s^2)


@dataclass(frozen=True)
class SeriesNumerics:
    """Truncation, tolerance and quadrature policy for every series evaluation."""
    t_max: int = 120
    rel_tol: float = 1e-10
    quad_order: int = 30
    epsilon_shift: float = 1e-6
    denominator_convention: DenominatorConvention = DenominatorConvention.FACTORIAL_T
    kummer_convention: KummerConvention = KummerConvention.DERIVED
    # divide each outer quadrature component by the mass the rule assigns it
    normalize_outer: bool = True
    # treat t_max as a floor and extend it from the weight tail
    adaptive_t_max: bool = True

    def __post_init__(self):
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise InvalidParameter("t_max", f"must be a positive integer, got {self.t_max}")
        if not 0.0 < self.rel_tol <= 1e-4:
            raise InvalidParameter("rel_tol", f"must lie in (0, 1e-4], got {self.rel_tol}")
        if int(self.quad_order) != self.quad_order or not 1 <= self.quad_order <= 64:
            raise InvalidParameter("quad_order", f"must be an integer in [1, 64], got {self.quad_order}")
        if not 0.0 < self.epsilon_shift <= 1e-5:
            raise InvalidParameter("epsilon_shift", f"must lie in (0, 1e-5], got {self.epsilon_shift}")
        # accept plain strings from config files
        object.__setattr__(self, "denominator_convention", DenominatorConvention(self.denominator_convention))
        object.__setattr__(self, "kummer_convention", KummerConvention(self.kummer_convention))


@dataclass
class MixtureSum:
    """Result of a truncated sum over the correlation mixture index t."""
    value: object
    terms_used: int
    term_magnitudes: list = field(default_factory=list)


def mixture_log_weight(alpha, rho, t, convention=DenominatorConvention.FACTORIAL_T):
    """Log of the weight attached to mixture index t.

    With the factorial convention the weights are the negative binomial
    probabilities Gamma(alpha+t) (1-rho^2)^alpha rho^(2t) / (Gamma(alpha) t!)
    and sum to one. The gamma_t convention replaces t! by Gamma(t), which
    multiplies each weight by t and removes the t = 0 term.
    """
    rho2 = rho * rho
    log_weight = (special.gammaln(alpha + t) - special.gammaln(alpha)
                  - special.gammaln(t + 1) + alpha * math.log1p(-rho2))
    if t > 0:
        log_weight += t * math.log(rho2)
    if DenominatorConvention(convention) is DenominatorConvention.GAMMA_T:
        if t == 0:
            return -math.inf
        log_weight += math.log(t)
    return float(log_weight)


def mixture_tail_mass(alpha, rho, t, convention=DenominatorConvention.FACTORIAL_T):
    """Total weight of the mixture indices above t.

    The factorial weights are negative binomial NB(alpha, 1 - rho^2). Under
    gamma_t every weight is multiplied by its index, and
    s w_s(alpha) = alpha rho^2 / (1 - rho^2) w_{s-1}(alpha + 1).
    """
    p = 1.0 - rho * rho
    if DenominatorConvention(convention) is DenominatorConvention.GAMMA_T:
        return float(alpha * rho * rho / p * stats.nbinom.sf(t - 1, alpha + 1.0, p))
    return float(stats.nbinom.sf(t, alpha, p))


def truncation_limit(alpha, rho, num):
    """Last mixture index sum_mixture may visit."""
    if not num.adaptive_t_max or rho == 0.0:
        return int(num.t_max)
    p = 1.0 - rho * rho
    deep = stats.nbinom.isf(num.rel_tol ** 2, alpha + 1.0, p) + 1.0
    if not math.isfinite(deep):
        return HARD_T_MAX
    return int(min(HARD_T_MAX, max(num.t_max, deep)))


def sum_mixture(alpha, rho, num, term, what="series", term_bound=None):
    """Sum ``weight_t * term(t)`` over the mixture index.

    ``term`` returns a float or an array; the weight is applied here. With
    ``term_bound`` (a bound on |term(t)| for every t, e.g. 1 for
    probabilities) the sum stops once the bound times the remaining weight
    mass is no larger than ``num.rel_tol`` times the running sum. Without it
    the sum stops once CONSECUTIVE_SMALL_TERMS consecutive weighted terms are
    each that small (element-wise for arrays). The last index visited is
    ``num.t_max``, or with ``num.adaptive_t_max`` the point where the weight
    tail drops below rel_tol^2. rho = 0 is the product of independent
    marginals: only t = 0 with unit weight, whatever the denominator
    convention.

    Raises:
        ConvergenceError: the last index was reached first; carries the
            partial sum.
    """
    if rho == 0.0:
        value = term(0)
        return MixtureSum(value=value, terms_used=1,
                          term_magnitudes=[float(np.max(np.abs(value)))])

    limit = truncation_limit(alpha, rho, num)
    total = None
    magnitudes = []
    small_run = 0
    for t in range(limit + 1):
        log_weight = mixture_log_weight(alpha, rho, t, num.denominator_convention)
        if log_weight == -math.inf:
            contribution = 0.0
        else:
            contribution = math.exp(log_weight) * np.asarray(term(t), dtype=float)
        total = contribution if total is None else total + contribution
        magnitude = float(np.max(np.abs(contribution)))
        magnitudes.append(magnitude)

        if term_bound is not None:
            remaining = term_bound * mixture_tail_mass(alpha, rho, t, num.denominator_convention)
            done = remaining == 0.0 or np.all(remaining <= num.rel_tol * np.abs(total))
        else:
            if np.all(np.abs(contribution) <= num.rel_tol * np.abs(total)):
                small_run += 1
            else:
                small_run = 0
            done = small_run >= CONSECUTIVE_SMALL_TERMS
        if done:
            logger.debug("%s converged after %d terms", what, t + 1)
            return MixtureSum(value=_as_output(total), terms_used=t + 1, term_magnitudes=magnitudes)

    raise ConvergenceError(
        f"{what}: t-series not converged at t={limit} (rho={rho}); raise t_max",
        partial_value=_as_output(total),
        terms_used=limit + 1,
        diagnostics={"term_magnitudes": magnitudes[-10:], "limit": limit},
    )


def _as_output(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def clamp_probability(raw, what="probability"):
    """Clamp ``raw`` to [0, 1] if it is within PROBABILITY_CLAMP of the interval."""
    if not math.isfinite(raw):
        raise ProbabilityRangeError(f"{what} is not finite: {raw}", {"raw": raw})
    if raw < -PROBABILITY_CLAMP or raw > 1.0 + PROBABILITY_CLAMP:
        raise ProbabilityRangeError(f"{what} out of range: {raw!r}", {"raw": raw})
    return min(max(raw, 0.0), 1.0)
