"""Gauss rules for the half-range weight exp(-x^2) on [0, inf)

Built from the exact moments m_j = Gamma((j+1)/2) / 2. The Chebyshev
algorithm turns moments into three-term recurrence coefficients (in
extended precision, since that map is badly conditioned), the Jacobi
matrix eigenvalues give the nodes, and Newton steps on the orthonormal
polynomial plus Christoffel weights finish the rule.
"""
import logging
import threading
from dataclasses import dataclass

import mpmath
import numpy as np

from src.errors import InvalidParameter, QuadratureError

logger = logging.getLogger(__name__)

MAX_ORDER = 64
_NEWTON_STEPS = 6

_rule_cache = {}
_rule_lock = threading.Lock()


@dataclass(frozen=True)
class QuadratureRule:
    """L-point rule: integral of exp(-x^2) f(x) over [0, inf) ~ sum w_i f(s_i)."""
    order: int
    nodes: tuple
    weights: tuple

    @property
    def nodes_array(self):
        return np.array(self.nodes)

    @property
    def weights_array(self):
        return np.array(self.weights)

    def apply(self, f):
        """Apply the rule to a function accepting an array of nodes."""
        values = np.asarray(f(self.nodes_array), dtype=float)
        return float(np.dot(self.weights_array, values))


def halfrange_gauss_rule(order):
    """Return the cached ``order``-point half-range Gauss rule (1 <= order <= 64).

    Raises:
        InvalidParameter: order outside [1, MAX_ORDER].
        QuadratureError: the recurrence broke down; a lower order is needed.
    """
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise InvalidParameter("quad_order", f"must be an integer in [1, {MAX_ORDER}], got {order}")
    order = int(order)
    with _rule_lock:
        rule = _rule_cache.get(order)
        if rule is None:
            rule = _build_rule(order)
            _rule_cache[order] = rule
    return rule


def _build_rule(order):
    dps = 60 + 4 * order
    with mpmath.workdps(dps):
        alpha, beta = _recurrence_coefficients(order + 1)

        jacobi = np.diag([float(v) for v in alpha[:order]])
        off = [float(mpmath.sqrt(v)) for v in beta[1:order]]
        jacobi += np.diag(off, 1) + np.diag(off, -1)
        guesses = np.linalg.eigh(jacobi)[0]

        nodes, weights = [], []
        for guess in guesses:
            x = mpmath.mpf(float(guess))
            for _ in range(_NEWTON_STEPS):
                values, derivative = _orthonormal_values(x, alpha, beta, order)
                x -= values[order] / derivative
            values, _ = _orthonormal_values(x, alpha, beta, order)
            nodes.append(float(x))
            weights.append(float(1 / mpmath.fsum(v * v for v in values[:order])))

    if any(not s > 0.0 for s in nodes) or any(np.diff(nodes) <= 0.0) or any(w <= 0.0 for w in weights):
        raise QuadratureError(f"half-range rule of order {order} is not admissible; use a lower order",
                              {"order": order})
    logger.debug("built half-range Gauss rule of order %d", order)
    return QuadratureRule(order=order, nodes=tuple(nodes), weights=tuple(weights))


def _recurrence_coefficients(count):
    """Chebyshev algorithm: first ``count`` recurrence coefficients from 2*count moments."""
    size = 2 * count
    moments = [mpmath.gamma(mpmath.mpf(j + 1) / 2) / 2 for j in range(size)]
    alpha = [mpmath.mpf(0)] * count
    beta = [mpmath.mpf(0)] * count
    alpha[0] = moments[1] / moments[0]
    beta[0] = moments[0]
    sigma_prev = [mpmath.mpf(0)] * size
    sigma = list(moments)
    for k in range(1, count):
        sigma_next = [mpmath.mpf(0)] * size
        for l in range(k, size - k):
            sigma_next[l] = sigma[l + 1] - alpha[k - 1] * sigma[l] - beta[k - 1] * sigma_prev[l]
        if not sigma_next[k] > 0:
            raise QuadratureError(
                f"moment recurrence broke down at degree {k}; use a lower quadrature order",
                {"degree": k})
        alpha[k] = sigma_next[k + 1] / sigma_next[k] - sigma[k] / sigma[k - 1]
        beta[k] = sigma_next[k] / sigma[k - 1]
        sigma_prev, sigma = sigma, sigma_next
    return alpha, beta


def _orthonormal_values(x, alpha, beta, order):
    """Orthonormal polynomials p_0..p_order at x and the derivative of p_order."""
    p_prev, p = mpmath.mpf(0), 1 / mpmath.sqrt(beta[0])
    d_prev, d = mpmath.mpf(0), mpmath.mpf(0)
    values = [p]
    for k in range(order):
        root_next = mpmath.sqrt(beta[k + 1])
        root_k = mpmath.sqrt(beta[k]) if k > 0 else mpmath.mpf(0)
        p_next = ((x - alpha[k]) * p - root_k * p_prev) / root_next
        d_next = (p + (x - alpha[k]) * d - root_k * d_prev) / root_next
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        values.append(p)
    return values, d
