"""Málaga turbulence parameters, turbulence presets and the correlated link pair"""
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate, stats

from src.errors import InvalidParameter

logger = logging.getLogger(__name__)

DEGENERATE_XI = 1e-9

# (alpha, beta) per turbulence regime
PRESETS = {
    'strong': (2.296, 2),
    'moderate': (4.2, 3),
    'weak': (8.0, 4),
}
PRESET_B0 = 0.423
PRESET_DELTA = 0.84
PRESET_OMEGA1 = 2.04


@dataclass(frozen=True)
class MalagaParams:
    """Shared Málaga parameter set of the main and wiretap links.

    ``omega`` is the scale of the large-scale Gamma fluctuation. The LOS power
    is given either directly as ``omega1`` or through ``omega_prime`` and the
    deterministic phases ``phi_a``/``phi_b``.
    """
    alpha: float
    beta: int
    b0: float
    delta: float
    omega: float = 1.0
    omega1: Optional[float] = None
    omega_prime: Optional[float] = None
    phi_a: float = 0.0
    phi_b: float = 0.0

    def __post_init__(self):
        _require_positive("alpha", self.alpha)
        if int(self.beta) != self.beta or self.beta < 1:
            raise InvalidParameter("beta", f"must be an integer >= 1, got {self.beta}")
        object.__setattr__(self, "beta", int(self.beta))
        _require_positive("b0", self.b0)
        if not 0.0 < self.delta < 1.0:
            raise InvalidParameter("delta", f"must lie in (0, 1), got {self.delta}")
        _require_positive("omega", self.omega)
        if (self.omega1 is None) == (self.omega_prime is None):
            raise InvalidParameter("omega1", "give exactly one of omega1 or omega_prime (with phases)")
        if self.omega1 is not None:
            _require_positive("omega1", self.omega1)
        else:
            if not (math.isfinite(self.omega_prime) and self.omega_prime >= 0.0):
                raise InvalidParameter("omega_prime", f"must be >= 0, got {self.omega_prime}")
            if not self.los_power > 0.0:
                raise InvalidParameter("omega_prime", "LOS power Omega1 must come out positive")

    @property
    def xi(self):
        """Average power of the scattering component, 2 b0 (1 - delta)."""
        return 2.0 * self.b0 * (1.0 - self.delta)

    @property
    def los_power(self):
        """Average power Omega1 of the LOS part (LOS plus coupled scatter)."""
        if self.omega1 is not None:
            return float(self.omega1)
        coupled = 2.0 * self.b0 * self.delta
        return (self.omega_prime + coupled
                + 2.0 * math.sqrt(coupled * self.omega_prime) * math.cos(self.phi_a - self.phi_b))

    @property
    def small_scale_scale(self):
        """Scale (xi beta + Omega1) / beta of the small-scale Gamma components."""
        return (self.xi * self.beta + self.los_power) / self.beta


@dataclass(frozen=True)
class CorrelatedLink:
    """Main (S-D) and wiretap (S-E) links sharing ``params``.

    ``mu1`` and ``mu2`` are linear average SNRs; ``rho`` couples the two
    large-scale fluctuations (their power correlation is rho^2).
    """
    params: MalagaParams
    mu1: float
    mu2: float
    rho: float

    def __post_init__(self):
        _require_positive("mu1", self.mu1)
        _require_positive("mu2", self.mu2)
        if not 0.0 <= self.rho < 1.0:
            raise InvalidParameter("rho", f"must lie in [0, 1), got {self.rho}")

    def with_rho(self, rho):
        return replace(self, rho=float(rho))

    def with_mu(self, mu1=None, mu2=None):
        return replace(self, mu1=self.mu1 if mu1 is None else float(mu1),
                       mu2=self.mu2 if mu2 is None else float(mu2))


class ChannelConstants(NamedTuple):
    xi: float
    omega1: float
    c0: float
    degenerate: bool


def derive_constants(params):
    """xi, Omega1 and the rho-free coupling factor beta / (Omega (xi beta + Omega1)).

    The full coupling constant of a link divides c0 by (1 - rho^2); see
    coupling_constant.
    """
    xi = params.xi
    omega1 = params.los_power
    c0 = params.beta / (params.omega * (xi * params.beta + omega1))
    degenerate = xi < DEGENERATE_XI
    if degenerate:
        logger.warning("xi = %.3g: scattering power vanishes (delta -> 1), pure coupled-LOS limit", xi)
    return ChannelConstants(xi=xi, omega1=omega1, c0=c0, degenerate=degenerate)


def coupling_constant(link):
    return derive_constants(link.params).c0 / (1.0 - link.rho ** 2)


def small_scale_weights(params):
    """Mixture weights w_k, k = 1..beta, of the small-scale Gamma components.

    The small-scale power is a Gamma(k, scale (xi beta + Omega1)/beta)
    mixture with k - 1 ~ Binomial(beta - 1, Omega1 / (xi beta + Omega1)).
    """
    p = params.los_power / (params.xi * params.beta + params.los_power)
    return stats.binom.pmf(np.arange(params.beta), params.beta - 1, p)


def small_scale_pdf(params, y):
    shapes = np.arange(1, params.beta + 1)
    y = np.asarray(y, dtype=float)[..., None]
    densities = stats.gamma.pdf(y, shapes, scale=params.small_scale_scale)
    return densities @ small_scale_weights(params)


@lru_cache(maxsize=256)
def irradiance_second_moment(params):
    """E{(XY)^2} of the irradiance, by numerical integration of each factor."""
    options = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    large, _ = integrate.quad(
        lambda x: x * x * stats.gamma.pdf(x, params.alpha, scale=params.omega), 0.0, np.inf, **options)
    small, _ = integrate.quad(
        lambda y: y * y * float(small_scale_pdf(params, y)), 0.0, np.inf, **options)
    return large * small


def link_scales(link):
    """Arguments a1, a2 with a_p sqrt(gamma_p) feeding the component densities."""
    cc = coupling_constant(link)
    m2 = irradiance_second_moment(link.params)
    return cc * math.sqrt(m2 / link.mu1), cc * math.sqrt(m2 / link.mu2)


def marginal_scale(params, mu):
    return derive_constants(params).c0 * math.sqrt(irradiance_second_moment(params) / mu)


def unit_mean_omega(alpha, xi, omega1):
    """Omega giving E{I} = E{X} E{Y} = 1."""
    return 1.0 / (alpha * (xi + omega1))


def preset_params(name, b0=PRESET_B0, delta=PRESET_DELTA, omega1=PRESET_OMEGA1, omega=None):
    """MalagaParams for a named turbulence regime (strong, moderate, weak)."""
    if name not in PRESETS:
        raise InvalidParameter("preset", f"unknown preset '{name}', choose from {sorted(PRESETS)}")
    alpha, beta = PRESETS[name]
    if omega is None:
        omega = unit_mean_omega(alpha, 2.0 * b0 * (1.0 - delta), omega1)
    return MalagaParams(alpha=alpha, beta=beta, b0=b0, delta=delta, omega=omega, omega1=omega1)


def db_to_linear(db):
    linear = 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return float(linear) if linear.ndim == 0 else linear


def _require_positive(field, value):
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0.0):
        raise InvalidParameter(field, f"must be a finite positive number, got {value!r}")
