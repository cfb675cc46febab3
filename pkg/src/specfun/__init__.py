"""Special-function kernels and quadrature rules"""
from .bessel import bessel_k, log_bessel_k
from .gamma import SignedLog, ln_gamma
from .hypergeometric import hyp_pfq, kummer_u, log_kummer_u
from .meijer import MeijerParams, meijer_g, meijer_g_contour, shift_error_bound
from .quadrature import QuadratureRule, halfrange_gauss_rule

__all__ = [
    'SignedLog',
    'ln_gamma',
    'bessel_k',
    'log_bessel_k',
    'kummer_u',
    'log_kummer_u',
    'hyp_pfq',
    'MeijerParams',
    'meijer_g',
    'meijer_g_contour',
    'shift_error_bound',
    'QuadratureRule',
    'halfrange_gauss_rule'
]
