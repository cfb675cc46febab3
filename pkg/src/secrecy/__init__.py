"""Secrecy metrics over correlated Málaga links"""
from src.numerics import SeriesNumerics, DenominatorConvention, KummerConvention
from .models import SecrecyTarget, SopResult, AsymptoticResult, CriticalRho
from .outage import secrecy_rate, sop_exact
from .pnzsc import pnzsc_exact
from .asymptotic import sop_asymptotic, asymptotic_slope
from .sweep import sweep, critical_rho, classify_profile

__all__ = [
    'SeriesNumerics',
    'DenominatorConvention',
    'KummerConvention',
    'SecrecyTarget',
    'SopResult',
    'AsymptoticResult',
    'CriticalRho',
    'secrecy_rate',
    'sop_exact',
    'pnzsc_exact',
    'sop_asymptotic',
    'asymptotic_slope',
    'sweep',
    'critical_rho',
    'classify_profile'
]
