"""Independent reference evaluators"""
from .monte_carlo import McEstimate, sop_mc, pnzsc_mc
from .integration import AdaptiveCubature, sop_quad2d, normalization_check, snr_range

__all__ = [
    'McEstimate',
    'sop_mc',
    'pnzsc_mc',
    'AdaptiveCubature',
    'sop_quad2d',
    'normalization_check',
    'snr_range'
]
