"""Málaga channel model: parameters, densities and sampling"""
from .params import (
    PRESETS,
    MalagaParams,
    CorrelatedLink,
    ChannelConstants,
    derive_constants,
    coupling_constant,
    small_scale_weights,
    irradiance_second_moment,
    unit_mean_omega,
    preset_params,
    db_to_linear
)
from .density import (
    component_cdf,
    component_sf,
    joint_pdf,
    joint_cdf,
    marginal_pdf,
    marginal_cdf,
    marginal_sf
)
from .sampler import SampleBatch, sample_pair, iter_sample_blocks
from .batch_io import write_batch, read_batch

__all__ = [
    'PRESETS',
    'MalagaParams',
    'CorrelatedLink',
    'ChannelConstants',
    'derive_constants',
    'coupling_constant',
    'small_scale_weights',
    'irradiance_second_moment',
    'unit_mean_omega',
    'preset_params',
    'db_to_linear',
    'component_cdf',
    'component_sf',
    'joint_pdf',
    'joint_cdf',
    'marginal_pdf',
    'marginal_cdf',
    'marginal_sf',
    'SampleBatch',
    'sample_pair',
    'iter_sample_blocks',
    'write_batch',
    'read_batch'
]
