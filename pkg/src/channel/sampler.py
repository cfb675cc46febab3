"""Seeded generator of correlated SNR pairs"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from src.errors import InvalidParameter
from src.channel.params import irradiance_second_moment

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 16
_MASK64 = (1 << 64) - 1


@dataclass(eq=False)
class SampleBatch:
    """Realizations of (gamma1, gamma2) plus the large-scale factors behind them."""
    seed: int
    count: int
    gamma1: np.ndarray
    gamma2: np.ndarray
    meta: dict = field(default_factory=dict)
    x1: Optional[np.ndarray] = None
    x2: Optional[np.ndarray] = None


def link_metadata(link):
    """Flat record of every parameter of ``link``."""
    meta = {k: v for k, v in asdict(link.params).items() if v is not None}
    meta.update({"mu1": link.mu1, "mu2": link.mu2, "rho": link.rho})
    return meta


def _block_generator(seed, block):
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, block]))


def _small_scale(rng, params, size):
    """Squared envelope of a Nakagami-shadowed coherent part plus diffuse scatter."""
    coherent = rng.gamma(params.beta, params.los_power / params.beta, size)
    spread = math.sqrt(params.xi / 2.0)
    noise = rng.standard_normal((2, size))
    in_phase = np.sqrt(coherent) + spread * noise[0]
    quadrature = spread * noise[1]
    return in_phase * in_phase + quadrature * quadrature


def draw_block(link, seed, block, size, second_moment=None):
    """One block of draws from its own counter-based stream.

    Returns (gamma1, gamma2, x1, x2). The mixture index is negative binomial
    with success probability 1 - rho^2; given it, the two large-scale factors
    are independent Gamma(alpha + t, scale Omega (1 - rho^2)).
    """
    params = link.params
    if second_moment is None:
        second_moment = irradiance_second_moment(params)
    rng = _block_generator(seed, block)
    rho2 = link.rho ** 2
    if rho2 > 0.0:
        t = rng.negative_binomial(params.alpha, 1.0 - rho2, size)
    else:
        t = np.zeros(size)
    scale = params.omega * (1.0 - rho2)
    x1 = rng.gamma(params.alpha + t, scale)
    x2 = rng.gamma(params.alpha + t, scale)
    y1 = _small_scale(rng, params, size)
    y2 = _small_scale(rng, params, size)
    i1, i2 = x1 * y1, x2 * y2
    gamma1 = link.mu1 * i1 * i1 / second_moment
    gamma2 = link.mu2 * i2 * i2 / second_moment
    return gamma1, gamma2, x1, x2


def block_sizes(count, block_size=BLOCK_SIZE):
    full, rest = divmod(count, block_size)
    return [block_size] * full + ([rest] if rest else [])


def iter_sample_blocks(link, count, seed, block_size=BLOCK_SIZE):
    """Yield (gamma1, gamma2) block by block, in block order."""
    _check_request(count, seed)
    second_moment = irradiance_second_moment(link.params)
    for block, size in enumerate(block_sizes(count, block_size)):
        gamma1, gamma2, _, _ = draw_block(link, seed, block, size, second_moment)
        yield gamma1, gamma2


def sample_pair(link, count, seed, max_workers=4, block_size=BLOCK_SIZE, log=None):
    """Draw ``count`` correlated SNR pairs, bitwise reproducible for a given seed.

    Blocks run in a thread pool and are concatenated in block order, so the
    result does not depend on ``max_workers``.

    Args:
        link: CorrelatedLink
        count: number of pairs (>= 1)
        seed: non-negative integer
        max_workers: threads generating blocks
        log: optional progress callback taking a string
    """
    def _log(msg):
        if log:
            log(msg)

    _check_request(count, seed)
    second_moment = irradiance_second_moment(link.params)
    sizes = block_sizes(count, block_size)
    results = [None] * len(sizes)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {
            executor.submit(draw_block, link, seed, block, size, second_moment): block
            for block, size in enumerate(sizes)
        }
        for done, future in enumerate(as_completed(futures), start=1):
            results[futures[future]] = future.result()
            if done % 16 == 0 or done == len(sizes):
                _log(f"Sampled {done}/{len(sizes)} blocks")

    gamma1, gamma2, x1, x2 = (np.concatenate(parts) for parts in zip(*results))
    logger.info("Drew %d SNR pairs (seed %d, rho %.4g)", count, seed, link.rho)
    return SampleBatch(seed=seed, count=count, gamma1=gamma1, gamma2=gamma2,
                       meta=link_metadata(link), x1=x1, x2=x2)


def _check_request(count, seed):
    if int(count) != count or count < 1:
        raise InvalidParameter("count", f"must be a positive integer, got {count}")
    if int(seed) != seed or seed < 0:
        raise InvalidParameter("seed", f"must be a non-negative integer, got {seed}")
