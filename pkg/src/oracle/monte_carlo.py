"""Monte Carlo estimators of the secrecy metrics"""
import logging
import math
from dataclasses import dataclass

from src.errors import InvalidParameter
from src.channel.sampler import iter_sample_blocks

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def within(self, reference, n_sigma=3.0):
        """True if ``reference`` lies within ``n_sigma`` standard errors.

        The error is floored at one count so that estimates of exactly 0 or 1
        still admit nearby references.
        """
        return abs(self.value - reference) <= n_sigma * max(self.std_error, 1.0 / self.samples)


def bernoulli_estimate(hits, samples, seed):
    p = hits / samples
    return McEstimate(value=p, std_error=math.sqrt(p * (1.0 - p) / samples), samples=samples, seed=seed)


def count_events(link, samples, seed, event):
    """Number of draws for which ``event(gamma1, gamma2)`` holds."""
    if int(samples) != samples or samples < MIN_SAMPLES:
        raise InvalidParameter("samples", f"Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}")
    hits = 0
    for gamma1, gamma2 in iter_sample_blocks(link, int(samples), seed):
        hits += int(event(gamma1, gamma2).sum())
    return hits


def sop_mc(link, target, samples, seed):
    """Frequency of the outage event gamma1 <= Theta gamma2 + Theta - 1."""
    theta = target.theta
    hits = count_events(link, samples, seed, lambda g1, g2: g1 <= theta * g2 + theta - 1.0)
    estimate = bernoulli_estimate(hits, int(samples), seed)
    logger.debug("sop_mc: %d/%d outages", hits, samples)
    return estimate


def pnzsc_mc(link, samples, seed):
    """Frequency of gamma1 > gamma2; the complement of the rs = 0 outage event
    on the same stream."""
    hits = count_events(link, samples, seed, lambda g1, g2: g1 > g2)
    return bernoulli_estimate(hits, int(samples), seed)
