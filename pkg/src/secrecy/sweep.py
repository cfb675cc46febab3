"""Grid drivers: parallel sweeps and the critical correlation"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np

from src.errors import InvalidParameter
from src.secrecy.models import CriticalRho
from src.secrecy.outage import sop_exact
from src.secrecy.pnzsc import pnzsc_exact

logger = logging.getLogger(__name__)

MIN_RHO_POINTS = 5
METRICS = ("sop", "pnzsc")


def sweep(evaluate, points, max_workers=4, log=None):
    """Evaluate ``evaluate(point)`` over ``points`` in a thread pool.

    Results come back in the order of ``points`` whatever the completion
    order. The first exception raised by any point propagates.
    """
    def _log(msg):
        if log:
            log(msg)

    points = list(points)
    results = [None] * len(points)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(evaluate, point): index for index, point in enumerate(points)}
        for done, future in enumerate(as_completed(futures), start=1):
            results[futures[future]] = future.result()
            _log(f"Evaluated {done}/{len(points)} grid points")
    return results


def classify_profile(values):
    """Shape of a sequence: up-down, down-up, increasing, decreasing, flat or irregular."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return "flat"
    steps = np.diff(values)
    if np.all(steps == 0.0):
        return "flat"
    if np.all(steps > 0.0):
        return "increasing"
    if np.all(steps < 0.0):
        return "decreasing"
    peak = int(np.argmax(values))
    if 0 < peak < values.size - 1 and np.all(steps[:peak] > 0.0) and np.all(steps[peak:] < 0.0):
        return "up-down"
    valley = int(np.argmin(values))
    if 0 < valley < values.size - 1 and np.all(steps[:valley] < 0.0) and np.all(steps[valley:] > 0.0):
        return "down-up"
    return "irregular"


def critical_rho(link, target, num=None, grid=None, max_workers=4, log=None, metric="sop"):
    """A secrecy metric across a correlation grid and its worst-case correlation.

    For ``metric="sop"`` the worst case is where the outage probability
    peaks; for ``metric="pnzsc"`` it is where the probability of a positive
    secrecy capacity bottoms out (``target`` is then unused).

    Args:
        link: CorrelatedLink whose rho is replaced by each grid value
        target: SecrecyTarget
        num: SeriesNumerics
        grid: sorted correlation values in [0, 1); defaults to 0, 0.05, ..., 0.95
        max_workers: threads evaluating grid points
        log: optional progress callback
        metric: "sop" or "pnzsc"
    """
    if metric not in METRICS:
        raise InvalidParameter("metric", f"must be one of {METRICS}, got {metric!r}")
    if grid is None:
        grid = np.round(np.arange(20) * 0.05, 10)
    grid = [float(r) for r in grid]
    if not grid:
        raise InvalidParameter("grid", "needs at least one correlation value")
    if any(not 0.0 <= r < 1.0 for r in grid):
        raise InvalidParameter("grid", "correlation values must lie in [0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("grid", "correlation values must be strictly increasing")
    if len(grid) < MIN_RHO_POINTS:
        logger.warning("critical_rho: only %d grid point(s); the worst case is coarse", len(grid))

    def evaluate(rho):
        if metric == "sop":
            return sop_exact(link.with_rho(rho), target, num).value
        return pnzsc_exact(link.with_rho(rho), num)

    values = sweep(evaluate, grid, max_workers=max_workers, log=log)
    worst = np.argmax(values) if metric == "sop" else np.argmin(values)
    rho_star = grid[int(worst)]
    shape = classify_profile(values)
    logger.info("critical rho %.4g for %s (%s profile over %d points)", rho_star, metric, shape, len(grid))
    return CriticalRho(rho_star=rho_star, curve=list(zip(grid, values)), shape=shape, metric=metric)
