"""Subcommand implementations. Each returns an exit code."""
import logging
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from src.errors import InvalidParameter
from src.channel import db_to_linear, joint_pdf, marginal_pdf, sample_pair, write_batch
from src.secrecy import (
    SecrecyTarget, sop_exact, pnzsc_exact, sop_asymptotic, critical_rho, sweep,
)
from src.oracle import sop_quad2d, sop_mc, normalization_check
from src.cli.config import RunConfig, parse_grid
from src.cli.output import header_lines, write_table, write_gnuplot

logger = logging.getLogger(__name__)

VALIDATION_PRESETS = ("strong", "weak")
# (preset, mu1_db, mu2_db, rho, rs in nats) of the oracle checks
STANDARD_GRID = [
    (preset, mu1_db, 5.0, rho, rs)
    for preset in VALIDATION_PRESETS
    for rho in (0.1, 0.5, 0.9)
    for mu1_db in (10.0, 30.0, 50.0)
    for rs in (0.0, 0.5)
]
# (preset, rho) of the normalization checks, both links at NORMALIZATION_SNR_DB
NORMALIZATION_GRID = [(preset, rho) for preset in VALIDATION_PRESETS for rho in (0.0, 0.3, 0.6, 0.9)]
NORMALIZATION_SNR_DB = 10.0
NORMALIZATION_TOL = 1e-3
QUAD2D_REL_TOL = 1e-3
MC_SIGMAS = 3.0
PNZSC_TOL = 1e-4


def _point_frame(config, points, values, extra=None):
    target = config.target()
    mu2_db = config.mu2_value()
    frame = pd.DataFrame({
        "mu1_db": [p[0] for p in points],
        "mu2_db": [mu2_db] * len(points),
        "rho": [p[1] for p in points],
        "rs": [target.rs] * len(points),
        "value": values,
    })
    for name, column in (extra or {}).items():
        frame[name] = column
    return frame


def _emit(command, config, frame, extra_comments=None, x_column="mu1_db", y_column="value"):
    write_table(frame, config.out, header_lines(command, config, extra_comments))
    if config.gnuplot and config.out is not None:
        script = write_gnuplot(config.out, x_column, y_column, list(frame.columns), title=command)
        logger.info("Wrote gnuplot script %s", script)


def _evaluate_points(config, evaluate, log=None):
    params = config.channel_params()
    points = config.single_sweep()
    results = sweep(lambda p: evaluate(config.link(p[0], p[1], params)), points,
                    max_workers=config.max_workers, log=log)
    return points, results


def _x_column(config):
    return "rho" if len(config.rho_grid()) > 1 else "mu1_db"


def cmd_sop(config: RunConfig, log=None):
    target, num = config.target(), config.numerics()
    points, results = _evaluate_points(config, lambda link: sop_exact(link, target, num), log)
    frame = _point_frame(config, points, [r.value for r in results])
    _emit("sop", config, frame, x_column=_x_column(config))
    return 0


def cmd_pnzsc(config: RunConfig, log=None):
    num = config.numerics()
    points, values = _evaluate_points(config, lambda link: pnzsc_exact(link, num), log)
    frame = _point_frame(config, points, values)
    _emit("pnzsc", config, frame, x_column=_x_column(config))
    return 0


def cmd_asymptotic(config: RunConfig, log=None):
    target, num = config.target(), config.numerics()
    points, results = _evaluate_points(
        config, lambda link: sop_asymptotic(link, target, num, scope=config.scope), log)
    frame = _point_frame(config, points, [r.value for r in results],
                         extra={"slope": [r.slope for r in results]})
    _emit("asymptotic", config, frame, x_column=_x_column(config))
    return 0


def cmd_sweep_rho(config: RunConfig, log=None):
    mu1 = config.mu1_grid()
    if len(mu1) != 1:
        raise InvalidParameter("mu1_db", "sweep-rho sweeps rho; give a single mu1 value")
    grid = config.rho_grid()
    link = config.link(mu1[0], grid[0])
    result = critical_rho(link, config.target(), config.numerics(), grid=grid,
                          max_workers=config.max_workers, log=log, metric=config.metric)
    points = [(mu1[0], rho) for rho, _ in result.curve]
    frame = _point_frame(config, points, [value for _, value in result.curve])
    comments = {"metric": result.metric, "rho_star": repr(result.rho_star), "profile": result.shape}
    _emit("sweep-rho", config, frame, comments, x_column="rho")
    return 0


def cmd_sample(config: RunConfig, log=None):
    if config.out is None:
        raise InvalidParameter("out", "sample needs an output path")
    if config.samples < 1:
        raise InvalidParameter("samples", f"must be a positive integer, got {config.samples}")
    mu1 = config.mu1_grid()
    rho = config.rho_grid()
    if len(mu1) != 1 or len(rho) != 1:
        raise InvalidParameter("mu1_db", "sample draws at a single (mu1, rho) point")
    link = config.link(mu1[0], rho[0])
    batch = sample_pair(link, config.samples, config.seed, max_workers=config.max_workers, log=log)
    batch.meta.update({"mu1_db": mu1[0], "mu2_db": config.mu2_value(), "config_hash": config.config_hash()})
    write_batch(batch, config.out, include_large_scale=config.large_scale)
    return 0


def cmd_pdf(config: RunConfig, log=None):
    """Tabulate the joint density on a g1 x g2 grid, or the main-link
    marginal when only ``g1_db`` is given."""
    if config.g1_db is None:
        raise InvalidParameter("g1_db", "pdf needs --g1-db")
    mu1, rho = config.mu1_grid(), config.rho_grid()
    if len(mu1) != 1 or len(rho) != 1:
        raise InvalidParameter("mu1_db", "pdf tabulates at a single (mu1, rho) point")
    link = config.link(mu1[0], rho[0])
    g1_db = parse_grid("g1_db", config.g1_db)
    if config.g2_db is None:
        density = marginal_pdf(link.params, link.mu1, db_to_linear(np.asarray(g1_db)), config.numerics())
        frame = pd.DataFrame({"g_db": g1_db, "density": np.atleast_1d(density)})
        _emit("pdf", config, frame, x_column="g_db", y_column="density")
        return 0
    g2_db = parse_grid("g2_db", config.g2_db)
    grid1, grid2 = np.meshgrid(g1_db, g2_db, indexing="ij")
    density = joint_pdf(link, db_to_linear(grid1.ravel()), db_to_linear(grid2.ravel()), config.numerics())
    frame = pd.DataFrame({"g1_db": grid1.ravel(), "g2_db": grid2.ravel(),
                          "density": np.atleast_1d(density)})
    _emit("pdf", config, frame, x_column="g1_db", y_column="density")
    return 0


@dataclass
class CheckResult:
    check: str
    point: str
    value: float
    reference: float
    tolerance: float
    passed: bool


def run_validation(config: RunConfig, grid=None, log=None, normalization_grid=None):
    """Run the oracle checks over ``grid`` and return the CheckResult list.

    The channel preset, SNRs, correlation and rate come from the grid; the
    numerics and Monte Carlo settings come from ``config``. Normalization is
    checked over ``normalization_grid``, which defaults to NORMALIZATION_GRID
    only when ``grid`` does too. The PNZSC identity is checked at rs = 0.
    """
    def _log(msg):
        if log:
            log(msg)

    if normalization_grid is None:
        normalization_grid = NORMALIZATION_GRID if grid is None else []
    num = config.numerics()
    results = []
    for preset, rho in normalization_grid:
        point_config = replace(config, preset=preset, alpha=None, beta=None, mu2_db=str(NORMALIZATION_SNR_DB))
        link = point_config.link(NORMALIZATION_SNR_DB, rho)
        label = f"{preset} mu1=mu2={NORMALIZATION_SNR_DB:g}dB rho={rho:g}"
        _log(f"Normalizing {label}")
        deviation = normalization_check(link, num, abs_tol=1e-5)
        results.append(CheckResult("normalization", label, 1.0 + deviation, 1.0, NORMALIZATION_TOL,
                                   bool(abs(deviation) < NORMALIZATION_TOL)))

    for preset, mu1_db, mu2_db, rho, rs in grid or STANDARD_GRID:
        point_config = replace(config, preset=preset, alpha=None, beta=None, mu2_db=str(mu2_db))
        link = point_config.link(mu1_db, rho)
        target = SecrecyTarget(rs=rs)
        label = f"{preset} mu1={mu1_db:g}dB mu2={mu2_db:g}dB rho={rho:g} rs={rs:g}"
        _log(f"Validating {label}")

        exact = sop_exact(link, target, num).value
        quad = sop_quad2d(link, target, abs_tol=max(1e-8, 1e-5 * exact), num=num)
        tolerance = QUAD2D_REL_TOL * max(abs(quad), 1e-12)
        results.append(CheckResult("sop exact vs quad2d", label, exact, quad, tolerance,
                                   bool(abs(exact - quad) <= tolerance)))

        mc = sop_mc(link, target, config.samples, config.seed)
        results.append(CheckResult("sop exact vs monte carlo", label, exact, mc.value,
                                   MC_SIGMAS * max(mc.std_error, 1.0 / mc.samples),
                                   bool(mc.within(exact, MC_SIGMAS))))

        if rs == 0.0:
            pnz = pnzsc_exact(link, num)
            results.append(CheckResult("pnzsc vs 1 - sop(rs=0)", label, pnz, 1.0 - exact, PNZSC_TOL,
                                       bool(abs(pnz - (1.0 - exact)) < PNZSC_TOL)))
    return results


def cmd_validate(config: RunConfig, log=None, grid=None, normalization_grid=None):
    results = run_validation(config, grid, log, normalization_grid)
    frame = pd.DataFrame([vars(r) for r in results])
    frame["status"] = np.where(frame["passed"], "PASS", "FAIL")
    print(frame[["check", "point", "value", "reference", "tolerance", "status"]].to_string(index=False))
    failures = [r for r in results if not r.passed]
    if config.out is not None:
        write_table(frame.drop(columns="status"), config.out, header_lines("validate", config))
    if failures:
        print(f"\n{len(failures)} of {len(results)} checks failed:")
        for r in failures:
            print(f"  {r.check} at {r.point}: {r.value:.10g} vs {r.reference:.10g} (tol {r.tolerance:.3g})")
        return 1
    print(f"\nAll {len(results)} checks passed")
    return 0


COMMANDS = {
    "sop": cmd_sop,
    "pnzsc": cmd_pnzsc,
    "asymptotic": cmd_asymptotic,
    "sweep-rho": cmd_sweep_rho,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "pdf": cmd_pdf,
}
