"""Argument parsing and dispatch for the secrecy-fso command line"""
import argparse
import logging
import sys

import src
from src.errors import ConvergenceError, InvalidParameter, NumericalFailure
from src.cli.config import RunConfig, RS_UNITS, _get_settings, load_config_file
from src.cli.commands import COMMANDS

logger = logging.getLogger("secrecy_fso")

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# arguments that steer the run rather than describe it
_CONTROL_KEYS = ("command", "config", "dump_config", "verbose", "quiet")


def _flag(parser, name, **kwargs):
    parser.add_argument(name, default=None, **kwargs)


def _common_arguments():
    common = argparse.ArgumentParser(add_help=False)
    channel = common.add_argument_group("channel")
    _flag(channel, "--preset", choices=["strong", "moderate", "weak"])
    _flag(channel, "--alpha", type=float)
    _flag(channel, "--beta", type=int)
    _flag(channel, "--b0", type=float)
    _flag(channel, "--delta", type=float)
    _flag(channel, "--omega", type=float, help="large-scale scale (default: unit mean irradiance)")
    _flag(channel, "--omega1", type=float, help="LOS power (default 2.04)")
    _flag(channel, "--omega-prime", type=float, help="LOS power, used with --phi-a/--phi-b instead of --omega1")
    _flag(channel, "--phi-a", type=float)
    _flag(channel, "--phi-b", type=float)

    point = common.add_argument_group("operating point")
    _flag(point, "--mu1-db", help="main-link average SNR in dB: v or start:stop:step")
    _flag(point, "--mu2-db", help="wiretap-link average SNR in dB")
    _flag(point, "--rho", help="correlation: v or start:stop:step")
    _flag(point, "--rs", type=float, help="target secrecy rate")
    _flag(point, "--rs-unit", choices=list(RS_UNITS))

    numerics = common.add_argument_group("numerics")
    _flag(numerics, "--t-max", type=int, help="series terms before extending from the weight tail")
    numerics.add_argument("--strict-t-max", action="store_const", const=True, default=None,
                          help="stop at --t-max instead of extending it")
    _flag(numerics, "--rel-tol", type=float)
    _flag(numerics, "--quad-order", type=int)
    _flag(numerics, "--epsilon-shift", type=float)
    _flag(numerics, "--convention", choices=["factorial_t", "gamma_t"],
          help="mixture-coefficient denominator")
    _flag(numerics, "--kummer", choices=["derived", "printed"], help="Tricomi U parameters in the outage quadrature")
    _flag(numerics, "--scope", choices=["series", "dominant"], help="asymptotic terms kept")
    _flag(numerics, "--metric", choices=["sop", "pnzsc"], help="quantity swept by sweep-rho")

    run = common.add_argument_group("run")
    _flag(run, "--samples", type=int)
    _flag(run, "--seed", type=int)
    _flag(run, "--workers", dest="max_workers", type=int)
    _flag(run, "--out", help="output CSV (default: stdout)")
    _flag(run, "--config", help="key=value file; flags override it")
    run.add_argument("--gnuplot", action="store_const", const=True, default=None,
                     help="write a companion <out>.gp script")
    run.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    run.add_argument("-v", "--verbose", action="store_true")
    run.add_argument("-q", "--quiet", action="store_true")
    return common


def build_parser():
    parser = argparse.ArgumentParser(
        prog="secrecy-fso",
        description="Secrecy outage metrics of correlated Malaga FSO wiretap links")
    parser.add_argument("--version", action="version", version=f"%(prog)s {src.__version__}")
    common = _common_arguments()
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sop", parents=[common], help="exact secrecy outage probability")
    sub.add_parser("pnzsc", parents=[common], help="probability of non-zero secrecy capacity")
    sub.add_parser("asymptotic", parents=[common], help="high-SNR outage probability and slope")
    sub.add_parser("sweep-rho", parents=[common], help="SOP or PNZSC across rho and its worst case")
    sample = sub.add_parser("sample", parents=[common], help="draw correlated SNR pairs")
    sample.add_argument("--large-scale", action="store_const", const=True, default=None,
                        help="also write the large-scale factors x1, x2")
    sub.add_parser("validate", parents=[common], help="check closed forms against the oracles")
    pdf = sub.add_parser("pdf", parents=[common], help="tabulate the joint or marginal SNR density")
    _flag(pdf, "--g1-db", help="main-link SNR grid in dB")
    _flag(pdf, "--g2-db", help="wiretap-link SNR grid in dB (joint density when given)")
    return parser


def resolve_config(args, settings=None):
    """defaults < settings.py < --config file < flags"""
    config = RunConfig.from_settings(settings)
    if args.config:
        config = config.merged(load_config_file(args.config))
    flags = {k: v for k, v in vars(args).items() if k not in _CONTROL_KEYS}
    return config.merged(flags)


def configure_logging(args, settings):
    level = settings.get('LOG_LEVEL', 'INFO')
    if args.verbose:
        level = 'DEBUG'
    elif args.quiet:
        level = 'WARNING'
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def run(argv=None):
    """Parse ``argv``, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    settings = _get_settings()
    configure_logging(args, settings)
    try:
        config = resolve_config(args, settings)
        if args.dump_config:
            sys.stdout.write(config.dump())
            return EXIT_OK
        return COMMANDS[args.command](config, log=logger.info)
    except InvalidParameter as e:
        print(f"error: invalid parameter {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        if isinstance(e, ConvergenceError):
            print(f"  partial value {e.partial_value!r} after {e.terms_used} terms", file=sys.stderr)
        for key, value in sorted(e.diagnostics.items()):
            print(f"  {key}: {value}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
