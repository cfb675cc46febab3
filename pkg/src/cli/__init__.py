"""Command-line surface"""
from .config import RunConfig, parse_grid, load_config_file
from .commands import COMMANDS, STANDARD_GRID, run_validation
from .parser import build_parser, run

__all__ = [
    'RunConfig',
    'parse_grid',
    'load_config_file',
    'COMMANDS',
    'STANDARD_GRID',
    'run_validation',
    'build_parser',
    'run'
]
