"""CSV tables with # metadata lines and companion gnuplot scripts"""
import logging
import os
import sys

import src

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def header_lines(command, config, extra=None):
    lines = [f"secrecy-fso {src.__version__}", f"command: {command}",
             f"config_hash: {config.config_hash()}"]
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
    return lines


def write_table(frame, path, comments):
    """Write ``frame`` as CSV after ``#`` comment lines; ``path=None`` prints
    to stdout."""
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    text = "".join(f"# {line}\n" for line in comments) + body
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    logger.info("Wrote %d rows to %s", len(frame), path)


def gnuplot_path(path):
    return f"{path}.gp"


def write_gnuplot(path, x_column, y_column, columns, log_y=True, title=None):
    """Companion script plotting ``y_column`` against ``x_column`` of the CSV
    at ``path``."""
    x_index = columns.index(x_column) + 1
    y_index = columns.index(y_column) + 1
    lines = [
        "set datafile separator ','",
        "set datafile commentschars '#'",
        f"set xlabel '{x_column}'",
        f"set ylabel '{y_column}'",
        "set grid",
    ]
    if log_y:
        lines.append("set logscale y")
    if title:
        lines.append(f"set title '{title}'")
    name = os.path.basename(path)
    lines.append(f"plot '{name}' every ::1 using {x_index}:{y_index} with linespoints title '{y_column}'")
    with open(gnuplot_path(path), "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    return gnuplot_path(path)
