"""CSV persistence of sample batches with a key=value metadata sidecar"""
import logging
import os

import numpy as np
import pandas as pd

from src.channel.sampler import SampleBatch

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def sidecar_path(path):
    return f"{path}.meta"


def write_batch(batch, path, include_large_scale=False):
    """Write ``batch`` to ``path`` (CSV) and its metadata to ``path``.meta.

    Columns are gamma1,gamma2 and, on request, the large-scale factors x1,x2.
    Output is byte-identical for identical batches.
    """
    columns = {"gamma1": batch.gamma1, "gamma2": batch.gamma2}
    if include_large_scale:
        if batch.x1 is None or batch.x2 is None:
            raise ValueError("batch carries no large-scale factors")
        columns.update({"x1": batch.x1, "x2": batch.x2})
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    meta = {"seed": batch.seed, "count": batch.count, **batch.meta}
    with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as f:
        for key in sorted(meta):
            f.write(f"{key}={_format_value(meta[key])}\n")
    logger.info("Wrote %d pairs to %s", batch.count, path)


def read_batch(path):
    """Load a batch written by write_batch."""
    df = pd.read_csv(path, dtype=float, float_precision="round_trip")
    meta = {}
    with open(sidecar_path(path), encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            meta[key.strip()] = _parse_value(value.strip())
    seed = int(meta.pop("seed"))
    count = int(meta.pop("count"))
    return SampleBatch(
        seed=seed,
        count=count,
        gamma1=df["gamma1"].to_numpy(),
        gamma2=df["gamma2"].to_numpy(),
        meta=meta,
        x1=df["x1"].to_numpy() if "x1" in df else None,
        x2=df["x2"].to_numpy() if "x2" in df else None,
    )


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.floating):
        return repr(float(value))
    return str(value)


def _parse_value(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text
