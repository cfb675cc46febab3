"""Run configuration: settings module, key=value config files and flags"""
import hashlib
import importlib
import logging
import math
from dataclasses import dataclass, fields, replace
from typing import Optional

import numpy as np

from src.errors import InvalidParameter
from src.numerics import SeriesNumerics
from src.channel.params import (
    PRESET_B0, PRESET_DELTA, PRESET_OMEGA1, PRESETS,
    MalagaParams, CorrelatedLink, db_to_linear, unit_mean_omega,
)
from src.secrecy.models import SecrecyTarget

logger = logging.getLogger(__name__)

# Built-in values for every settings key, used when settings.py is absent
DEFAULT_SETTINGS = {
    'T_MAX': 120,
    'REL_TOL': 1e-10,
    'QUAD_ORDER': 30,
    'EPSILON_SHIFT': 1e-6,
    'DEFAULT_SAMPLES': 1_000_000,
    'DEFAULT_SEED': 42,
    'MAX_WORKERS': 4,
    'WRITE_GNUPLOT': False,
    'LOG_LEVEL': 'INFO',
}

RS_UNITS = ("nats", "bits")


def _get_settings():
    """Reload and get settings as a dict, falling back to the built-in values"""
    values = dict(DEFAULT_SETTINGS)
    try:
        import settings
        importlib.reload(settings)
    except ImportError:
        logger.debug("No settings.py found, using built-in defaults")
        return values
    for key in values:
        if hasattr(settings, key):
            values[key] = getattr(settings, key)
    return values


@dataclass(frozen=True)
class RunConfig:
    """Everything one command needs. SNRs are kept in dB; conversion to
    linear happens in ``link()`` only."""
    preset: Optional[str] = None
    alpha: Optional[float] = None
    beta: Optional[int] = None
    b0: Optional[float] = None
    delta: Optional[float] = None
    omega: Optional[float] = None
    omega1: Optional[float] = None
    omega_prime: Optional[float] = None
    phi_a: float = 0.0
    phi_b: float = 0.0
    mu1_db: str = "30"
    mu2_db: str = "10"
    rho: str = "0"
    rs: float = 0.0
    rs_unit: str = "nats"
    t_max: int = 120
    strict_t_max: bool = False
    rel_tol: float = 1e-10
    quad_order: int = 30
    epsilon_shift: float = 1e-6
    convention: str = "factorial_t"
    kummer: str = "derived"
    scope: str = "series"
    metric: str = "sop"
    samples: int = 1_000_000
    seed: int = 42
    max_workers: int = 4
    gnuplot: bool = False
    out: Optional[str] = None
    g1_db: Optional[str] = None
    g2_db: Optional[str] = None
    large_scale: bool = False

    @classmethod
    def from_settings(cls, settings=None):
        s = settings if settings is not None else _get_settings()
        return cls(t_max=int(s['T_MAX']), rel_tol=float(s['REL_TOL']), quad_order=int(s['QUAD_ORDER']),
                   epsilon_shift=float(s['EPSILON_SHIFT']), samples=int(s['DEFAULT_SAMPLES']),
                   seed=int(s['DEFAULT_SEED']), max_workers=int(s['MAX_WORKERS']),
                   gnuplot=bool(s['WRITE_GNUPLOT']))

    def merged(self, values):
        """Copy with ``values`` (field name -> raw value or string) applied.
        ``None`` entries are skipped."""
        known = {f.name: f for f in fields(self)}
        updates = {}
        for key, raw in values.items():
            if raw is None:
                continue
            key = key.replace("-", "_")
            if key not in known:
                raise InvalidParameter(key, "unknown configuration key")
            updates[key] = _coerce(key, known[key].type, raw)
        return replace(self, **updates)

    def dump(self):
        """key=value text of every set field, sorted; loads back through
        ``--config``."""
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if value is None or f.name == "out":
                continue
            lines.append(f"{f.name}={_format(value)}")
        return "\n".join(lines) + "\n"

    def config_hash(self):
        return hashlib.sha256(self.dump().encode("utf-8")).hexdigest()[:16]

    # -- derived objects -------------------------------------------------

    def channel_params(self):
        """MalagaParams from the preset and explicit overrides."""
        alpha, beta = self.alpha, self.beta
        if self.preset is not None:
            if self.preset not in PRESETS:
                raise InvalidParameter("preset", f"unknown preset '{self.preset}', choose from {sorted(PRESETS)}")
            preset_alpha, preset_beta = PRESETS[self.preset]
            alpha = preset_alpha if alpha is None else alpha
            beta = preset_beta if beta is None else beta
        if alpha is None or beta is None:
            raise InvalidParameter("alpha", "give --preset or both --alpha and --beta")
        b0 = PRESET_B0 if self.b0 is None else self.b0
        delta = PRESET_DELTA if self.delta is None else self.delta
        omega1 = self.omega1
        if omega1 is None and self.omega_prime is None:
            omega1 = PRESET_OMEGA1
        params = MalagaParams(alpha=alpha, beta=beta, b0=b0, delta=delta, omega=1.0, omega1=omega1,
                              omega_prime=self.omega_prime, phi_a=self.phi_a, phi_b=self.phi_b)
        omega = self.omega
        if omega is None:
            omega = unit_mean_omega(params.alpha, params.xi, params.los_power)
        return replace(params, omega=omega)

    def numerics(self):
        return SeriesNumerics(t_max=self.t_max, rel_tol=self.rel_tol, quad_order=self.quad_order,
                              epsilon_shift=self.epsilon_shift, denominator_convention=self.convention,
                              kummer_convention=self.kummer, adaptive_t_max=not self.strict_t_max)

    def target(self):
        if self.rs_unit not in RS_UNITS:
            raise InvalidParameter("rs_unit", f"must be one of {RS_UNITS}, got {self.rs_unit!r}")
        if self.rs_unit == "bits":
            return SecrecyTarget.from_bits(self.rs)
        return SecrecyTarget(rs=self.rs)

    def mu1_grid(self):
        return parse_grid("mu1_db", self.mu1_db)

    def mu2_value(self):
        values = parse_grid("mu2_db", self.mu2_db)
        if len(values) != 1:
            raise InvalidParameter("mu2_db", "takes a single value")
        return values[0]

    def rho_grid(self):
        return parse_grid("rho", self.rho)

    def single_sweep(self):
        """Grid points as (mu1_db, rho) pairs with at most one swept dimension."""
        mu1, rho = self.mu1_grid(), self.rho_grid()
        if len(mu1) > 1 and len(rho) > 1:
            raise InvalidParameter("rho", "only one of mu1_db and rho may be a range")
        return [(m, r) for m in mu1 for r in rho]

    def link(self, mu1_db, rho, params=None):
        """CorrelatedLink at one grid point; the only dB to linear conversion."""
        params = params or self.channel_params()
        return CorrelatedLink(params=params, mu1=db_to_linear(mu1_db),
                              mu2=db_to_linear(self.mu2_value()), rho=float(rho))


def parse_grid(field, text):
    """``v`` or inclusive ``start:stop:step`` into a list of floats."""
    text = str(text).strip()
    parts = text.split(":")
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise InvalidParameter(field, f"expected a number or start:stop:step, got {text!r}")
    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3:
        raise InvalidParameter(field, f"expected start:stop:step, got {text!r}")
    start, stop, step = numbers
    if not step > 0.0 or stop < start:
        raise InvalidParameter(field, f"range needs step > 0 and stop >= start, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [float(v) for v in np.round(start + step * np.arange(count), 12)]


def load_config_file(path):
    """Flat key=value file, UTF-8, ``#`` comments. Returns a dict of strings."""
    values = {}
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InvalidParameter("config", f"{path}:{number}: expected key=value")
            values[key.strip()] = value.strip()
    return values


def _coerce(key, annotation, raw):
    if not isinstance(raw, str):
        return raw
    kind = str(annotation)
    try:
        if "bool" in kind:
            lowered = raw.lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return lowered in ("true", "1", "yes")
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise InvalidParameter(key, f"cannot parse {raw!r}")
    return raw


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)
