"""Result and target records of the secrecy metrics"""
import math
from dataclasses import dataclass, field

from src.errors import InvalidParameter


@dataclass(frozen=True)
class SecrecyTarget:
    """Target secrecy rate ``rs`` in nats per channel use."""
    rs: float

    def __post_init__(self):
        if not (math.isfinite(self.rs) and self.rs >= 0.0):
            raise InvalidParameter("rs", f"must be finite and >= 0, got {self.rs}")

    @property
    def theta(self):
        return math.exp(self.rs)

    @classmethod
    def from_bits(cls, rs_bits):
        return cls(rs=rs_bits * math.log(2.0))


@dataclass
class SopResult:
    value: float
    terms_used: int
    diagnostics: dict = field(default_factory=dict)


@dataclass
class AsymptoticResult:
    """High-SNR outage value, its predicted decay per decade of mu1 and the
    (exponent, coefficient) pairs with value = sum coefficient * mu1^-exponent."""
    value: float
    slope: float
    terms: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


@dataclass
class CriticalRho:
    rho_star: float
    curve: list
    shape: str
    metric: str = "sop"

    @property
    def is_up_down(self):
        return self.shape == "up-down"

    @property
    def reverses(self):
        """The metric turns around inside the grid."""
        return self.shape in ("up-down", "down-up")
