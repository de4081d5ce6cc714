"""Intermediate COCOMO effort model.

Effort (man-months) is ``EAF * a * size**b`` where ``(a, b)`` depend on the
development mode and EAF is the product of the 15 cost-driver multipliers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import NonPositiveSize, UndefinedCell, ValidationError


class DevelopmentMode(enum.Enum):
    ORGANIC = "organic"
    SEMIDETACHED = "semidetached"
    EMBEDDED = "embedded"

    @property
    def coefficients(self) -> tuple[float, float]:
        return _MODE_COEFFICIENTS[self]

    @classmethod
    def parse(cls, text: str) -> "DevelopmentMode":
        key = str(text).strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValidationError(
            f"unknown development mode {text!r}; expected organic, semidetached or embedded"
        )


_MODE_COEFFICIENTS = {
    DevelopmentMode.ORGANIC: (3.2, 1.05),
    DevelopmentMode.SEMIDETACHED: (3.0, 1.12),
    DevelopmentMode.EMBEDDED: (2.8, 1.2),
}


class Level(enum.IntEnum):
    VERY_LOW = 0
    LOW = 1
    NOMINAL = 2
    HIGH = 3
    VERY_HIGH = 4
    EXTRA_HIGH = 5

    @property
    def label(self) -> str:
        return "".join(part.capitalize() for part in self.name.split("_"))

    @classmethod
    def parse(cls, text) -> "Level":
        if isinstance(text, Level):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "").replace(" ", "")
        try:
            return _LEVEL_ALIASES[key]
        except KeyError:
            raise ValidationError(f"unknown rating level {text!r}") from None


_LEVEL_ALIASES = {
    "verylow": Level.VERY_LOW, "vl": Level.VERY_LOW,
    "low": Level.LOW, "l": Level.LOW,
    "nominal": Level.NOMINAL, "n": Level.NOMINAL,
    "high": Level.HIGH, "h": Level.HIGH,
    "veryhigh": Level.VERY_HIGH, "vh": Level.VERY_HIGH,
    "extrahigh": Level.EXTRA_HIGH, "xh": Level.EXTRA_HIGH, "eh": Level.EXTRA_HIGH,
}

DRIVERS = (
    "RELY", "DATA", "CPLX", "TIME", "STOR", "VIRT", "TURN",
    "ACAP", "AEXP", "PCAP", "VEXP", "LEXP", "MODP", "TOOL", "SCED",
)

_ = None  # undefined cell
# Columns: very low, low, nominal, high, very high, extra high.
_TABLE_ROWS = {
    "RELY": (0.75, 0.88, 1.00, 1.15, 1.40, _),
    "DATA": (_, 0.94, 1.00, 1.08, 1.16, _),
    "CPLX": (0.70, 0.85, 1.00, 1.15, 1.30, 1.65),
    "TIME": (_, _, 1.00, 1.11, 1.30, 1.66),
    "STOR": (_, _, 1.00, 1.06, 1.21, 1.56),
    "VIRT": (_, 0.87, 1.00, 1.15, 1.30, _),
    "TURN": (_, 0.87, 1.00, 1.07, 1.15, _),
    "ACAP": (_, 0.87, 1.00, 1.07, 1.15, _),
    "AEXP": (1.29, 1.13, 1.00, 0.91, 0.82, _),
    "PCAP": (1.42, 1.17, 1.00, 0.86, 0.70, _),
    "VEXP": (1.21, 1.10, 1.00, 0.90, _, _),
    "LEXP": (1.14, 1.07, 1.00, 0.95, _, _),
    "MODP": (1.24, 1.10, 1.00, 0.91, 0.82, _),
    "TOOL": (1.24, 1.10, 1.00, 0.91, 0.83, _),
    "SCED": (1.23, 1.08, 1.00, 1.04, 1.10, _),
}
del _

# Undefined cells are absent rather than stored as zero.
COST_DRIVER_TABLE: Mapping[str, Mapping[Level, float]] = {
    driver: {Level(i): v for i, v in enumerate(row) if v is not None}
    for driver, row in _TABLE_ROWS.items()
}


def _driver_key(driver: str) -> str:
    key = str(driver).strip().upper()
    if key not in COST_DRIVER_TABLE:
        raise ValidationError(f"unknown cost driver {driver!r}")
    return key


def lookup_multiplier(driver: str, level) -> float:
    """Return the multiplier for ``driver`` rated at ``level``.

    Raises
    ------
    UndefinedCell
        If the table has no entry at that cell (e.g. TIME rated very low).
    """
    key = _driver_key(driver)
    lvl = Level.parse(level)
    try:
        return COST_DRIVER_TABLE[key][lvl]
    except KeyError:
        raise UndefinedCell(key, lvl.label) from None


def eaf_from_multipliers(multipliers: Sequence[float]) -> float:
    """Product of 15 numeric multipliers, taken in the given order."""
    values = [float(m) for m in multipliers]
    if len(values) != len(DRIVERS):
        raise ValidationError(f"expected {len(DRIVERS)} multipliers, got {len(values)}")
    if any(not (m > 0 and math.isfinite(m)) for m in values):
        raise ValidationError("multipliers must be finite and positive")
    eaf = 1.0
    for m in values:
        eaf *= m
    return eaf


def compute_eaf(ratings: Mapping[str, object]) -> float:
    """Effort adjustment factor for a complete assignment of levels to the 15 drivers."""
    normalized = {_driver_key(d): lvl for d, lvl in ratings.items()}
    if len(normalized) != len(ratings):
        raise ValidationError("a cost driver is rated more than once")
    missing = [d for d in DRIVERS if d not in normalized]
    if missing:
        raise ValidationError(f"unrated cost drivers: {', '.join(missing)}")
    return eaf_from_multipliers([lookup_multiplier(d, normalized[d]) for d in DRIVERS])


def nominal_ratings() -> dict[str, Level]:
    return {d: Level.NOMINAL for d in DRIVERS}


@dataclass(frozen=True)
class CocomoInput:
    """Mode and size plus either symbolic ratings or the 15 numeric multipliers.

    Drivers missing from ``ratings`` are not defaulted; pass
    ``{**nominal_ratings(), ...}`` to start from an all-nominal project.
    """

    mode: DevelopmentMode
    size: float
    ratings: Optional[Mapping[str, object]] = None
    multipliers: Optional[Sequence[float]] = None

    def __post_init__(self):
        if (self.ratings is None) == (self.multipliers is None):
            raise ValidationError("give exactly one of ratings or multipliers")

    @property
    def eaf(self) -> float:
        if self.multipliers is not None:
            return eaf_from_multipliers(self.multipliers)
        return compute_eaf(self.ratings)


def effort(mode: DevelopmentMode, size: float, eaf: float = 1.0) -> float:
    """``eaf * a * size**b`` for the mode's coefficients."""
    size = float(size)
    if not size > 0:
        raise NonPositiveSize(f"size must be positive, got {size}")
    if not eaf > 0:
        raise ValidationError(f"EAF must be positive, got {eaf}")
    a, b = DevelopmentMode(mode).coefficients
    return eaf * a * size**b


def estimate_effort(inp: CocomoInput) -> float:
    return effort(inp.mode, inp.size, inp.eaf)
