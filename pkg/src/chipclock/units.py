"""Unit handling at the API boundary.

Everything inside the package is SI. Gauss, microkelvin and friends only
appear where values enter or leave (config files, CLI, reports), and they are
converted through the tables below.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Dimension(enum.Enum):
    FREQUENCY = "frequency"
    FIELD = "field"
    TEMPERATURE = "temperature"
    LENGTH = "length"
    ANGULAR_FREQUENCY = "angular-frequency"
    DENSITY = "density"
    TIME = "time"
    DIMENSIONLESS = "dimensionless"


# unit -> (dimension, factor to SI)
_UNITS: dict[str, tuple[Dimension, float]] = {
    "Hz": (Dimension.FREQUENCY, 1.0),
    "mHz": (Dimension.FREQUENCY, 1e-3),
    "kHz": (Dimension.FREQUENCY, 1e3),
    "MHz": (Dimension.FREQUENCY, 1e6),
    "GHz": (Dimension.FREQUENCY, 1e9),
    "T": (Dimension.FIELD, 1.0),
    "G": (Dimension.FIELD, 1e-4),
    "mG": (Dimension.FIELD, 1e-7),
    "uG": (Dimension.FIELD, 1e-10),
    "K": (Dimension.TEMPERATURE, 1.0),
    "mK": (Dimension.TEMPERATURE, 1e-3),
    "uK": (Dimension.TEMPERATURE, 1e-6),
    "nK": (Dimension.TEMPERATURE, 1e-9),
    "m": (Dimension.LENGTH, 1.0),
    "cm": (Dimension.LENGTH, 1e-2),
    "mm": (Dimension.LENGTH, 1e-3),
    "um": (Dimension.LENGTH, 1e-6),
    "rad/s": (Dimension.ANGULAR_FREQUENCY, 1.0),
    # ordinary frequency of an oscillation, stored as omega = 2 pi f
    "2pi*Hz": (Dimension.ANGULAR_FREQUENCY, 2 * math.pi),
    "m^-3": (Dimension.DENSITY, 1.0),
    "cm^-3": (Dimension.DENSITY, 1e6),
    "s": (Dimension.TIME, 1.0),
    "ms": (Dimension.TIME, 1e-3),
    "us": (Dimension.TIME, 1e-6),
    "1": (Dimension.DIMENSIONLESS, 1.0),
}


def _lookup(unit: str) -> tuple[Dimension, float]:
    try:
        return _UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {unit!r}; known units: {sorted(_UNITS)}") from None


@dataclass(frozen=True)
class UnitValue:
    """A magnitude tagged with its dimension, held in SI."""

    magnitude: float
    dimension: Dimension

    @classmethod
    def of(cls, value: float, unit: str) -> "UnitValue":
        dim, factor = _lookup(unit)
        return cls(value * factor, dim)

    def to(self, unit: str) -> float:
        dim, factor = _lookup(unit)
        if dim is not self.dimension:
            raise ValueError(f"cannot express {self.dimension.value} in {unit!r}")
        return self.magnitude / factor


def convert(value: float, from_unit: str, to_unit: str) -> float:
    return UnitValue.of(value, from_unit).to(to_unit)


def gauss_to_tesla(b):
    return b * 1e-4


def tesla_to_gauss(b):
    return b / 1e-4


def uk_to_k(t):
    return t * 1e-6


def k_to_uk(t):
    return t / 1e-6
