"""Clock-species parameter sets and the composite shift coefficients.

The two coefficients that set the operating point of a magic-field trap clock
are derived here from atomic data:

* ``zeta`` -- curvature of the thermally averaged quadratic Zeeman shift,
  ``<dnu_Z> = zeta * T**2`` (Hz/uK^2),
* ``chi`` -- strength of the thermally averaged density shift,
  ``<dnu_C> = -chi * N * wbar**3 / T**1.5`` (Hz s^3 uK^1.5, wbar in rad/s).

Species values are stored in the units atomic-physics tables use (Hz/G^2, G,
Bohr radii) and converted to SI on use.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .constants import A0, AMU, H, HBAR, KB

_UK = 1e-6
_G = 1e-4  # tesla per gauss


@dataclass(frozen=True)
class ClockSpecies:
    """Atomic constants of a magnetically trappable clock transition.

    Attributes
    ----------
    mass : float
        Atomic mass in kg.
    nu0_magic : float
        Transition frequency at the magic field (Hz).
    nu0_zero_field : float
        Zero-field frequency of the m_F = 0 -> 0 transition (Hz).
    B0_magic : float
        Magic field (G).
    beta : float
        Quadratic coefficient of the magic transition around ``B0_magic`` (Hz/G^2).
    beta_prime : float
        Quadratic coefficient of the m_F = 0 -> 0 transition around zero field (Hz/G^2).
    upsilon_over_h : float
        Slope of the trapping potential with field, divided by h (Hz/G).
    a11, a22 : float
        Intra-state s-wave scattering lengths in Bohr radii.
    """

    mass: float
    nu0_magic: float
    nu0_zero_field: float
    B0_magic: float
    beta: float
    beta_prime: float
    upsilon_over_h: float
    a11: float
    a22: float
    name: str = "custom"

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("mass must be > 0")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not self.B0_magic > 0:
            raise ValueError("B0_magic must be > 0")
        if not self.upsilon_over_h > 0:
            raise ValueError("upsilon_over_h must be > 0")
        if not self.nu0_magic > 0:
            raise ValueError("nu0_magic must be > 0")

    # SI views
    @property
    def upsilon(self) -> float:
        """Trap-potential slope dU/dB in J/T."""
        return H * self.upsilon_over_h / _G

    @property
    def beta_si(self) -> float:
        """Quadratic Zeeman coefficient in Hz/T^2."""
        return self.beta / _G**2

    @property
    def delta_a(self) -> float:
        """a22 - a11 in metres."""
        return (self.a22 - self.a11) * A0

    def replace(self, **changes) -> "ClockSpecies":
        return dataclasses.replace(self, **changes)


RB87 = ClockSpecies(
    mass=86.909180527 * AMU,
    nu0_magic=6_834_678_113.59,
    nu0_zero_field=6_834_682_610.90432,
    B0_magic=3.228917,
    beta=431.35957,
    beta_prime=575.14,
    upsilon_over_h=0.70e6,
    a11=100.44,
    a22=95.47,
    name="Rb87",
)

PRESETS = {"Rb87": RB87}

SPECIES_FIELDS = tuple(f.name for f in dataclasses.fields(ClockSpecies) if f.name != "name")


def get_preset(name: str) -> ClockSpecies:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown species preset {name!r}; available: {sorted(PRESETS)}") from None


def species_from_mapping(data: dict, where: str = "species") -> ClockSpecies:
    """Build a species from a plain mapping.

    Keys are the :class:`ClockSpecies` field names. ``preset`` selects a base
    set that the remaining keys override; without it every field is required.
    """
    data = dict(data)
    preset = data.pop("preset", None)
    name = data.pop("name", None)
    unknown = sorted(set(data) - set(SPECIES_FIELDS))
    if unknown:
        raise KeyError(f"{where}.{unknown[0]}: unknown key")
    for key, val in data.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise TypeError(f"{where}.{key}: expected a number, got {val!r}")
    if preset is not None:
        base = get_preset(preset)
        species = base.replace(**{k: float(v) for k, v in data.items()})
        return species.replace(name=name or (preset if not data else f"{preset}*"))
    missing = [k for k in SPECIES_FIELDS if k not in data]
    if missing:
        raise KeyError(f"{where}.{missing[0]}: required key missing (no preset given)")
    return ClockSpecies(**{k: float(v) for k, v in data.items()}, name=name or "custom")


def load_species(path: str | Path) -> ClockSpecies:
    """Read a species description from a TOML file."""
    from .config import read_toml

    data = read_toml(path)
    if "species" in data and isinstance(data["species"], dict):
        data = data["species"]
    return species_from_mapping(data)


def species_to_toml(species: ClockSpecies) -> str:
    lines = [f'name = "{species.name}"']
    for key in SPECIES_FIELDS:
        lines.append(f"{key} = {getattr(species, key)!r}")
    return "\n".join(lines) + "\n"


def derive_zeta(species: ClockSpecies) -> float:
    """Thermal Zeeman curvature zeta = (15/4) beta (k_B/Upsilon)^2, in Hz/uK^2."""
    return 15.0 / 4.0 * species.beta_si * (KB * _UK / species.upsilon) ** 2


def shift_per_density_si(species: ClockSpecies) -> float:
    """(2 hbar/m)(a22 - a11) in Hz m^3."""
    return 2 * HBAR / species.mass * species.delta_a


def shift_per_density(species: ClockSpecies) -> float:
    """Density-shift coefficient in Hz cm^3 (negative for 87Rb)."""
    return shift_per_density_si(species) * 1e6


def derive_chi(species: ClockSpecies) -> float:
    """Collision coefficient chi in Hz s^3 uK^1.5.

    Positive when a11 > a22; the averaged density shift is ``-chi N wbar^3 / T^1.5``.
    """
    return -shift_per_density_si(species) * (species.mass / (4 * math.pi * KB * _UK)) ** 1.5


def s_wave_cross_section(a: float, identical: bool = True) -> float:
    """s-wave cross section for scattering length ``a`` (m): 8 pi a^2 for identical bosons, else 4 pi a^2."""
    if a < 0:
        raise ValueError("scattering length magnitude must be >= 0")
    return (8 if identical else 4) * math.pi * a * a
