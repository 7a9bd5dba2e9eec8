"""Physical constants (CODATA values as shipped with scipy)."""

from dataclasses import dataclass

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # J s
    k_B: float  # J/K
    mu_B: float  # J/T
    a0_bohr_radius: float  # m
    h_planck: float  # J s

    def __post_init__(self):
        for name in ("hbar", "k_B", "mu_B", "a0_bohr_radius", "h_planck"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


CODATA = PhysicalConstants(
    hbar=_sc.hbar,
    k_B=_sc.k,
    mu_B=_sc.physical_constants["Bohr magneton"][0],
    a0_bohr_radius=_sc.physical_constants["Bohr radius"][0],
    h_planck=_sc.h,
)

HBAR = CODATA.hbar
KB = CODATA.k_B
H = CODATA.h_planck
A0 = CODATA.a0_bohr_radius
MU_B = CODATA.mu_B
AMU = _sc.atomic_mass
