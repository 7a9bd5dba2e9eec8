"""Closed-form shift budget and operating point of a magic-field trap clock.

A thermal cloud in a harmonic magnetic trap with its bottom at the magic field
sees two shifts of opposite sign: a quadratic Zeeman shift growing as T^2 and
a (negative, for 87Rb) cold-collision shift growing as T^-3/2. Their sum
crosses zero at a single temperature, which is the natural operating point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import HBAR, KB
from .species import ClockSpecies, derive_chi, derive_zeta, shift_per_density_si

_UK = 1e-6

#: Trap-bottom field counts as "at the magic field" within this many gauss.
B_MIN_TOLERANCE_G = 1e-6
#: Thermal formulas need k_B T >> hbar wbar; warn below this ratio.
ZERO_POINT_RATIO = 10.0


class ShiftModelWarning(UserWarning):
    """Inputs are outside the regime where the closed forms hold."""


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class TrapConfig:
    """Harmonic trap: angular frequencies in rad/s, trap-bottom field in gauss.

    ``B_min=None`` means the trap bottom sits at the species' magic field.
    """

    omega_x: float
    omega_y: float
    omega_z: float
    B_min: float | None = None

    def __post_init__(self):
        for name in ("omega_x", "omega_y", "omega_z"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def from_hz(cls, fx: float, fy: float | None = None, fz: float | None = None, B_min=None):
        """Trap from ordinary frequencies f = omega/2pi; one value gives an isotropic trap."""
        fy = fx if fy is None else fy
        fz = fx if fz is None else fz
        tp = 2 * math.pi
        return cls(tp * fx, tp * fy, tp * fz, B_min)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([self.omega_x, self.omega_y, self.omega_z])

    @property
    def omega_bar(self) -> float:
        return (self.omega_x * self.omega_y * self.omega_z) ** (1.0 / 3.0)

    def bottom_field(self, species: ClockSpecies) -> float:
        return species.B0_magic if self.B_min is None else self.B_min


@dataclass(frozen=True)
class Ensemble:
    atom_count: int
    temperature: float  # K

    def __post_init__(self):
        if self.atom_count < 1 or int(self.atom_count) != self.atom_count:
            raise ValueError("atom_count must be an integer >= 1")
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0 K")


@dataclass(frozen=True)
class ShiftBreakdown:
    zeeman_Hz: float
    collision_Hz: float
    total_Hz: float
    mean_density: float  # m^-3
    fractional_total: float


class CloudSize(NamedTuple):
    x: float
    y: float
    z: float
    geometric: float


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def zeeman_shift_at_field(species: ClockSpecies, B):
    """beta (B - B0)^2 in Hz, relative to the magic-field frequency. B in gauss."""
    return _scalar_or_array(species.beta * (np.asarray(B, dtype=float) - species.B0_magic) ** 2)


def standard_zeeman_shift(species: ClockSpecies, B):
    """beta' B^2 in Hz: m_F = 0 -> 0 transition relative to its zero-field frequency."""
    return _scalar_or_array(species.beta_prime * np.square(np.asarray(B, dtype=float)))


def trap_potential_energy(species: ClockSpecies, B, B_min):
    """Linear trap potential Upsilon (B - B_min) in J (fields in gauss)."""
    dB = np.asarray(B, dtype=float) - B_min
    if np.any(dB < 0):
        raise DomainError("field below the trap bottom B_min is outside the trap model")
    return _scalar_or_array(species.upsilon * dB * 1e-4)


def _check_temperature(trap: TrapConfig | None, T: float):
    if trap is not None and KB * T < ZERO_POINT_RATIO * HBAR * trap.omega_bar:
        warnings.warn(
            f"k_B T = {KB * T / (HBAR * trap.omega_bar):.2g} hbar*wbar; "
            "zero-point energy is no longer negligible",
            ShiftModelWarning,
            stacklevel=3,
        )


def _check_bottom_field(species: ClockSpecies, trap: TrapConfig):
    B_min = trap.bottom_field(species)
    if abs(B_min - species.B0_magic) > B_MIN_TOLERANCE_G:
        warnings.warn(
            f"trap bottom {B_min} G differs from the magic field {species.B0_magic} G; "
            "thermal Zeeman average assumes they coincide "
            "(see zeeman_offset_correction for the first-order term)",
            ShiftModelWarning,
            stacklevel=3,
        )


def mean_zeeman_shift(species: ClockSpecies, T: float) -> float:
    """Thermal average zeta T^2 (Hz) for a trap whose bottom is at the magic field."""
    if T < 0:
        raise ValueError("temperature must be >= 0")
    return derive_zeta(species) * (T / _UK) ** 2


def zeeman_offset_correction(species: ClockSpecies, B_min: float, T: float) -> float:
    """First-order shift 2 beta (B_min - B0) <U>/Upsilon (Hz) for a detuned trap bottom.

    With <U> = 3/2 k_B T. The exact average also contains beta (B_min - B0)^2.
    """
    mean_U_over_ups_G = 1.5 * KB * T / species.upsilon / 1e-4
    return 2 * species.beta * (B_min - species.B0_magic) * mean_U_over_ups_G


def peak_density(trap: TrapConfig, N: float, T: float, mass: float) -> float:
    """Central density of a thermal cloud, N wx wy wz (m / 2 pi k_B T)^3/2 (m^-3)."""
    return N * trap.omega_bar**3 * (mass / (2 * math.pi * KB * T)) ** 1.5


def mean_density(species: ClockSpecies, trap: TrapConfig, ensemble: Ensemble) -> float:
    """Density averaged over the atoms, N wbar^3 (m / 4 pi k_B T)^3/2 (m^-3)."""
    T = ensemble.temperature
    return ensemble.atom_count * trap.omega_bar**3 * (species.mass / (4 * math.pi * KB * T)) ** 1.5


def collision_shift_from_density(species: ClockSpecies, n: float) -> float:
    """(2 hbar/m)(a22 - a11) n in Hz, n in m^-3."""
    if np.any(np.asarray(n) < 0):
        raise ValueError("density must be >= 0")
    return shift_per_density_si(species) * n


def mean_collision_shift(species: ClockSpecies, trap: TrapConfig, ensemble: Ensemble) -> float:
    return collision_shift_from_density(species, mean_density(species, trap, ensemble))


def total_shift(species: ClockSpecies, trap: TrapConfig, ensemble: Ensemble) -> ShiftBreakdown:
    """Zeeman + collision shift of a thermal cloud.

    Emits :class:`ShiftModelWarning` (does not fail) when the trap bottom is
    off the magic field or the cloud is too cold for the classical averages.
    """
    _check_bottom_field(species, trap)
    _check_temperature(trap, ensemble.temperature)
    z = mean_zeeman_shift(species, ensemble.temperature)
    n = mean_density(species, trap, ensemble)
    c = collision_shift_from_density(species, n)
    total = z + c
    return ShiftBreakdown(z, c, total, n, total / species.nu0_magic)


def _total_shift_quiet(species, trap, N, T):
    return mean_zeeman_shift(species, T) + collision_shift_from_density(
        species, mean_density(species, trap, Ensemble(N, T))
    )


def zero_shift_temperature(species: ClockSpecies, trap: TrapConfig, N: int, verify: bool = True) -> float:
    """Temperature (K) at which Zeeman and collision shifts cancel.

    Closed form T0 = (chi wbar^3 N / zeta)^(2/7). With ``verify`` the root is
    cross-checked by bisection on the summed shift; a mismatch above 1 mHz
    raises ``RuntimeError`` (it would mean a unit-conversion regression).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    zeta = derive_zeta(species)
    chi = derive_chi(species)
    if zeta <= 0 or chi <= 0:
        raise DomainError("shifts have the same sign; no zero-shift temperature exists")
    T0 = (chi * trap.omega_bar**3 * N / zeta) ** (2.0 / 7.0) * _UK
    if verify:
        residual = _total_shift_quiet(species, trap, N, T0)
        root = bisect_zero_shift_temperature(species, trap, N)
        if abs(residual) > 1e-3 or abs(_total_shift_quiet(species, trap, N, root)) > 1e-3:
            raise RuntimeError(f"zero-shift self-test failed: residual {residual} Hz at T0={T0} K")
    return T0


def bisect_zero_shift_temperature(species: ClockSpecies, trap: TrapConfig, N: int, tol_hz: float = 1e-3) -> float:
    """Root of the summed shift found by plain bisection in log T."""
    lo, hi = 1e-12, 1.0
    f_lo = _total_shift_quiet(species, trap, N, lo)
    f_hi = _total_shift_quiet(species, trap, N, hi)
    if f_lo * f_hi > 0:
        raise DomainError("summed shift does not change sign")
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        f_mid = _total_shift_quiet(species, trap, N, mid)
        if abs(f_mid) < tol_hz * 1e-3 or hi / lo - 1 < 1e-15:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return math.sqrt(lo * hi)


def rms_cloud_size(trap: TrapConfig, T: float, mass: float) -> CloudSize:
    """rms extent sqrt(k_B T / m) / omega per axis and for the geometric-mean frequency (m)."""
    if T < 0:
        raise ValueError("temperature must be >= 0")
    v = math.sqrt(KB * T / mass)
    return CloudSize(v / trap.omega_x, v / trap.omega_y, v / trap.omega_z, v / trap.omega_bar)


def bec_critical_temperature(trap: TrapConfig, N: float) -> float:
    """Ideal-gas condensation temperature 0.94 hbar wbar N^(1/3) / k_B (K)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 0.94 * HBAR * trap.omega_bar * N ** (1.0 / 3.0) / KB


def accuracy_from_atom_number_control(
    species: ClockSpecies, trap: TrapConfig, N: int, relative_N_uncertainty: float
) -> float:
    """Fractional frequency uncertainty from atom-number fluctuations at T0.

    At fixed temperature only the density shift depends on N, linearly, so
    the shift moves by (dN/N) |<dnu_C>(T0)|.
    """
    if relative_N_uncertainty < 0:
        raise ValueError("relative_N_uncertainty must be >= 0")
    T0 = zero_shift_temperature(species, trap, N)
    coll = mean_collision_shift(species, trap, Ensemble(N, T0))
    return relative_N_uncertainty * abs(coll) / species.nu0_magic
