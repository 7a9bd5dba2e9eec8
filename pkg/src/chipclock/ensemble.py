"""Brute-force thermal ensembles in a 3-D harmonic trap.

Positions are drawn from the Boltzmann distribution, and the closed-form
averages of :mod:`chipclock.shifts` are re-derived by plain sample means.
The same samples give the per-atom shift field and the static (frozen
position) Ramsey contrast decay it causes.

Every Monte-Carlo estimate carries its standard error so comparisons can be
phrased in standard errors instead of absolute tolerances.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import KB
from .shifts import B_MIN_TOLERANCE_G, DomainError, TrapConfig, peak_density
from .species import ClockSpecies, shift_per_density_si


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "MCEstimate":
        x = np.asarray(x, dtype=float)
        err = x.std(ddof=1) / math.sqrt(x.size) if x.size > 1 else math.inf
        return cls(float(x.mean()), float(err))

    def z_score(self, target: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.value == target else math.inf
        return abs(self.value - target) / self.stderr


@dataclass(frozen=True, eq=False)
class ThermalSample:
    positions: np.ndarray  # (n, 3), m
    potential_energies: np.ndarray  # (n,), J
    rng_seed: int
    trap: TrapConfig
    temperature: float
    mass: float

    @property
    def n_samples(self) -> int:
        return self.positions.shape[0]

    @property
    def reduced_energies(self) -> np.ndarray:
        """U / k_B T, Gamma(3/2)-distributed for a thermal cloud."""
        return self.potential_energies / (KB * self.temperature)


@dataclass(frozen=True, eq=False)
class ShiftField:
    zeeman_hz: np.ndarray
    collision_hz: np.ndarray

    @property
    def total_hz(self) -> np.ndarray:
        return self.zeeman_hz + self.collision_hz

    @property
    def mean(self) -> float:
        return float(self.total_hz.mean())

    @property
    def std(self) -> float:
        return float(self.total_hz.std())


@dataclass(frozen=True, eq=False)
class ContrastCurve:
    times: np.ndarray
    contrast: np.ndarray
    mean_shift_Hz: float

    def decay_time(self, level: float = 1 / math.e) -> float:
        """First time the contrast drops to ``level`` (linear interpolation); inf if never."""
        below = np.nonzero(self.contrast < level)[0]
        if below.size == 0:
            return math.inf
        i = below[0]
        if i == 0:
            return float(self.times[0])
        t0, t1 = self.times[i - 1], self.times[i]
        c0, c1 = self.contrast[i - 1], self.contrast[i]
        return float(t0 + (c0 - level) * (t1 - t0) / (c0 - c1))


def sample_thermal_ensemble(trap: TrapConfig, T: float, mass: float, n_samples: int, seed: int) -> ThermalSample:
    """Draw ``n_samples`` positions from a thermal cloud at temperature ``T`` (K)."""
    if not T > 0:
        raise ValueError("temperature must be > 0 K")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    omegas = trap.omegas
    sigma = np.sqrt(KB * T / mass) / omegas
    positions = rng.standard_normal((n_samples, 3)) * sigma
    U = 0.5 * mass * np.sum((omegas * positions) ** 2, axis=1)
    return ThermalSample(positions, U, seed, trap, T, mass)


def potential_energy_moment(sample: ThermalSample, k: int) -> MCEstimate:
    """<(U / k_B T)^k> with standard error. Exact value is Gamma(3/2 + k) / Gamma(3/2)."""
    return MCEstimate.from_samples(sample.reduced_energies**k)


def zeeman_shift_field(sample: ThermalSample, species: ClockSpecies) -> np.ndarray:
    """Per-atom quadratic Zeeman shift (beta/Upsilon^2) U^2 in Hz, trap bottom at B0."""
    if abs(sample.trap.bottom_field(species) - species.B0_magic) > B_MIN_TOLERANCE_G:
        raise DomainError("per-atom Zeeman field needs the trap bottom at the magic field")
    return species.beta_si / species.upsilon**2 * sample.potential_energies**2


def density_at_samples(sample: ThermalSample, N: float) -> np.ndarray:
    """Local number density n(r) of an N-atom cloud at each sampled point (m^-3)."""
    n0 = peak_density(sample.trap, N, sample.temperature, sample.mass)
    return n0 * np.exp(-sample.reduced_energies)


def mc_mean_zeeman_shift(sample: ThermalSample, species: ClockSpecies) -> MCEstimate:
    return MCEstimate.from_samples(zeeman_shift_field(sample, species))


def mc_mean_density(sample: ThermalSample, N: float) -> MCEstimate:
    return MCEstimate.from_samples(density_at_samples(sample, N))


def per_atom_shift_field(sample: ThermalSample, species: ClockSpecies, N: float) -> ShiftField:
    """Zeeman and collision shift seen by each sampled atom, from its potential
    energy and the local density at its position (frozen positions)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    zeeman = zeeman_shift_field(sample, species)
    collision = shift_per_density_si(species) * density_at_samples(sample, N)
    return ShiftField(zeeman, collision)


def static_contrast_decay(shifts, times, chunk: int = 200_000) -> ContrastCurve:
    """Ramsey contrast |<exp(2 pi i (dnu - <dnu>) t)>| of atoms with frozen shifts.

    ``shifts`` is a :class:`ShiftField` or an array of per-atom shifts in Hz.
    """
    dnu = shifts.total_hz if isinstance(shifts, ShiftField) else np.asarray(shifts, dtype=float)
    if dnu.size == 0:
        raise ValueError("shift field is empty")
    times = np.asarray(times, dtype=float)
    mean = float(dnu.mean())
    dev = dnu - mean
    acc = np.zeros(times.size, dtype=complex)
    step = max(1, chunk // max(times.size, 1))
    for start in range(0, dev.size, step):
        phase = 2 * np.pi * np.outer(times, dev[start:start + step])
        acc += np.exp(1j * phase).sum(axis=1)
    contrast = np.abs(acc) / dev.size
    return ContrastCurve(times, np.clip(contrast, 0.0, 1.0), mean)


def write_sample_csv(path: str | Path, sample: ThermalSample, field: ShiftField) -> None:
    """Dump samples and their shifts; columns x,y,z,U_J,dnu_zeeman_Hz,dnu_coll_Hz."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "z", "U_J", "dnu_zeeman_Hz", "dnu_coll_Hz"])
        for (x, y, z), u, dz, dc in zip(sample.positions, sample.potential_energies, field.zeeman_hz, field.collision_hz):
            w.writerow([repr(float(v)) for v in (x, y, z, u, dz, dc)])
