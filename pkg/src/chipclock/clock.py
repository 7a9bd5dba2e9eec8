"""Discrete-time Ramsey clock loop.

Each cycle the atoms are interrogated for a Ramsey time T against the
steered local oscillator (LO). The accumulated phase is read out through a
projection-noise-limited population measurement, converted back to a
frequency error and fed to an integrating servo. Between interrogations the
LO runs unobserved (readout, recooling, reloading), which is where the Dick
effect comes from: the LO noise is generated on a fine time grid and the
atoms only sample it inside the Ramsey windows.

Probing is done at quadrature: the second Ramsey pulse is phase-shifted by
``probe_phase`` (default +/- pi/2, alternating sides), so that
p = (1 - C cos(phi + theta)) / 2 is linear in phi around lock.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .allan import AllanResult, allan_deviation
from .noise import LoNoiseSpec, synthesize_lo_noise
from .species import RB87, ClockSpecies


class ClockDivergence(RuntimeError):
    """The servo lost the central fringe."""

    def __init__(self, cycle: int, phase: float):
        self.cycle = cycle
        self.phase = phase
        super().__init__(
            f"loop diverged at cycle {cycle}: Ramsey phase {phase:.3g} rad beyond +/- pi/2 "
            "(fringe hop)"
        )


@dataclass(frozen=True)
class ReadoutModel:
    """How atoms are detected and replenished.

    Destructive readout empties the trap, so every cycle pays ``reload_time``.
    Nondestructive readout keeps ``retention_fraction`` of the atoms, which are
    recooled for ``recool_time``; a reload happens once the number falls
    below ``reload_threshold_fraction`` of the initial count.
    """

    mode: str = "destructive"
    detection_noise_atoms: float = 0.0
    retention_fraction: float = 0.0
    recool_time: float = 0.0
    reload_time: float = 0.0
    reload_threshold_fraction: float = 0.0

    def __post_init__(self):
        if self.mode not in ("destructive", "nondestructive"):
            raise ValueError(f"unknown readout mode {self.mode!r}")
        if self.mode == "destructive":
            object.__setattr__(self, "retention_fraction", 0.0)
        for name in ("retention_fraction", "reload_threshold_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("detection_noise_atoms", "recool_time", "reload_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class ClockLoopConfig:
    atom_count: float
    ramsey_time: float  # s
    cycle_time: float  # s, Ramsey time plus fixed per-cycle overhead
    contrast: float = 1.0
    squeezing_xi: float = 1.0
    servo_gain: float = 0.5
    lo_noise: LoNoiseSpec = field(default_factory=LoNoiseSpec)
    zeeman_shift_rms_Hz: float = 0.024
    readout: ReadoutModel = field(default_factory=ReadoutModel)
    n_cycles: int = 1000
    seed: int = 0
    species: ClockSpecies = RB87
    lo_dt: float | None = None  # LO noise grid; defaults to ramsey_time
    lo_initial_offset: float = 0.0  # fractional
    probe_phase: float = math.pi / 2
    alternate_sides: bool = True
    divergence_cycles: int = 3

    def __post_init__(self):
        if not self.ramsey_time > 0:
            raise ValueError("ramsey_time must be > 0")
        if self.cycle_time < self.ramsey_time:
            raise ValueError("cycle_time must be >= ramsey_time")
        if not self.atom_count >= 1:
            raise ValueError("atom_count must be >= 1")
        if not 0 < self.contrast <= 1:
            raise ValueError("contrast must lie in (0, 1]")
        if not 0 < self.squeezing_xi <= 1:
            raise ValueError("squeezing_xi must lie in (0, 1]")
        # gain 0 runs the loop open (no steering)
        if not 0 <= self.servo_gain < 2:
            raise ValueError("servo_gain must lie in [0, 2)")
        if self.zeeman_shift_rms_Hz < 0:
            raise ValueError("zeeman_shift_rms_Hz must be >= 0")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be >= 1")
        if self.divergence_cycles < 1:
            raise ValueError("divergence_cycles must be >= 1")
        if self.lo_dt is not None and not self.lo_dt > 0:
            raise ValueError("lo_dt must be > 0")

    def replace(self, **changes) -> "ClockLoopConfig":
        return dataclasses.replace(self, **changes)

    @property
    def tick(self) -> float:
        return self.ramsey_time if self.lo_dt is None else self.lo_dt


@dataclass(frozen=True, eq=False)
class RunRecord:
    cycle_start: np.ndarray  # s
    lo_error: np.ndarray  # steered LO fractional error averaged over each Ramsey window
    phase: np.ndarray  # rad, true Ramsey phase
    p_measured: np.ndarray
    atom_count: np.ndarray
    correction: np.ndarray  # fractional correction in force after each cycle
    reloaded: np.ndarray  # bool, reload during the following dead time
    steered: np.ndarray  # steered LO fractional frequency on the tick grid
    tick: float
    total_time: float
    duty_factor: float
    reload_count: int

    def allan(self, taus) -> AllanResult:
        return allan_deviation(self.steered, self.tick, taus)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for k in range(self.cycle_start.size):
            w.writerow([
                k,
                repr(float(self.cycle_start[k])),
                repr(float(self.lo_error[k])),
                repr(float(self.phase[k])),
                repr(float(self.p_measured[k])),
                repr(float(self.atom_count[k])),
                repr(float(self.correction[k])),
                int(self.reloaded[k]),
            ])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)


RUN_COLUMNS = (
    "cycle", "t_start_s", "lo_fractional_error", "phase_rad",
    "p_measured", "atom_count", "correction", "reloaded",
)


def sql_stability(nu0: float, T: float, cycle_time: float, N: float, tau: float, xi: float = 1.0) -> float:
    """Projection-noise-limited fractional instability xi / (2 pi nu0 T) * sqrt(Tc / (N tau))."""
    if not T > 0 or cycle_time < T:
        raise ValueError("need cycle_time >= T > 0")
    if tau < cycle_time:
        raise ValueError("tau must be >= cycle_time")
    if N < 1:
        raise ValueError("N must be >= 1")
    return xi / (2 * math.pi * nu0 * T) * math.sqrt(cycle_time / (N * tau))


def _ticks(duration: float, tick: float, what: str) -> int:
    n = round(duration / tick)
    if abs(n * tick - duration) > 1e-9 * max(duration, tick):
        raise ValueError(f"{what} = {duration!r} s is not a multiple of the LO grid step {tick!r} s")
    return n


def _schedule(cfg: ClockLoopConfig):
    """Cycle start ticks, atom numbers and reload flags; independent of any noise."""
    tick = cfg.tick
    ro = cfg.readout
    n_ramsey = _ticks(cfg.ramsey_time, tick, "ramsey_time")
    if n_ramsey < 1:
        raise ValueError("LO grid step must not exceed ramsey_time")
    n_overhead = _ticks(cfg.cycle_time - cfg.ramsey_time, tick, "cycle_time - ramsey_time")
    n_reload = _ticks(ro.reload_time, tick, "reload_time")
    n_recool = _ticks(ro.recool_time, tick, "recool_time")

    starts = np.empty(cfg.n_cycles, dtype=np.int64)
    atoms = np.empty(cfg.n_cycles)
    reload = np.zeros(cfg.n_cycles, dtype=bool)
    t = 0
    N = float(cfg.atom_count)
    for k in range(cfg.n_cycles):
        starts[k] = t
        atoms[k] = N
        dead = n_overhead
        if ro.mode == "destructive":
            reload[k] = True
        else:
            N *= ro.retention_fraction
            reload[k] = N < ro.reload_threshold_fraction * cfg.atom_count or N < 1
        if reload[k]:
            dead += n_reload
            N = float(cfg.atom_count)
        elif ro.mode == "nondestructive":
            dead += n_recool
        t += n_ramsey + dead
    return starts, atoms, reload, n_ramsey, t


def run_clock(cfg: ClockLoopConfig) -> RunRecord:
    """Simulate ``cfg.n_cycles`` servo cycles. Deterministic for a given config and seed.

    Raises :class:`ClockDivergence` once the Ramsey phase has been outside
    +/- pi/2 for ``divergence_cycles`` consecutive cycles.
    """
    starts, atoms, reload, n_ramsey, n_ticks = _schedule(cfg)
    tick = cfg.tick
    T = cfg.ramsey_time
    nu0 = cfg.species.nu0_magic
    lo_seed, shift_seed, readout_seed = np.random.SeedSequence(cfg.seed).spawn(3)

    free = synthesize_lo_noise(cfg.lo_noise, max(n_ticks, 2), tick, lo_seed)[:n_ticks] + cfg.lo_initial_offset
    csum = np.concatenate(([0.0], np.cumsum(free)))
    window_mean = (csum[starts + n_ramsey] - csum[starts]) / n_ramsey

    shift_noise = np.random.default_rng(shift_seed).standard_normal(cfg.n_cycles) * cfg.zeeman_shift_rms_Hz
    rr = np.random.default_rng(readout_seed)
    z_proj = rr.standard_normal(cfg.n_cycles)
    z_det = rr.standard_normal(cfg.n_cycles)

    n = cfg.n_cycles
    lo_error = np.empty(n)
    phase = np.empty(n)
    p_meas = np.empty(n)
    corr_after = np.empty(n)
    offset = np.zeros(n_ticks)

    C = cfg.contrast
    xi = cfg.squeezing_xi
    det = cfg.readout.detection_noise_atoms
    to_freq = 1.0 / (2 * math.pi * nu0 * T)
    corr = 0.0
    outside = 0
    for k in range(n):
        s = int(starts[k])
        y = window_mean[k] + corr
        phi = 2 * math.pi * T * (nu0 * y - shift_noise[k])
        outside = outside + 1 if abs(phi) > math.pi / 2 else 0
        if outside >= cfg.divergence_cycles:
            raise ClockDivergence(k, phi)

        side = -1.0 if (cfg.alternate_sides and k % 2) else 1.0
        theta = side * cfg.probe_phase
        p = 0.5 * (1.0 - C * math.cos(phi + theta))
        Nk = atoms[k]
        count = Nk * p + xi * math.sqrt(max(Nk * p * (1.0 - p), 0.0)) * z_proj[k] + det * z_det[k]
        pm = count / Nk
        arg = min(1.0, max(-1.0, (1.0 - 2.0 * pm) / C))
        phi_hat = math.copysign(math.acos(arg), theta if theta else 1.0) - theta

        offset[s:s + n_ramsey] = corr
        corr -= cfg.servo_gain * phi_hat * to_freq
        end = int(starts[k + 1]) if k + 1 < n else n_ticks
        offset[s + n_ramsey:end] = corr

        lo_error[k] = y
        phase[k] = phi
        p_meas[k] = pm
        corr_after[k] = corr

    total_time = n_ticks * tick
    return RunRecord(
        cycle_start=starts * tick,
        lo_error=lo_error,
        phase=phase,
        p_measured=p_meas,
        atom_count=atoms,
        correction=corr_after,
        reloaded=reload,
        steered=free + offset,
        tick=tick,
        total_time=total_time,
        duty_factor=n * T / total_time,
        reload_count=int(reload.sum()),
    )


@dataclass(frozen=True)
class DickPoint:
    dead_time: float
    sigma_y: float
    per_seed: tuple


def dick_penalty_scan(cfg: ClockLoopConfig, dead_times, tau: float, seeds=None) -> list[DickPoint]:
    """Allan deviation at ``tau`` versus dead time per cycle.

    The dead time is added to the Ramsey time to form the cycle time. Every
    dead time is run with the same seeds (common random numbers); with more
    than one seed the median is reported.
    """
    seeds = (cfg.seed,) if seeds is None else tuple(seeds)
    out = []
    for d in dead_times:
        if d < 0:
            raise ValueError("dead time must be >= 0")
        vals = []
        for seed in seeds:
            rec = run_clock(cfg.replace(cycle_time=cfg.ramsey_time + d, seed=seed))
            vals.append(rec.allan([tau]).sigma_y[0])
        out.append(DickPoint(float(d), float(np.median(vals)), tuple(float(v) for v in vals)))
    return out


def destructive_preset(**overrides) -> ClockLoopConfig:
    """Illustrative chip clock with absorption-style destructive readout (about 10 % duty)."""
    base = dict(
        atom_count=1e4,
        ramsey_time=1.0,
        cycle_time=1.0,
        lo_noise=LoNoiseSpec(flicker_fm_hm1=1e-24),
        zeeman_shift_rms_Hz=0.0,
        readout=ReadoutModel(mode="destructive", reload_time=9.0),
        n_cycles=400,
        lo_dt=0.05,
    )
    base.update(overrides)
    return ClockLoopConfig(**base)


def nondestructive_preset(**overrides) -> ClockLoopConfig:
    """Same apparatus with nondestructive readout: 95 % of atoms kept, 50 ms recooling."""
    base = dict(
        atom_count=1e4,
        ramsey_time=1.0,
        cycle_time=1.0,
        lo_noise=LoNoiseSpec(flicker_fm_hm1=1e-24),
        zeeman_shift_rms_Hz=0.0,
        readout=ReadoutModel(
            mode="nondestructive",
            retention_fraction=0.95,
            recool_time=0.05,
            reload_time=9.0,
            reload_threshold_fraction=0.05,
        ),
        n_cycles=3000,
        lo_dt=0.05,
    )
    base.update(overrides)
    return ClockLoopConfig(**base)
