"""Acceptance criteria 1-10, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from chipclock.allan import allan_deviation
from chipclock.clock import (
    ClockLoopConfig,
    destructive_preset,
    nondestructive_preset,
    run_clock,
    sql_stability,
)
from chipclock.ensemble import mc_mean_density, mc_mean_zeeman_shift, potential_energy_moment, sample_thermal_ensemble
from chipclock.noise import LoNoiseSpec, allan_signature, synthesize_lo_noise
from chipclock.shifts import (
    Ensemble,
    TrapConfig,
    bec_critical_temperature,
    mean_density,
    mean_zeeman_shift,
    rms_cloud_size,
    total_shift,
    zero_shift_temperature,
)
from chipclock.species import RB87, derive_chi, derive_zeta, shift_per_density

NU0 = RB87.nu0_magic
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.criterion(1, "derived constants zeta, chi, shift per density")
def test_criterion_01_constants():
    assert derive_zeta(RB87) == pytest.approx(1.43, rel=0.01)
    assert derive_chi(RB87) == pytest.approx(9.2e-15, rel=0.02)
    assert shift_per_density(RB87) == pytest.approx(-3.84e-13, rel=0.005)
    assert -3.9e-13 - 0.3e-13 <= shift_per_density(RB87) <= -3.9e-13 + 0.3e-13


@pytest.mark.criterion(2, "beta B0^2 equals the zero-field minus magic frequency")
def test_criterion_02_cross_consistency():
    offset = RB87.nu0_zero_field - RB87.nu0_magic
    assert RB87.beta * RB87.B0_magic**2 == pytest.approx(offset, abs=0.1)
    assert offset == pytest.approx(4497.3, abs=0.05)


@pytest.mark.criterion(3, "operating point at N = 1e6, 2 pi x 100 Hz")
def test_criterion_03_operating_point():
    trap = TrapConfig.from_hz(100.0)
    T0 = zero_shift_temperature(RB87, trap, 10**6)
    b = total_shift(RB87, trap, Ensemble(10**6, T0))
    assert T0 == pytest.approx(1.1e-6, rel=0.05)
    assert b.zeeman_Hz == pytest.approx(1.9, rel=0.05)
    assert -b.collision_Hz == pytest.approx(1.9, rel=0.05)
    assert rms_cloud_size(trap, T0, RB87.mass).geometric == pytest.approx(17e-6, rel=0.05)


@pytest.mark.criterion(4, "low-frequency trap at N = 1e5, 2 pi x 10 Hz")
def test_criterion_04_low_frequency_trap():
    trap = TrapConfig.from_hz(10.0)
    T0 = zero_shift_temperature(RB87, trap, 10**5)
    b = total_shift(RB87, trap, Ensemble(10**5, T0))
    assert T0 == pytest.approx(80e-9, rel=0.10)
    assert abs(b.zeeman_Hz) < 0.010
    assert abs(b.collision_Hz) < 0.010


@pytest.mark.criterion(5, "T0/T_bec scaling and classical regime over the N, omega grid")
@pytest.mark.parametrize("N", [10**4, 10**5, 10**6, 10**7])
@pytest.mark.parametrize("f", [10.0, 100.0, 1000.0])
def test_criterion_05_classical_regime(N, f):
    trap = TrapConfig.from_hz(f)
    T0 = zero_shift_temperature(RB87, trap, N)
    Tc = bec_critical_temperature(trap, N)
    assert T0 / Tc == pytest.approx((0.3e-3 / Tc) ** (1 / 7), rel=0.10)
    assert T0 > Tc


@pytest.mark.criterion(6, "Monte-Carlo oracle equivalence")
def test_criterion_06_mc_oracle():
    rng = np.random.default_rng(606)
    for i in range(10):
        trap = TrapConfig.from_hz(*rng.uniform(10, 1000, size=3))
        T = rng.uniform(0.05, 10.0) * 1e-6
        N = int(10 ** rng.uniform(3, 7))
        s = sample_thermal_ensemble(trap, T, RB87.mass, 10**5, seed=100 + i)
        assert mc_mean_zeeman_shift(s, RB87).z_score(mean_zeeman_shift(RB87, T)) < 3
        assert mc_mean_density(s, N).z_score(mean_density(RB87, trap, Ensemble(N, T))) < 3
    big = sample_thermal_ensemble(TrapConfig.from_hz(100.0), 1e-6, RB87.mass, 10**6, seed=7)
    assert potential_energy_moment(big, 2).value == pytest.approx(15 / 4, rel=0.01)


def _sql_cfg(**kw):
    base = dict(atom_count=1000, ramsey_time=0.01, cycle_time=0.01, zeeman_shift_rms_Hz=0.0,
                n_cycles=100_000, seed=0)
    base.update(kw)
    return ClockLoopConfig(**base)


@pytest.mark.criterion(7, "simulated clock at the standard quantum limit, N and xi scaling")
@pytest.mark.parametrize("gain, cycles", [(0.5, [20, 50, 100]), (1.0, [10, 20, 50, 100])])
def test_criterion_07_sql(gain, cycles):
    # the gain-0.5 integrator is biased ~10 % low at 10 cycles, hence the two rows
    taus = np.array(cycles) * 0.01
    ref = np.array([sql_stability(NU0, 0.01, 0.01, 1000, t) for t in taus])
    base = run_clock(_sql_cfg(servo_gain=gain)).allan(taus).sigma_y
    assert np.all(np.abs(base / ref - 1) < 0.10)
    more = run_clock(_sql_cfg(servo_gain=gain, atom_count=4000)).allan(taus).sigma_y
    assert np.all(np.abs(more / base - 0.5) < 0.05)
    squeezed = run_clock(_sql_cfg(servo_gain=gain, squeezing_xi=0.5)).allan(taus).sigma_y
    assert np.all(np.abs(squeezed / base - 0.5) < 0.05)


@pytest.mark.criterion(8, "duty factor and Dick-effect direction")
def test_criterion_08_duty_factor():
    d_runs = [run_clock(destructive_preset(seed=s)) for s in range(3)]
    nd_runs = [run_clock(nondestructive_preset(seed=s)) for s in range(3)]
    for r in d_runs:
        assert r.duty_factor == pytest.approx(0.10, abs=0.005)
    for r in nd_runs:
        assert r.duty_factor > 0.80
    for d, nd in zip(d_runs, nd_runs):
        assert nd.allan([200.0]).sigma_y[0] < d.allan([200.0]).sigma_y[0]


@pytest.mark.criterion(9, "Allan estimator oracles")
def test_criterion_09_allan():
    dt = 0.01
    white = LoNoiseSpec(white_fm_h0=1e-24)
    y = synthesize_lo_noise(white, 2**17, dt, seed=9)
    taus = dt * np.array([1, 2, 4, 8, 16, 32, 64, 100])
    assert np.allclose(allan_deviation(y, dt, taus).sigma_y, allan_signature(white, taus), rtol=0.10)

    d = 3e-15
    y = synthesize_lo_noise(LoNoiseSpec(linear_drift=d), 10_000, dt, seed=0)
    taus = np.array([0.01, 0.1, 1.0, 10.0])
    assert np.allclose(allan_deviation(y, dt, taus).sigma_y, d * taus / math.sqrt(2), rtol=0.05)

    assert np.all(allan_deviation(np.full(5000, 7e-13), dt, taus).sigma_y == 0.0)


@pytest.mark.criterion(10, "experimental stabilities out of scope; illustrative configs and scalings only")
def test_criterion_10_illustrative_only():
    for name in ("destructive_illustrative.toml", "nondestructive_illustrative.toml"):
        assert "Illustrative only" in (CONFIGS / name).read_text()
    # the projection limit at the quoted apparatus parameters sits an order of
    # magnitude below the measured 1.7e-11 / sqrt(tau): the rest is unmodelled
    # apparatus noise, which is why that number is not a target
    coeff = sql_stability(6.834678e9, 1.0, 23.0, 1e4, 23.0) * math.sqrt(23.0)
    assert coeff < 1.7e-11 / 10
