"""Power-law frequency noise for the local oscillator.

One-sided PSD of fractional frequency, S_y(f) = h0 + h_-1/f + h_-2/f^2,
plus an optional linear drift. Each component is generated separately:

* white FM: independent Gaussians of variance h0 / (2 dt);
* flicker FM: white noise shaped by the fractional integrator
  (1 - z^-1)^(-1/2) (Kasdin 1995). Its PSD is Q dt / sin(pi f dt) at all
  f, i.e. Q/(pi f) at low frequency, so the innovation variance is
  Q = pi h_-1;
* random-walk FM: running sum of Gaussian steps of variance 2 pi^2 h_-2 dt.

The matching Allan variances are h0/(2 tau), 2 ln2 h_-1 and (2 pi^2/3) h_-2 tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve


@dataclass(frozen=True)
class LoNoiseSpec:
    white_fm_h0: float = 0.0  # 1/Hz
    flicker_fm_hm1: float = 0.0  # dimensionless
    rw_fm_hm2: float = 0.0  # Hz
    linear_drift: float = 0.0  # 1/s

    def __post_init__(self):
        for name in ("white_fm_h0", "flicker_fm_hm1", "rw_fm_hm2", "linear_drift"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def is_silent(self) -> bool:
        return not (self.white_fm_h0 or self.flicker_fm_hm1 or self.rw_fm_hm2 or self.linear_drift)


def allan_signature(spec: LoNoiseSpec, tau) -> np.ndarray:
    """Analytic Allan deviation of ``spec`` at averaging times ``tau`` (s)."""
    tau = np.asarray(tau, dtype=float)
    avar = (
        spec.white_fm_h0 / (2 * tau)
        + 2 * math.log(2) * spec.flicker_fm_hm1
        + 2 * math.pi**2 / 3 * spec.rw_fm_hm2 * tau
        + (spec.linear_drift * tau) ** 2 / 2
    )
    return np.sqrt(avar)


def flicker_filter(n: int) -> np.ndarray:
    """Impulse response of (1 - z^-1)^(-1/2), first ``n`` taps."""
    k = np.arange(1, n)
    taps = np.empty(n)
    taps[0] = 1.0
    taps[1:] = np.cumprod((k - 0.5) / k)
    return taps


def synthesize_lo_noise(spec: LoNoiseSpec, n_samples: int, dt: float, seed: int) -> np.ndarray:
    """Fractional-frequency series of ``n_samples`` points spaced ``dt`` seconds.

    Each noise type draws from its own child stream of ``seed``, so switching
    one component on or off leaves the others unchanged.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    white_rng, flicker_rng, rw_rng = (np.random.default_rng(s) for s in root.spawn(3))
    y = np.zeros(n_samples)
    if spec.white_fm_h0:
        y += white_rng.standard_normal(n_samples) * math.sqrt(spec.white_fm_h0 / (2 * dt))
    if spec.flicker_fm_hm1:
        w = flicker_rng.standard_normal(n_samples) * math.sqrt(math.pi * spec.flicker_fm_hm1)
        y += fftconvolve(w, flicker_filter(n_samples))[:n_samples]
    if spec.rw_fm_hm2:
        steps = rw_rng.standard_normal(n_samples) * math.sqrt(2 * math.pi**2 * spec.rw_fm_hm2 * dt)
        y += np.cumsum(steps)
    if spec.linear_drift:
        y += spec.linear_drift * dt * np.arange(n_samples)
    return y
