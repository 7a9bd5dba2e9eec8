"""Overlapping Allan deviation of fractional-frequency data."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class AllanResult:
    taus: np.ndarray  # s
    sigma_y: np.ndarray
    n_pairs_per_tau: np.ndarray

    def at(self, tau: float) -> float:
        i = int(np.argmin(np.abs(self.taus - tau)))
        if not np.isclose(self.taus[i], tau, rtol=1e-9, atol=0):
            raise KeyError(f"tau={tau} s not in result")
        return float(self.sigma_y[i])

    def loglog_slope(self) -> float:
        return float(np.polyfit(np.log(self.taus), np.log(self.sigma_y), 1)[0])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            write_allan_csv(fh, self)


def write_allan_csv(fh, result: AllanResult) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["tau_s", "sigma_y", "n_pairs"])
    for t, s, n in zip(result.taus, result.sigma_y, result.n_pairs_per_tau):
        w.writerow([repr(float(t)), repr(float(s)), int(n)])


def tau_multiples(taus, dt: float) -> np.ndarray:
    """Averaging factors m = tau/dt; every tau must be an integer multiple of dt."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    m = np.rint(taus / dt).astype(np.int64)
    bad = (m < 1) | (np.abs(m * dt - taus) > 1e-9 * np.maximum(taus, dt))
    if np.any(bad):
        raise ValueError(f"tau={taus[bad][0]!r} s is not a positive integer multiple of dt={dt!r} s")
    return m


def octave_taus(n: int, dt: float) -> np.ndarray:
    """dt * 2^k for every k that leaves at least one overlapping pair."""
    ms = []
    m = 1
    while n - 2 * m + 1 >= 1:
        ms.append(m)
        m *= 2
    return np.array(ms, dtype=float) * dt


def allan_deviation(y, dt: float, taus) -> AllanResult:
    """Overlapping two-sample deviation of fractional frequencies ``y`` sampled every ``dt``.

    Uses the phase x_i = dt * sum(y[:i]):
    sigma^2(m dt) = sum (x_{i+2m} - 2 x_{i+m} + x_i)^2 / (2 (m dt)^2 (n - 2m + 1)).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise ValueError("need a 1-D series of at least 3 samples")
    if not dt > 0:
        raise ValueError("dt must be > 0")
    ms = np.unique(tau_multiples(taus, dt))
    # offset-free; keeps constant input exactly zero and limits cumsum round-off
    x = np.concatenate(([0.0], np.cumsum(y - y[0]))) * dt
    sig = np.empty(ms.size)
    pairs = np.empty(ms.size, dtype=np.int64)
    for j, m in enumerate(ms):
        n_pairs = x.size - 2 * m
        if n_pairs < 1:
            raise ValueError(f"tau={float(m * dt)!r} s is too long for {y.size} samples")
        d = x[2 * m:] - 2 * x[m:-m] + x[:-2 * m]
        tau = m * dt
        sig[j] = np.sqrt(np.sum(d * d) / (2 * tau * tau * n_pairs))
        pairs[j] = n_pairs
    return AllanResult(ms * dt, sig, pairs)
