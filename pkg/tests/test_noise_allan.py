import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipclock.allan import AllanResult, allan_deviation, octave_taus, tau_multiples, write_allan_csv
from chipclock.noise import LoNoiseSpec, allan_signature, flicker_filter, synthesize_lo_noise

N = 2**17
DT = 0.01


def brute_force_oadev(y, m):
    """Direct overlapping Allan deviation from frequency averages."""
    y = np.asarray(y, float)
    ybar = np.array([y[i:i + m].mean() for i in range(len(y) - m + 1)])
    d = ybar[m:] - ybar[:-m]
    return math.sqrt(np.mean(d * d) / 2)


class TestSpec:
    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            LoNoiseSpec(white_fm_h0=-1e-24)

    def test_silent(self):
        assert LoNoiseSpec().is_silent
        assert not LoNoiseSpec(linear_drift=1e-18).is_silent

    def test_zero_spec_gives_zeros(self):
        y = synthesize_lo_noise(LoNoiseSpec(), 1000, DT, seed=1)
        assert np.array_equal(y, np.zeros(1000))


class TestSynthesis:
    def test_white(self):
        spec = LoNoiseSpec(white_fm_h0=1e-24)
        y = synthesize_lo_noise(spec, N, DT, seed=2)
        taus = octave_taus(N, DT)
        taus = taus[taus <= 100 * DT]
        res = allan_deviation(y, DT, taus)
        assert np.allclose(res.sigma_y, allan_signature(spec, taus), rtol=0.10)

    def test_drift(self):
        spec = LoNoiseSpec(linear_drift=1e-15)
        y = synthesize_lo_noise(spec, 10_000, DT, seed=0)
        taus = np.array([0.1, 1.0, 10.0])
        res = allan_deviation(y, DT, taus)
        assert np.allclose(res.sigma_y, 1e-15 * taus / math.sqrt(2), rtol=0.05)

    def test_flicker_floor(self):
        spec = LoNoiseSpec(flicker_fm_hm1=1e-24)
        floor = math.sqrt(2 * math.log(2) * 1e-24)
        vals = []
        for seed in range(4):
            y = synthesize_lo_noise(spec, N, DT, seed=seed)
            vals.append(allan_deviation(y, DT, [4 * DT, 16 * DT, 64 * DT]).sigma_y)
        assert np.allclose(np.mean(vals, axis=0), floor, rtol=0.20)

    def test_flicker_filter_taps(self):
        # binomial series of (1 - z)^(-1/2): 1, 1/2, 3/8, 5/16
        assert np.allclose(flicker_filter(4), [1, 0.5, 0.375, 0.3125])

    def test_random_walk(self):
        spec = LoNoiseSpec(rw_fm_hm2=1e-26)
        taus = np.array([10, 40, 100]) * DT
        vals = [allan_deviation(synthesize_lo_noise(spec, 2**15, DT, seed=s), DT, taus).sigma_y
                for s in range(8)]
        assert np.allclose(np.mean(vals, axis=0), allan_signature(spec, taus), rtol=0.15)

    def test_components_independent_streams(self):
        a = synthesize_lo_noise(LoNoiseSpec(white_fm_h0=1e-24), 500, DT, seed=9)
        b = synthesize_lo_noise(LoNoiseSpec(white_fm_h0=1e-24, linear_drift=1e-16), 500, DT, seed=9)
        assert np.allclose(b - a, 1e-16 * DT * np.arange(500), rtol=1e-9, atol=1e-24)

    def test_deterministic(self):
        spec = LoNoiseSpec(white_fm_h0=1e-24, flicker_fm_hm1=1e-26)
        assert np.array_equal(synthesize_lo_noise(spec, 256, DT, 4), synthesize_lo_noise(spec, 256, DT, 4))

    def test_bad_args(self):
        with pytest.raises(ValueError):
            synthesize_lo_noise(LoNoiseSpec(), 10, 0.0, seed=0)
        with pytest.raises(ValueError):
            synthesize_lo_noise(LoNoiseSpec(), 1, DT, seed=0)


class TestAllan:
    def test_constant_is_zero(self):
        res = allan_deviation(np.full(100, 3.2e-12), 1.0, [1, 2, 5, 10])
        assert np.all(res.sigma_y == 0.0)

    def test_alternating(self):
        a = 2e-13
        y = a * (-1.0) ** np.arange(1000)
        res = allan_deviation(y, 1.0, [1.0])
        assert res.sigma_y[0] == pytest.approx(math.sqrt(2) * a, rel=1e-3)
        assert res.sigma_y[0] == pytest.approx(brute_force_oadev(y, 1), rel=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=8, max_value=200), st.integers(min_value=0, max_value=2**31))
    def test_matches_brute_force(self, n, seed):
        y = np.random.default_rng(seed).standard_normal(n) * 1e-12
        ms = [m for m in (1, 2, 3, n // 3) if n - 2 * m + 1 >= 1]
        res = allan_deviation(y, 0.5, [m * 0.5 for m in ms])
        for m, s in zip(np.unique(ms), res.sigma_y):
            assert s == pytest.approx(brute_force_oadev(y, m), rel=1e-6)

    def test_white_slope(self):
        y = np.random.default_rng(0).standard_normal(N)
        res = allan_deviation(y, DT, octave_taus(N, DT)[:10])
        assert -0.6 <= res.loglog_slope() <= -0.4

    def test_pair_counts(self):
        res = allan_deviation(np.arange(10.0), 1.0, [1, 2, 4])
        assert list(res.n_pairs_per_tau) == [9, 7, 3]

    def test_non_multiple_rejected(self):
        with pytest.raises(ValueError, match="integer multiple"):
            allan_deviation(np.zeros(100), 0.1, [0.25])
        with pytest.raises(ValueError):
            tau_multiples([0.05], 0.1)

    def test_too_long_rejected(self):
        with pytest.raises(ValueError, match="too long"):
            allan_deviation(np.zeros(10), 1.0, [6])

    def test_short_series_rejected(self):
        with pytest.raises(ValueError):
            allan_deviation([1.0, 2.0], 1.0, [1])

    def test_result_lookup_and_csv(self, tmp_path):
        res = AllanResult(np.array([1.0, 2.0]), np.array([1e-12, 7e-13]), np.array([9, 7]))
        assert res.at(2.0) == 7e-13
        with pytest.raises(KeyError):
            res.at(3.0)
        path = tmp_path / "a.csv"
        res.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "tau_s,sigma_y,n_pairs"
        assert lines[2] == "2.0,7e-13,7"

    def test_write_handle(self, tmp_path):
        import io

        buf = io.StringIO()
        write_allan_csv(buf, AllanResult(np.array([1.0]), np.array([0.0]), np.array([3])))
        assert buf.getvalue() == "tau_s,sigma_y,n_pairs\n1.0,0.0,3\n"
