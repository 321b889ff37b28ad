import numpy as np
import pytest

from cpsofdm import metrics, waveform as wf


class TestRcm:
    def test_constant_envelope(self):
        n = np.arange(137)
        x = np.exp(1j * 0.3 * n)
        assert abs(metrics.rcm(x) - 1.0) < 1e-12

    def test_impulse(self):
        x = np.zeros(137, dtype=complex)
        x[53] = 2.0 - 1.0j
        assert abs(metrics.rcm(x) - 137.0) < 1e-12

    def test_scale_invariance(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            s = rng.uniform(0.01, 100.0)
            assert metrics.rcm(s * x) == pytest.approx(metrics.rcm(x), rel=1e-12)

    def test_lower_bound_one(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
            assert metrics.rcm(x) >= 1.0 - 1e-12

    def test_rms_form_oracle(self):
        # definition via the 6th/2nd moment ratio of |x|
        rng = np.random.default_rng(22)
        x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        mag = np.abs(x)
        oracle = np.sqrt(np.mean(mag ** 6)) / np.mean(mag ** 2) ** 1.5
        assert metrics.rcm(x) == pytest.approx(oracle, rel=1e-12)

    def test_zero_block(self):
        with pytest.raises(ValueError):
            metrics.rcm(np.zeros(8))


class TestCmDb:
    def test_reference_point(self):
        params = metrics.CmParams(rcm_ref_db=20 * np.log10(3.0), slope_db=1.85)
        assert metrics.cm_db(3.0, params) == pytest.approx(0.0, abs=1e-12)

    def test_unit_slope(self):
        params = metrics.CmParams(rcm_ref_db=0.0, slope_db=1.0)
        assert metrics.cm_db(10.0, params) == pytest.approx(20.0, abs=1e-12)

    def test_zero_slope_rejected(self):
        with pytest.raises(ValueError):
            metrics.CmParams(rcm_ref_db=0.0, slope_db=0.0)


class TestEvm:
    def test_identical(self):
        x = np.ones(10, dtype=complex)
        assert metrics.evm(x, x) == 0.0

    def test_scaled(self):
        x = np.ones(10, dtype=complex)
        assert metrics.evm(1.1 * x, x) == pytest.approx(0.1, rel=1e-12)

    def test_error_homogeneity(self):
        rng = np.random.default_rng(23)
        x_ref = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        e = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        base = metrics.evm(x_ref + e, x_ref)
        assert metrics.evm(x_ref + 3 * e, x_ref) == pytest.approx(3 * base, rel=1e-12)

    def test_zero_reference(self):
        with pytest.raises(ValueError):
            metrics.evm(np.ones(4), np.zeros(4))


class TestEsd:
    def test_dc(self):
        rng = np.random.default_rng(24)
        x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        assert metrics.esd(x, 0.0) == pytest.approx(abs(x.sum()) ** 2, rel=1e-12)

    def test_single_exponential(self):
        # x_n = e^{j w0 n} concentrates: ESD at w0 equals n^2
        n = np.arange(30)
        w0 = 0.7
        x = np.exp(1j * w0 * n)
        assert metrics.esd(x, w0) == pytest.approx(900.0, rel=1e-12)

    def test_zero_block(self):
        assert metrics.esd(np.zeros(5), 1.0) == 0.0

    def test_matches_zero_padded_fft(self):
        rng = np.random.default_rng(25)
        x = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        nfft = 256
        grid = 2 * np.pi * np.arange(nfft) / nfft
        X = np.fft.fft(x, nfft)
        assert np.abs(metrics.esd(x, grid) - np.abs(X) ** 2).max() < 1e-9


class TestOsbRegion:
    def test_paper_region_single_merged_interval(self):
        region = metrics.OsbRegion.from_subcarriers(
            list(range(24)) + list(range(80, 128)), 128)
        assert len(region.intervals) == 1
        lo, hi = region.intervals[0]
        w = 2 * np.pi / 128
        assert lo == pytest.approx(2 * np.pi * 80 / 128 - 2 * np.pi - w / 2, abs=1e-12)
        assert hi == pytest.approx(2 * np.pi * 23 / 128 + w / 2, abs=1e-12)
        assert region.total_width == pytest.approx(72 * w, rel=1e-12)

    def test_out_of_range_index(self):
        with pytest.raises(ValueError):
            metrics.OsbRegion.from_subcarriers([128], 128)

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(ValueError):
            metrics.OsbRegion(intervals=((0.0, 1.0), (0.5, 2.0)), panel_width=0.1)

    def test_quadrature_integrates_polynomial_exactly(self):
        region = metrics.OsbRegion(intervals=((-1.0, 0.5), (1.0, 2.0)), panel_width=0.3)
        nodes, weights = region.quadrature(8)
        val = weights @ nodes ** 4
        exact = (0.5 ** 5 - (-1.0) ** 5) / 5 + (2.0 ** 5 - 1.0 ** 5) / 5
        assert val == pytest.approx(exact, rel=1e-13)


class TestOsbee:
    def test_empty_region(self):
        assert metrics.osbee_direct(np.ones(8), None) == 0.0

    def test_full_circle_parseval(self):
        rng = np.random.default_rng(26)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        full = metrics.OsbRegion.full_circle(64)
        energy = float(np.linalg.norm(x) ** 2)
        assert metrics.osbee_direct(x, full) == pytest.approx(energy, rel=1e-10)

    def test_refinement_stable(self):
        rng = np.random.default_rng(27)
        x = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        region = metrics.OsbRegion.from_subcarriers(range(10, 20), 48)
        a = metrics.osbee_direct(x, region, oversample=16)
        b = metrics.osbee_direct(x, region, oversample=32)
        assert abs(a - b) / abs(b) < 1e-6


class TestPsdAverage:
    def test_identical_blocks(self):
        rng = np.random.default_rng(28)
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        grid = np.linspace(-np.pi, np.pi, 33)
        avg = metrics.psd_average([x, x, x], grid)
        assert np.abs(avg - metrics.esd(x, grid)).max() < 1e-9

    def test_two_block_mean(self):
        rng = np.random.default_rng(29)
        a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        b = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        grid = np.linspace(0, 1, 5)
        avg = metrics.psd_average([a, b], grid)
        expected = 0.5 * (metrics.esd(a, grid) + metrics.esd(b, grid))
        assert np.abs(avg - expected).max() < 1e-10

    def test_empty(self):
        with pytest.raises(ValueError):
            metrics.psd_average(np.zeros((0, 4)), np.zeros(3))


class TestCcdf:
    def test_all_below(self):
        assert metrics.ccdf([1, 2, 3], [5.0])[0] == 0.0

    def test_all_above(self):
        assert metrics.ccdf([1, 2, 3], [0.0])[0] == 1.0

    def test_strictly_above(self):
        # samples equal to the threshold do not count
        assert metrics.ccdf([1.0, 1.0, 2.0], [1.0])[0] == pytest.approx(1 / 3)

    def test_nonincreasing_in_threshold(self):
        rng = np.random.default_rng(30)
        samples = rng.standard_normal(200)
        t = np.linspace(-3, 3, 50)
        cc = metrics.ccdf(samples, t)
        assert np.all(np.diff(cc) <= 0)


class TestSpectralEfficiency:
    def test_zero_at_full_error(self):
        assert metrics.spectral_efficiency(4, 46, 14, 1.0, 1e-3, 720e3, 0.0) == 0.0

    def test_linear_in_one_minus_ber(self):
        a = metrics.spectral_efficiency(4, 46, 14, 0.0, 1e-3, 720e3, 0.0)
        b = metrics.spectral_efficiency(4, 46, 14, 0.5, 1e-3, 720e3, 0.0)
        assert b == pytest.approx(a / 2, rel=1e-12)

    def test_invalid_denominator(self):
        with pytest.raises(ValueError):
            metrics.spectral_efficiency(4, 46, 14, 0.0, 0.0, 720e3, 0.0)
