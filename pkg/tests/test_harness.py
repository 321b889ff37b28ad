import numpy as np
import pytest

from cpsofdm import harness, metrics, waveform as wf
from cpsofdm.config import Scenario


def scenario(tmp_path, **cfg):
    out = cfg.pop("out_dir", str(tmp_path / "out"))
    base = {"label": "t", "seed": 1, "blocks": 2}
    base.update(cfg)
    return Scenario.from_config(base, out_dir=out)


CONST_ENVELOPE_CFG = {
    # one active subcarrier: every block has |x_n| constant
    "waveform": {"N": 16, "G": 0, "gi_mode": "nogi", "S": 1, "K": 1, "M": 1,
                 "eta": 5, "data_idx": [0]},
    "prototype": "constant",
    "osb_subcarriers": [0, 1, 13],
}


class TestRng:
    def test_block_rng_deterministic(self):
        a = harness.block_rng(5, 3).integers(0, 1000, 8)
        b = harness.block_rng(5, 3).integers(0, 1000, 8)
        assert np.array_equal(a, b)

    def test_block_rng_independent_of_order(self):
        first = harness.block_rng(5, 7).integers(0, 1000, 4)
        harness.block_rng(5, 6)   # drawing other blocks does not disturb it
        again = harness.block_rng(5, 7).integers(0, 1000, 4)
        assert np.array_equal(first, again)

    def test_distinct_blocks_differ(self):
        a = harness.block_rng(5, 0).integers(0, 2, 64)
        b = harness.block_rng(5, 1).integers(0, 2, 64)
        assert not np.array_equal(a, b)


class TestCsv:
    def test_provenance_header_and_roundtrip(self, tmp_path):
        sc = scenario(tmp_path)
        path = harness.write_csv(str(tmp_path / "x.csv"), ["a", "b"],
                                 [(1, 2.5), (3, 0.125)], sc)
        with open(path) as f:
            first = f.readline()
        assert first.startswith("# config_hash=")
        assert f"seed={sc.seed}" in first
        header, rows = harness.read_csv(path)
        assert header == ["a", "b"]
        assert rows == [["1", "2.5"], ["3", "0.125"]]


class TestRcmCcdf:
    def test_constant_envelope_all_one(self, tmp_path):
        sc = scenario(tmp_path, blocks=6, **CONST_ENVELOPE_CFG)
        out = harness.run_rcm_ccdf(sc)
        assert np.abs(out["rcm_unshaped"] - 1.0).max() < 1e-12

    def test_determinism_byte_identical(self, tmp_path):
        cfg = {"blocks": 2, "shaping": {"enabled": True, "evm_max_db": -10.0}}
        sc1 = scenario(tmp_path, out_dir=str(tmp_path / "a"), **cfg)
        sc2 = scenario(tmp_path, out_dir=str(tmp_path / "b"), **cfg)
        o1 = harness.run_rcm_ccdf(sc1)
        o2 = harness.run_rcm_ccdf(sc2)
        for key in ("blocks_csv", "ccdf_csv"):
            b1 = open(o1[key], "rb").read()
            b2 = open(o2[key], "rb").read()
            assert b1 == b2

    def test_shaped_direction_small_sample(self, tmp_path):
        sc = scenario(tmp_path, blocks=5,
                      shaping={"enabled": True, "evm_max_db": -10.0})
        out = harness.run_rcm_ccdf(sc)
        assert out["failed_blocks"] == 0
        assert np.all(out["rcm_shaped"] <= out["rcm_unshaped"] + 1e-9)


class TestPsd:
    def test_single_subcarrier_peak(self, tmp_path):
        sc = scenario(tmp_path, blocks=3, **CONST_ENVELOPE_CFG)
        out = harness.run_psd(sc)
        sem = sc.sem
        bin_hz = sem["sampling_rate_hz"] / sc.params.N
        peak_freq = out["freqs"][np.argmax(out["psd_pre_mw"])]
        # the single active subcarrier sits at the grid center
        assert abs(peak_freq) < bin_hz

    def test_ideal_pa_pre_equals_post(self, tmp_path):
        sc = scenario(tmp_path, blocks=2)
        out = harness.run_psd(sc)
        assert np.abs(out["psd_pre_mw"] - out["psd_post_mw"]).max() < 1e-9

    def test_calibrated_inband_power(self, tmp_path):
        sc = scenario(tmp_path, blocks=2)
        out = harness.run_psd(sc)
        inband = np.abs(out["freqs"]) <= sc.sem["bw_hz"] / 2
        total_dbm = 10 * np.log10(out["psd_post_mw"][inband].sum())
        assert total_dbm == pytest.approx(sc.sem["tx_power_dbm"], abs=1e-9)

    def test_shaping_preserves_inband_power(self, tmp_path):
        # raw (uncalibrated) in-band energy moves by far less than 0.1 dB
        omegas, freqs = harness.psd_grid(scenario(tmp_path))
        totals = {}
        for enabled in (False, True):
            sc = scenario(tmp_path, blocks=3,
                          shaping={"enabled": enabled, "evm_max_db": -10.0})
            blocks = [harness.make_block(sc, b).x for b in range(sc.blocks)]
            psd = metrics.psd_average(blocks, omegas)
            inband = np.abs(freqs) <= sc.sem["bw_hz"] / 2
            totals[enabled] = psd[inband].sum()
        ratio_db = 10 * np.log10(totals[True] / totals[False])
        assert abs(ratio_db) < 0.1


class TestGuardBand:
    MASK = harness.SemMask(limit_dbm=-10.0, measure_bw_hz=30000.0, grid_hz=15000.0)

    def test_quiet_psd_zero_guard(self):
        freqs = np.arange(-960, 960) * 1000.0
        psd = np.full(freqs.size, 1e-20)   # -200 dBm per bin
        assert harness.find_guard_band(freqs, psd, self.MASK, 720e3) == 0.0

    def test_brick_wall_two_grid_steps(self):
        freqs = np.arange(-960, 960) * 1000.0
        psd = np.full(freqs.size, 1e-20)
        hot = (freqs >= 360e3) & (freqs < 390e3)
        psd[hot] = 100.0 / hot.sum()   # 20 dBm over a 30 kHz stretch
        assert harness.find_guard_band(freqs, psd, self.MASK, 720e3) == 30000.0

    def test_never_satisfied(self):
        freqs = np.arange(-960, 960) * 1000.0
        psd = np.full(freqs.size, 1.0)
        with pytest.raises(ValueError):
            harness.find_guard_band(freqs, psd, self.MASK, 720e3)


class TestWilson:
    def test_zero_errors(self):
        lo, hi = harness.wilson_interval(0, 100)
        assert lo == pytest.approx(0.0, abs=1e-15) and 0 < hi < 0.05

    def test_contains_point_estimate(self):
        lo, hi = harness.wilson_interval(13, 200)
        assert lo < 13 / 200 < hi


class TestBer:
    def test_noiseless_identity_zero_ber(self, tmp_path):
        sc = scenario(tmp_path, blocks=5, ebn0_db=[100.0])
        out = harness.run_ber(sc)
        assert out["rows"][0][3] == 0.0

    def test_determinism(self, tmp_path):
        cfg = {"blocks": 3, "ebn0_db": [6.0], "channel": "tdl_default"}
        o1 = harness.run_ber(scenario(tmp_path, out_dir=str(tmp_path / "a"), **cfg))
        o2 = harness.run_ber(scenario(tmp_path, out_dir=str(tmp_path / "b"), **cfg))
        assert open(o1["ber_csv"], "rb").read() == open(o2["ber_csv"], "rb").read()

    def test_monotone_within_ci(self, tmp_path):
        sc = scenario(tmp_path, blocks=40, ebn0_db=[0.0, 6.0, 12.0])
        out = harness.run_ber(sc)
        rows = out["rows"]
        # AWGN identity channel: BER falls with EbN0 beyond CI overlap noise
        for (e1, _, _, _, lo1, _), (e2, _, _, _, _, hi2) in zip(rows, rows[1:]):
            assert hi2 <= max(lo1, 1.0) + 1e-12 or rows[0][3] >= rows[-1][3]
        assert rows[0][3] > rows[-1][3]


class TestSe:
    def test_forced_cp_value(self, tmp_path):
        sc = scenario(tmp_path)
        out = harness.run_se(sc, [(14.0, 0, 1, 0.0, 0.0, 0.0)], 0.0)
        assert out["rows"][0][3] == pytest.approx(3.5778, abs=1e-4)

    def test_forced_nogi_value(self, tmp_path):
        sc = scenario(tmp_path, waveform="cps_nogi")
        out = harness.run_se(sc, [(14.0, 0, 1, 0.0, 0.0, 0.0)], 0.0)
        assert out["rows"][0][3] == pytest.approx(3.8333, abs=1e-4)

    def test_half_at_ber_half(self, tmp_path):
        sc = scenario(tmp_path)
        full = harness.run_se(sc, [(0.0, 0, 1, 0.0, 0.0, 0.0)], 0.0)["rows"][0][3]
        half = harness.run_se(sc, [(0.0, 0, 1, 0.5, 0.0, 0.0)], 0.0)["rows"][0][3]
        assert half == pytest.approx(full / 2, rel=1e-12)

    def test_requires_rows(self, tmp_path):
        with pytest.raises(ValueError):
            harness.run_se(scenario(tmp_path), [], 0.0)


class TestScatter:
    def test_requires_shaping(self, tmp_path):
        with pytest.raises(ValueError):
            harness.export_scatter(scenario(tmp_path))

    def test_zero_positions_excluded(self, tmp_path):
        sc = scenario(tmp_path, blocks=2,
                      shaping={"enabled": True, "evm_max_db": -10.0})
        out = harness.export_scatter(sc)
        positions = {row[1] for row in out["rows"]}
        assert positions == set(sc.params.data_idx)
        assert 0 not in positions and 24 not in positions

    def test_tiny_evm_pins_to_lattice(self, tmp_path):
        sc = scenario(tmp_path, blocks=2,
                      shaping={"enabled": True, "evm_max_db": -180.0})
        out = harness.export_scatter(sc)
        pts = wf.qam16_points()
        for _, _, re, im, _, _ in out["rows"]:
            assert np.min(np.abs((re + 1j * im) - pts)) < 1e-4

    def test_larger_budget_larger_offsets(self, tmp_path):
        means = {}
        for db in (-13.0, -10.0):
            sc = scenario(tmp_path, blocks=3,
                          shaping={"enabled": True, "evm_max_db": db})
            offs = []
            for b in range(sc.blocks):
                res = harness.make_block(sc, b)
                assert res.shaped
                offs.append(np.abs(res.c - res.d))
            means[db] = np.mean(offs)
        assert means[-10.0] > means[-13.0]


class TestScenarioMatrix:
    def test_ofdm_preset_identity_precoder(self, tmp_path):
        sc = scenario(tmp_path, waveform="ofdm")
        assert np.array_equal(sc.synthesis.P, np.eye(48, dtype=complex))
        assert sc.params.Z == 0

    def test_presets_load(self, tmp_path):
        for name, G in (("cps_cp", 9), ("cps_nogi", 0), ("ofdm", 9)):
            sc = scenario(tmp_path, waveform=name)
            assert sc.params.G == G
            assert sc.params.S == 48

    def test_unknown_preset(self, tmp_path):
        with pytest.raises(ValueError):
            scenario(tmp_path, waveform="bogus").params
