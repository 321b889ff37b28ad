import numpy as np
import pytest

from cpsofdm import waveform as wf


@pytest.fixture(scope="module")
def paper():
    params = wf.paper_params("cp")
    p = wf.tapered_prototype(params.S)
    P = wf.build_precoder(p, params.K, params.M)
    return params, p, P, wf.build_synthesis(P, params)


class TestParams:
    def test_factorization_enforced(self):
        with pytest.raises(ValueError):
            wf.WaveformParams(N=128, G=9, gi_mode="cp", S=48, K=2, M=23,
                              eta=28, data_idx=(0,))

    def test_subband_must_fit(self):
        with pytest.raises(ValueError):
            wf.WaveformParams(N=64, G=9, gi_mode="cp", S=48, K=2, M=24,
                              eta=28, data_idx=(0,))

    def test_nogi_forces_zero_guard(self):
        with pytest.raises(ValueError):
            wf.WaveformParams(N=128, G=9, gi_mode="nogi", S=48, K=2, M=24,
                              eta=28, data_idx=(0,))

    def test_derived_sizes(self):
        params = wf.paper_params("cp")
        assert params.n_prime == 137
        assert params.D == 46 and params.Z == 2
        assert params.zero_idx == (0, 24)


class TestPrecoder:
    def test_dft_s_ofdm_reduction(self):
        # K=1 with a constant prototype collapses to the normalized DFT matrix
        S = 48
        P = wf.build_precoder(wf.constant_prototype(S), 1, S)
        k, n = np.meshgrid(np.arange(S), np.arange(S), indexing="ij")
        W = np.exp(-2j * np.pi * k * n / S) / np.sqrt(S)
        assert np.abs(P - W).max() < 1e-12

    def test_impulse_prototype_single_entry(self):
        K, M = 3, 4
        P = wf.build_precoder(wf.identity_prototype(K * M), K, M)
        for k in range(K):
            for m in range(M):
                col = P[:, k * M + m]
                assert col[k * M] == pytest.approx(1.0)
                assert np.count_nonzero(col) == 1

    def test_column_energies_equal_prototype_energy(self):
        rng = np.random.default_rng(7)
        p = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        p /= np.linalg.norm(p)
        P = wf.build_precoder(p, 2, 24)
        energies = (np.abs(P) ** 2).sum(axis=0)
        assert np.abs(energies - 1.0).max() < 1e-12

    def test_shift_modulation_structure(self):
        # column (k, m) = downshifted prototype times the modulation sequence
        rng = np.random.default_rng(8)
        K, M = 4, 6
        S = K * M
        p = rng.standard_normal(S) + 1j * rng.standard_normal(S)
        P = wf.build_precoder(p, K, M)
        i = np.arange(S)
        for k in range(K):
            for m in range(M):
                expected = p[(i - k * M) % S] * np.exp(-2j * np.pi * m * i / M)
                assert np.abs(P[:, k * M + m] - expected).max() < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            wf.build_precoder(np.ones(10), 2, 24)

    def test_tapered_prototype_unitary_precoder(self):
        P = wf.build_precoder(wf.tapered_prototype(48), 2, 24)
        assert np.abs(P.conj().T @ P - np.eye(48)).max() < 1e-12


class TestSynthesis:
    def test_paper_shape(self, paper):
        _, _, _, synth = paper
        assert synth.Phi.shape == (137, 48)
        assert synth.Phi_bar.shape == (137, 46)

    def test_nogi_is_plain_idft_stage(self):
        params = wf.paper_params("nogi")
        P = wf.build_precoder(wf.tapered_prototype(48), 2, 24)
        synth = wf.build_synthesis(P, params)
        expected = wf.idft_columns(params.N, params.subband_idx) @ P
        assert synth.Phi.shape == (128, 48)
        assert np.abs(synth.Phi - expected).max() < 1e-12

    def test_cp_rows_copy_tail(self, paper):
        params, _, _, synth = paper
        assert np.abs(synth.Phi[:9] - synth.Phi[128:]).max() == 0.0

    def test_nogi_stage_is_isometry(self):
        # columns of the inverse DFT are orthonormal
        F = wf.idft_columns(128, np.arange(28, 76))
        rng = np.random.default_rng(9)
        s = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        assert np.linalg.norm(F @ s) == pytest.approx(np.linalg.norm(s), abs=1e-12)

    def test_cp_energy_identity(self, paper):
        params, _, _, synth = paper
        rng = np.random.default_rng(10)
        c = rng.standard_normal(48) + 1j * rng.standard_normal(48)
        x = wf.transmit_block(c, synth)
        body = x[params.G:]
        tail_energy = np.linalg.norm(body[-params.G:]) ** 2
        assert np.linalg.norm(x) ** 2 == pytest.approx(
            np.linalg.norm(body) ** 2 + tail_energy, rel=1e-12)


class TestTransmit:
    def test_zero_input(self, paper):
        _, _, _, synth = paper
        assert np.all(wf.transmit_block(np.zeros(48), synth) == 0)

    def test_basis_vector_gives_column(self, paper):
        _, _, _, synth = paper
        e = np.zeros(48, dtype=complex)
        e[17] = 1.0
        assert np.abs(wf.transmit_block(e, synth) - synth.Phi[:, 17]).max() < 1e-12

    def test_fft_path_matches_dense(self, paper):
        params, _, _, synth = paper
        rng = np.random.default_rng(11)
        d = wf.make_data_block(rng.integers(0, 2, 4 * params.D), params)
        fast = wf.transmit_block(d, synth)
        dense = wf.transmit_block_dense(d, synth)
        assert np.abs(fast - dense).max() / np.abs(dense).max() < 1e-10


class TestSerialize:
    def test_empty(self):
        assert wf.serialize_blocks([]).size == 0

    def test_single_block(self):
        b = np.arange(5, dtype=complex)
        assert np.array_equal(wf.serialize_blocks([b]), b)

    def test_offsets(self):
        rng = np.random.default_rng(12)
        blocks = [rng.standard_normal(7) + 0j for _ in range(3)]
        stream = wf.serialize_blocks(blocks)
        assert stream.size == 21
        for b in range(3):
            for n in range(7):
                assert stream[b * 7 + n] == blocks[b][n]

    def test_mixed_lengths_rejected(self):
        with pytest.raises(ValueError):
            wf.serialize_blocks([np.zeros(3), np.zeros(4)])


class TestQam:
    def test_all_zero_bits(self):
        syms = wf.qam_map(np.zeros(4 * 6, dtype=int))
        assert np.all(syms == syms[0])
        assert syms[0] == pytest.approx(np.sqrt(0.1) * (-3 - 3j))

    def test_roundtrip_all_symbols(self):
        bits = np.array([(i >> (3 - j)) & 1 for i in range(16) for j in range(4)])
        assert np.array_equal(wf.qam_demap(wf.qam_map(bits)), bits)

    def test_unit_mean_energy(self):
        pts = wf.qam16_points(Es=1.0)
        assert np.mean(np.abs(pts) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_bit_count_validated(self):
        with pytest.raises(ValueError):
            wf.qam_map(np.zeros(6, dtype=int))

    def test_data_block_support(self):
        params = wf.paper_params("cp")
        d = wf.make_data_block(np.zeros(4 * 46, dtype=int), params)
        assert d[0] == 0 and d[24] == 0
        assert np.all(d[list(params.data_idx)] != 0)


def test_prototype_file_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    p = rng.standard_normal(48) + 1j * rng.standard_normal(48)
    path = str(tmp_path / "proto.txt")
    wf.save_prototype(path, p)
    assert np.abs(wf.load_prototype(path) - p).max() < 1e-14
