"""Channel, noise, PA nonlinearity, and the receive chain (guard removal,
FFT, MMSE frequency-domain equalization, demapping)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .waveform import BITS_PER_SYMBOL, GiMode, WaveformParams, qam_demap

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelModel:
    """Finite impulse response channel; taps[l] multiplies x[n-l]."""

    taps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "taps", np.asarray(self.taps, dtype=complex))
        if self.taps.ndim != 1 or self.taps.size == 0:
            raise ValueError("taps must be a nonempty 1-D array")

    @property
    def order(self) -> int:
        return self.taps.size - 1

    def warn_if_exceeds_guard(self, params: WaveformParams) -> None:
        if params.gi_mode is GiMode.CP and self.order > params.G:
            log.warning("channel order %d exceeds guard length %d; "
                        "inter-block interference is not removable",
                        self.order, params.G)


@dataclass(frozen=True)
class ChannelProfile:
    """Power-delay profile: Rayleigh-faded taps drawn fresh per block
    (block-static fading)."""

    delays: tuple[int, ...]
    powers_db: tuple[float, ...]

    def __post_init__(self):
        if len(self.delays) != len(self.powers_db):
            raise ValueError("delays and powers_db must have equal length")

    def draw(self, rng: np.random.Generator) -> ChannelModel:
        L = max(self.delays)
        taps = np.zeros(L + 1, dtype=complex)
        p = 10.0 ** (np.asarray(self.powers_db) / 10.0)
        p = p / p.sum()
        g = np.sqrt(p / 2.0) * (rng.standard_normal(p.size)
                                + 1j * rng.standard_normal(p.size))
        for d, gain in zip(self.delays, g):
            taps[d] += gain
        return ChannelModel(taps=taps)


def default_tdl_profile() -> ChannelProfile:
    """5-tap exponential power-delay profile, ~300 ns rms delay spread at a
    1.92 MHz sampling rate (one sample = 521 ns)."""
    delays = tuple(range(5))
    decay = 0.521 / 0.3  # sample period over rms delay spread
    # tap powers fall as exp(-delay * Ts / tau_rms)
    powers_db = tuple(10.0 * np.log10(np.exp(-d * decay)) for d in delays)
    return ChannelProfile(delays=delays, powers_db=powers_db)


class PaKind(str, Enum):
    IDEAL = "ideal"
    RAPP = "rapp"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class PaModel:
    """Memoryless PA: input is scaled so its mean power sits ibo_db below the
    saturation reference, then passed through the nonlinearity and rotated by
    -phase_comp_deg."""

    kind: PaKind = PaKind.IDEAL
    ibo_db: float = 0.0
    phase_comp_deg: float = 0.0
    smoothness: float = 2.0          # Rapp p factor
    sat_amplitude: float = 1.0       # Rapp saturation amplitude
    coeffs: tuple[complex, ...] = () # odd-order gains a1, a3, a5, a7, a9

    def __post_init__(self):
        object.__setattr__(self, "kind", PaKind(self.kind))
        if not np.isfinite(self.ibo_db):
            raise ValueError("ibo_db must be finite")
        if self.kind is PaKind.POLYNOMIAL and not self.coeffs:
            raise ValueError("polynomial PA requires coefficients")


def pa_apply(stream: np.ndarray, pa: PaModel) -> np.ndarray:
    stream = np.asarray(stream, dtype=complex)
    if pa.kind is PaKind.IDEAL:
        return stream.copy()
    p_in = float(np.mean(np.abs(stream) ** 2))
    if p_in == 0:
        return stream.copy()
    p_target = pa.sat_amplitude ** 2 / 10.0 ** (pa.ibo_db / 10.0)
    x = stream * np.sqrt(p_target / p_in)
    if pa.kind is PaKind.RAPP:
        mag = np.abs(x) / pa.sat_amplitude
        y = x / (1.0 + mag ** (2.0 * pa.smoothness)) ** (1.0 / (2.0 * pa.smoothness))
    else:
        y = np.zeros_like(x)
        for q, a in zip((1, 3, 5, 7, 9), pa.coeffs):
            y = y + a * x * np.abs(x) ** (q - 1)
    return y * np.exp(-1j * np.deg2rad(pa.phase_comp_deg))


def load_pa_coeffs(path: str) -> tuple[complex, ...]:
    """Odd-order polynomial coefficients from text, one "re im" per line
    (orders 1, 3, 5, 7, 9)."""
    raw = np.loadtxt(path, ndmin=2)
    if raw.shape[1] != 2 or raw.shape[0] > 5:
        raise ValueError(f"{path}: expected up to 5 rows of re/im pairs")
    return tuple(complex(r, i) for r, i in raw)


@dataclass(frozen=True)
class NoiseParams:
    N0: float

    def __post_init__(self):
        if self.N0 < 0:
            raise ValueError("N0 must be nonnegative")

    @classmethod
    def from_ebn0_db(cls, ebn0_db: float, Es: float = 1.0,
                     n_bit: int = BITS_PER_SYMBOL) -> "NoiseParams":
        """N0 = Es / (n_bit * 10^(EbN0_dB/10)); no guard-overhead energy
        adjustment."""
        return cls(N0=Es / (n_bit * 10.0 ** (ebn0_db / 10.0)))


def apply_channel(stream: np.ndarray, channel: ChannelModel, N0: float,
                  rng: np.random.Generator) -> np.ndarray:
    """Linear convolution with the taps (output truncated to the input
    length) plus circular complex AWGN of per-sample variance N0."""
    stream = np.asarray(stream, dtype=complex)
    if stream.size == 0:
        raise ValueError("stream must be nonempty")
    y = np.convolve(stream, channel.taps)[:stream.size]
    if N0 > 0:
        noise = np.sqrt(N0 / 2.0) * (rng.standard_normal(stream.size)
                                     + 1j * rng.standard_normal(stream.size))
        y = y + noise
    return y


def receive_block(y_block: np.ndarray, params: WaveformParams) -> np.ndarray:
    """Guard removal, N-point normalized FFT, subband extraction."""
    y_block = np.asarray(y_block, dtype=complex)
    if y_block.size != params.n_prime:
        raise ValueError(f"expected {params.n_prime} samples, got {y_block.size}")
    body = y_block[params.G:]
    Y = np.fft.fft(body) / np.sqrt(params.N)
    return Y[params.subband_idx]


def channel_freq_response(channel: ChannelModel, params: WaveformParams) -> np.ndarray:
    """Diagonal of H: frequency response at the occupied subcarriers."""
    idx = params.subband_idx
    l = np.arange(channel.taps.size)
    return np.exp(-2j * np.pi * np.outer(idx, l) / params.N) @ channel.taps


def mmse_matrix(H_diag: np.ndarray, P_data: np.ndarray, N0: float,
                Es: float) -> np.ndarray:
    """MMSE-FDE matrix Q = (A^H A + (N0/Es) I)^{-1} A^H with A = H P_data,
    assembled via a Hermitian solve."""
    if Es <= 0:
        raise ValueError("Es must be positive")
    A = H_diag[:, None] * P_data
    D = P_data.shape[1]
    G = A.conj().T @ A + (N0 / Es) * np.eye(D)
    if N0 == 0 and np.linalg.matrix_rank(A) < D:
        raise np.linalg.LinAlgError("rank-deficient system with zero noise")
    return np.linalg.solve(G, A.conj().T)


def equalize_and_demap(r: np.ndarray, Q: np.ndarray, Es: float) -> tuple[np.ndarray, np.ndarray]:
    """Equalized data estimates and their hard-decision bits."""
    d_hat = Q @ r
    return d_hat, qam_demap(d_hat, Es)


def ber_count(tx_bits: np.ndarray, rx_bits: np.ndarray) -> tuple[int, int, float]:
    tx_bits = np.asarray(tx_bits, dtype=int)
    rx_bits = np.asarray(rx_bits, dtype=int)
    if tx_bits.shape != rx_bits.shape:
        raise ValueError("bit streams must have equal length")
    errors = int(np.count_nonzero(tx_bits != rx_bits))
    return errors, tx_bits.size, errors / tx_bits.size if tx_bits.size else 0.0
