"""CPS-OFDM waveform construction.

Builds the circular pulse-shaping precoder, the end-to-end synthesis matrix
(precoder -> subcarrier mapping -> IFFT -> guard interval), and the 16-QAM
bit mapping used throughout the simulator.

DFT convention: normalized, W_N[k, n] = exp(-2j*pi*k*n/N) / sqrt(N), so the
inverse transform is W_N^H and both directions preserve energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class GiMode(str, Enum):
    CP = "cp"
    NOGI = "nogi"


@dataclass(frozen=True)
class WaveformParams:
    """Structural integers and index sets of the CPS-OFDM grid.

    ``S = K*M`` subband subcarriers start at absolute index ``eta``;
    ``data_idx`` lists the positions of the D data symbols inside the
    subband, the remaining ``Z`` positions carry zeros.
    """

    N: int
    G: int
    gi_mode: GiMode
    S: int
    K: int
    M: int
    eta: int
    data_idx: tuple[int, ...]
    constellation: str = "16qam"
    Es: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gi_mode", GiMode(self.gi_mode))
        object.__setattr__(self, "data_idx", tuple(int(i) for i in self.data_idx))
        if self.S != self.K * self.M:
            raise ValueError(f"S={self.S} must equal K*M={self.K * self.M}")
        if self.eta < 0 or self.eta + self.S > self.N:
            raise ValueError("subband [eta, eta+S) must fit inside [0, N)")
        if self.gi_mode is GiMode.NOGI and self.G != 0:
            raise ValueError("NoGI requires G = 0")
        if self.gi_mode is GiMode.CP and self.G < 1:
            raise ValueError("CP mode requires G >= 1")
        if len(set(self.data_idx)) != len(self.data_idx):
            raise ValueError("data_idx contains duplicates")
        if any(i < 0 or i >= self.S for i in self.data_idx):
            raise ValueError("data_idx entries must lie in [0, S)")

    @property
    def n_prime(self) -> int:
        return self.N + self.G

    @property
    def D(self) -> int:
        return len(self.data_idx)

    @property
    def Z(self) -> int:
        return self.S - self.D

    @property
    def subband_idx(self) -> np.ndarray:
        """Absolute subcarrier indices occupied by the subband."""
        return np.arange(self.eta, self.eta + self.S)

    @property
    def zero_idx(self) -> tuple[int, ...]:
        data = set(self.data_idx)
        return tuple(i for i in range(self.S) if i not in data)


def constant_prototype(S: int) -> np.ndarray:
    """All-ones prototype, 1/sqrt(S) each: with K=1 the precoder collapses to
    the normalized DFT matrix (DFT-S-OFDM)."""
    return np.full(S, 1.0 / np.sqrt(S), dtype=complex)


def tapered_prototype(S: int) -> np.ndarray:
    """Smooth root-raised-cosine crossfade prototype, unit energy.

    The two half-period legs are a cos/sin quadrature pair (second leg
    rotated by j), which makes the K=2 precoder exactly unitary: per residue
    r, |p_r|^2 + |p_{r+S/2}|^2 is constant and Re(p_r conj(p_{r+S/2})) = 0.
    A plain symmetric real taper would instead collapse column pairs of the
    precoder wherever p_i^2 = p_{i+S/2}^2.
    """
    if S % 2:
        raise ValueError("tapered prototype requires even S")
    M = S // 2
    t = (np.arange(M) + 0.5) / M
    p = np.empty(S, dtype=complex)
    p[:M] = np.cos(np.pi / 2.0 * t)
    p[M:] = 1j * np.sin(np.pi / 2.0 * t)
    return p / np.linalg.norm(p)


def load_prototype(path: str) -> np.ndarray:
    """Read a prototype vector from text, one "re im" pair per line."""
    raw = np.loadtxt(path, ndmin=2)
    if raw.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (re im), got {raw.shape[1]}")
    p = raw[:, 0] + 1j * raw[:, 1]
    if np.linalg.norm(p) == 0:
        raise ValueError("prototype vector has zero norm")
    return p


def save_prototype(path: str, p: np.ndarray) -> None:
    np.savetxt(path, np.column_stack([p.real, p.imag]), fmt="%.17g")


def build_precoder(p: np.ndarray, K: int, M: int) -> np.ndarray:
    """CPS precoding matrix: column (k, m) is the prototype circularly
    downshifted by k*M, modulated by exp(-2j*pi*m*i/M) over rows i."""
    p = np.asarray(p, dtype=complex)
    S = K * M
    if p.shape != (S,):
        raise ValueError(f"prototype length {p.shape} does not match K*M={S}")
    i = np.arange(S)
    P = np.empty((S, S), dtype=complex)
    for k in range(K):
        shifted = p[(i - k * M) % S]
        for m in range(M):
            P[:, k * M + m] = shifted * np.exp(-2j * np.pi * m * i / M)
    return P


def idft_columns(N: int, cols: np.ndarray) -> np.ndarray:
    """Selected columns of the N-point normalized inverse DFT matrix."""
    n = np.arange(N)[:, None]
    return np.exp(2j * np.pi * n * np.asarray(cols)[None, :] / N) / np.sqrt(N)


@dataclass(frozen=True)
class SynthesisMatrix:
    """End-to-end linear transmit map x = Phi @ c and its data-column
    restriction Phi_bar; retains the precoder for the FFT fast path."""

    Phi: np.ndarray
    Phi_bar: np.ndarray
    P: np.ndarray
    params: WaveformParams


def build_synthesis(P: np.ndarray, params: WaveformParams) -> SynthesisMatrix:
    if P.shape != (params.S, params.S):
        raise ValueError(f"precoder shape {P.shape} inconsistent with S={params.S}")
    A = idft_columns(params.N, params.subband_idx) @ P  # N x S
    if params.gi_mode is GiMode.CP:
        Phi = np.vstack([A[params.N - params.G:], A])
    else:
        Phi = A
    return SynthesisMatrix(Phi=Phi, Phi_bar=Phi[:, list(params.data_idx)], P=P, params=params)


def transmit_block(src: np.ndarray, synth: SynthesisMatrix) -> np.ndarray:
    """Map an S-dim symbol vector to the N' time-domain block via the
    zero-padded IFFT fast path (matches the dense product Phi @ src)."""
    params = synth.params
    src = np.asarray(src, dtype=complex)
    if src.shape != (params.S,):
        raise ValueError(f"source vector must have {params.S} entries")
    s = synth.P @ src
    full = np.zeros(params.N, dtype=complex)
    full[params.eta:params.eta + params.S] = s
    xN = np.fft.ifft(full) * np.sqrt(params.N)
    if params.gi_mode is GiMode.CP:
        return np.concatenate([xN[params.N - params.G:], xN])
    return xN


def transmit_block_dense(src: np.ndarray, synth: SynthesisMatrix) -> np.ndarray:
    """Dense matrix-vector reference path for transmit_block."""
    return synth.Phi @ np.asarray(src, dtype=complex)


def serialize_blocks(blocks) -> np.ndarray:
    """Concatenate equal-length blocks; block b occupies samples
    [b*N', (b+1)*N')."""
    blocks = list(blocks)
    if not blocks:
        return np.zeros(0, dtype=complex)
    n = len(blocks[0])
    if any(len(b) != n for b in blocks):
        raise ValueError("all blocks must share the same length")
    return np.concatenate([np.asarray(b, dtype=complex) for b in blocks])


# Gray-labeled square 16-QAM, per-axis label -> level (levels scaled later
# so the constellation has unit mean energy at Es=1).
_GRAY_AXIS = {(0, 0): -3.0, (0, 1): -1.0, (1, 1): 1.0, (1, 0): 3.0}
_AXIS_BITS = {v: k for k, v in _GRAY_AXIS.items()}
BITS_PER_SYMBOL = 4


def qam16_points(Es: float = 1.0) -> np.ndarray:
    """All 16 constellation points in label order 0b b0 b1 b2 b3."""
    scale = np.sqrt(Es / 10.0)
    pts = np.empty(16, dtype=complex)
    for idx in range(16):
        b = [(idx >> (3 - j)) & 1 for j in range(4)]
        pts[idx] = scale * (_GRAY_AXIS[(b[0], b[1])] + 1j * _GRAY_AXIS[(b[2], b[3])])
    return pts


def qam_map(bits: np.ndarray, Es: float = 1.0) -> np.ndarray:
    """Gray 16-QAM mapping; bits are consumed four at a time (I pair then
    Q pair)."""
    bits = np.asarray(bits, dtype=int)
    if bits.ndim != 1 or bits.size % BITS_PER_SYMBOL:
        raise ValueError("bit count must be a multiple of 4")
    groups = bits.reshape(-1, 4)
    idx = groups[:, 0] * 8 + groups[:, 1] * 4 + groups[:, 2] * 2 + groups[:, 3]
    return qam16_points(Es)[idx]


def qam_demap(symbols: np.ndarray, Es: float = 1.0) -> np.ndarray:
    """Nearest-neighbor 16-QAM demapping back to bits."""
    symbols = np.asarray(symbols, dtype=complex)
    pts = qam16_points(Es)
    idx = np.argmin(np.abs(symbols[:, None] - pts[None, :]), axis=1)
    bits = np.empty((symbols.size, 4), dtype=int)
    for j in range(4):
        bits[:, j] = (idx >> (3 - j)) & 1
    return bits.reshape(-1)


def make_data_block(bits: np.ndarray, params: WaveformParams) -> np.ndarray:
    """Full S-length data vector: QAM symbols at data_idx, zeros elsewhere."""
    syms = qam_map(bits, params.Es)
    if syms.size != params.D:
        raise ValueError(f"expected {params.D * BITS_PER_SYMBOL} bits, got {bits.size}")
    d = np.zeros(params.S, dtype=complex)
    d[list(params.data_idx)] = syms
    return d


def expand_offset(c_bar: np.ndarray, params: WaveformParams) -> np.ndarray:
    """Scatter a D-length data-position vector back to full S length."""
    c_bar = np.asarray(c_bar, dtype=complex)
    if c_bar.shape != (params.D,):
        raise ValueError(f"expected {params.D} entries")
    c = np.zeros(params.S, dtype=complex)
    c[list(params.data_idx)] = c_bar
    return c


def paper_params(gi_mode: str = "cp") -> WaveformParams:
    """Default CPS-OFDM configuration: N=128, G=9 (CP), S=48 starting at 28,
    K=2, M=24, zeros at subband positions 0 and 24."""
    mode = GiMode(gi_mode)
    data_idx = tuple(i for i in range(48) if i not in (0, 24))
    return WaveformParams(
        N=128,
        G=9 if mode is GiMode.CP else 0,
        gi_mode=mode,
        S=48,
        K=2,
        M=24,
        eta=28,
        data_idx=data_idx,
    )


def ofdm_params() -> WaveformParams:
    """Plain-OFDM benchmark: identity precoder territory (K=S, M=1 with an
    impulse prototype gives P = I), no zero symbols."""
    return WaveformParams(
        N=128,
        G=9,
        gi_mode=GiMode.CP,
        S=48,
        K=48,
        M=1,
        eta=28,
        data_idx=tuple(range(48)),
    )


def identity_prototype(S: int) -> np.ndarray:
    """Unit impulse prototype: with M=1, K=S the precoder is exactly I_S."""
    p = np.zeros(S, dtype=complex)
    p[0] = 1.0
    return p
