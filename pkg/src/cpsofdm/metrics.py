"""Envelope and spectral metrics: RCM/CM, block EVM, ESD, out-of-subband
emission energy, averaged PSD, CCDF, spectral efficiency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CmParams:
    """Affine map from raw cubic metric to CM in dB."""

    rcm_ref_db: float
    slope_db: float

    def __post_init__(self):
        if self.slope_db == 0:
            raise ValueError("slope_db must be nonzero")


def rcm(x: np.ndarray) -> float:
    """Raw cubic metric N' * (||x||_6 / ||x||_2)^3.

    Equals 1 for a constant-envelope block and N' for a single impulse.
    """
    x = np.asarray(x, dtype=complex)
    mag2 = np.abs(x) ** 2
    e2 = mag2.sum()
    if e2 == 0:
        raise ValueError("RCM undefined for a zero-energy block")
    e6 = (mag2 ** 3).sum()
    n = x.size
    return float(n * e6 ** 0.5 / e2 ** 1.5)


def cm_db(rcm_value: float, params: CmParams) -> float:
    if rcm_value <= 0:
        raise ValueError("RCM must be positive")
    return (20.0 * np.log10(rcm_value) - params.rcm_ref_db) / params.slope_db


def evm(x: np.ndarray, x_ref: np.ndarray) -> float:
    """Block-wise error vector magnitude ||x - x_ref|| / ||x_ref||."""
    x = np.asarray(x, dtype=complex)
    x_ref = np.asarray(x_ref, dtype=complex)
    if x.shape != x_ref.shape:
        raise ValueError("blocks must have equal length")
    ref = np.linalg.norm(x_ref)
    if ref == 0:
        raise ValueError("EVM undefined for a zero-energy reference")
    return float(np.linalg.norm(x - x_ref) / ref)


def esd(x: np.ndarray, omega) -> np.ndarray | float:
    """Energy spectral density |sum_n x_n e^{-j omega n}|^2 at omega (scalar
    or array)."""
    x = np.asarray(x, dtype=complex)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    n = np.arange(x.size)
    X = np.exp(-1j * np.outer(w, n)) @ x
    out = np.abs(X) ** 2
    return float(out[0]) if np.isscalar(omega) or np.ndim(omega) == 0 else out


@dataclass(frozen=True)
class OsbRegion:
    """Union of disjoint omega-intervals inside [-pi, pi).

    ``panel_width`` is the target quadrature panel size; regions built from
    subcarrier indices use one panel per subcarrier so that the direct OSBEE
    integral and the quadratic-form matrix share identical nodes.
    """

    intervals: tuple[tuple[float, float], ...]
    panel_width: float

    def __post_init__(self):
        for lo, hi in self.intervals:
            if hi <= lo:
                raise ValueError(f"empty or inverted interval ({lo}, {hi})")
            if lo < -np.pi - 1e-12 or hi > np.pi + 1e-12:
                raise ValueError("intervals must lie within [-pi, pi]")
        ivs = sorted(self.intervals)
        for (_, hi), (lo, _) in zip(ivs, ivs[1:]):
            if lo < hi - 1e-12:
                raise ValueError("intervals must be pairwise disjoint")

    @property
    def total_width(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    @classmethod
    def from_subcarriers(cls, indices, N: int) -> "OsbRegion":
        """Expand each subcarrier index i to a width-2pi/N interval centered
        at its frequency (mapped to [-pi, pi)), merging adjacent ones."""
        w = 2.0 * np.pi / N
        pieces = []
        for i in sorted(set(int(i) for i in indices)):
            if i < 0 or i >= N:
                raise ValueError(f"subcarrier index {i} outside [0, {N})")
            center = 2.0 * np.pi * i / N
            if center >= np.pi:
                center -= 2.0 * np.pi
            lo, hi = center - w / 2.0, center + w / 2.0
            # split a straddling interval at the -pi/pi seam
            if lo < -np.pi:
                pieces.append((lo + 2.0 * np.pi, np.pi))
                pieces.append((-np.pi, hi))
            elif hi > np.pi:
                pieces.append((lo, np.pi))
                pieces.append((-np.pi, hi - 2.0 * np.pi))
            else:
                pieces.append((lo, hi))
        pieces.sort()
        merged = [pieces[0]]
        for lo, hi in pieces[1:]:
            if lo <= merged[-1][1] + w * 1e-9:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        return cls(intervals=tuple(merged), panel_width=w)

    @classmethod
    def full_circle(cls, N: int = 128) -> "OsbRegion":
        return cls(intervals=((-np.pi, np.pi),), panel_width=2.0 * np.pi / N)

    def quadrature(self, oversample: int = 16) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes and weights covering the region.

        Each interval is cut into panels no wider than ``panel_width`` and
        each panel receives ``oversample`` nodes; the returned weights
        integrate f over the region (no 1/2pi factor).
        """
        if oversample < 1:
            raise ValueError("oversample must be >= 1")
        base_x, base_w = np.polynomial.legendre.leggauss(int(oversample))
        nodes, weights = [], []
        for lo, hi in self.intervals:
            n_panels = max(1, int(np.ceil((hi - lo) / self.panel_width - 1e-12)))
            edges = np.linspace(lo, hi, n_panels + 1)
            for a, b in zip(edges[:-1], edges[1:]):
                half = (b - a) / 2.0
                nodes.append(half * base_x + (a + b) / 2.0)
                weights.append(half * base_w)
        return np.concatenate(nodes), np.concatenate(weights)


def osbee_direct(x: np.ndarray, region: OsbRegion | None, oversample: int = 16) -> float:
    """OSBEE by quadrature of the ESD over the region, divided by 2*pi."""
    if region is None or not region.intervals:
        return 0.0
    nodes, weights = region.quadrature(oversample)
    vals = esd(np.asarray(x, dtype=complex), nodes)
    return float(weights @ vals / (2.0 * np.pi))


def psd_average(blocks, grid: np.ndarray) -> np.ndarray:
    """Mean ESD of the blocks evaluated on an omega grid."""
    blocks = np.atleast_2d(np.asarray(blocks, dtype=complex))
    if blocks.size == 0:
        raise ValueError("need at least one block")
    n = np.arange(blocks.shape[1])
    E = np.exp(-1j * np.outer(np.asarray(grid, dtype=float), n))
    X = E @ blocks.T  # grid x B
    return (np.abs(X) ** 2).mean(axis=1)


def ccdf(samples, thresholds) -> np.ndarray:
    """Empirical complementary CDF: fraction of samples strictly above each
    threshold."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("need at least one sample")
    t = np.atleast_1d(np.asarray(thresholds, dtype=float))
    return (samples[None, :] > t[:, None]).mean(axis=1)


def spectral_efficiency(n_bit: int, D: int, n_blocks: int, ber: float,
                        tti_s: float, bw_hz: float, delta_hz: float) -> float:
    """Net bit/s/Hz: N_bit * D * N_B * (1 - BER) / (TTI * (BW + delta))."""
    denom = tti_s * (bw_hz + delta_hz)
    if denom <= 0:
        raise ValueError("TTI * (BW + delta) must be positive")
    return n_bit * D * n_blocks * (1.0 - ber) / denom
