"""Quadratic-form representation of the out-of-subband emission energy.

The ESD of a transmitted block satisfies |X(e^{jw})|^2 = |u(w)^H c|^2 where
the spectral response vector u is assembled from Dirichlet window values of
the circularly shifted prototype. Integrating u u^H over the OSB region
yields a Hermitian positive-definite matrix E with OSBEE = c^H E c, which is
what makes the emission constraint of the shaping problem convex.
"""

from __future__ import annotations

import hashlib
import logging
import struct
from dataclasses import dataclass

import numpy as np

from .metrics import OsbRegion
from .waveform import WaveformParams

log = logging.getLogger(__name__)

_CACHE_MAGIC = b"CPSOFDM-EMAT\x00\x01"


def downshift_matrix(shift: int, S: int) -> np.ndarray:
    """Circular downshift permutation: (C_shift v)_i = v_{(i - shift) mod S}."""
    if not 0 <= shift < S:
        raise ValueError(f"shift {shift} outside [0, {S})")
    C = np.zeros((S, S))
    i = np.arange(S)
    C[i, (i - shift) % S] = 1.0
    return C


def dirichlet_window(omega, center, length: int):
    """Geometric sum sum_{n=0}^{length-1} e^{-j(omega-center)n}.

    The removable singularity at omega = center (mod 2*pi) returns exactly
    ``length``.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    theta = np.asarray(omega, dtype=float) - center
    z = np.exp(-1j * theta)
    den = 1.0 - z
    singular = np.abs(den) < 1e-12
    safe = np.where(singular, 1.0, den)
    out = np.where(singular, float(length), (1.0 - z ** length) / safe)
    return out if out.ndim else complex(out)


def _u_matrix(omegas: np.ndarray, p: np.ndarray, params: WaveformParams) -> np.ndarray:
    """Rows are u(w)^T for each omega; |u(w)^H c|^2 equals the ESD of the
    transmitted block Phi c."""
    S, K, M = params.S, params.K, params.M
    N, G, eta = params.N, params.G, params.eta
    n_prime = params.n_prime
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    i = np.arange(S)
    centers = 2.0 * np.pi * (eta + i) / N
    # conj of the per-subcarrier Dirichlet window, evaluated at every omega
    Wc = np.conj(np.vstack([dirichlet_window(omegas, c, n_prime) for c in centers]).T)
    V = Wc * np.exp(2j * np.pi * i * G / N)[None, :]
    Fm = np.exp(2j * np.pi * np.outer(i, np.arange(M)) / M)
    pbar = np.conj(np.asarray(p, dtype=complex))
    U = np.empty((omegas.size, S), dtype=complex)
    for k in range(K):
        pk = pbar[(i - k * M) % S]
        U[:, k * M:(k + 1) * M] = (V * pk[None, :]) @ Fm / np.sqrt(N)
    return U


def build_u_vector(omega: float, p: np.ndarray, params: WaveformParams) -> np.ndarray:
    """Spectral response vector u(w): entry kM+m is (w_m(w)^H C_{kM} p)^H."""
    return _u_matrix(np.array([omega]), p, params)[0]


@dataclass(frozen=True)
class EMatrix:
    """OSBEE quadratic-form matrix and its data-index restriction."""

    E: np.ndarray
    E_bar: np.ndarray
    region: OsbRegion
    oversample: int
    jitter: float = 0.0


def build_E_matrix(p: np.ndarray, params: WaveformParams, region: OsbRegion,
                   oversample: int = 16) -> EMatrix:
    """Quadrature of u(w) u(w)^H over the OSB region on the same nodes used
    by the direct OSBEE integral, Hermitian-symmetrized."""
    if region is None or not region.intervals:
        raise ValueError("empty OSB region would make the emission constraint vacuous")
    nodes, weights = region.quadrature(oversample)
    U = _u_matrix(nodes, p, params)
    E = (U.T * weights) @ np.conj(U) / (2.0 * np.pi)
    E = 0.5 * (E + E.conj().T)
    E_bar = E[np.ix_(params.data_idx, params.data_idx)]
    jitter = 0.0
    eigmin = float(np.linalg.eigvalsh(E_bar)[0])
    floor = 1e-12 * float(np.trace(E_bar).real)
    if eigmin < floor:
        jitter = floor
        E_bar = E_bar + jitter * np.eye(params.D)
        log.warning("E_bar nearly singular (min eig %.3e); added diagonal jitter %.3e",
                    eigmin, jitter)
    return EMatrix(E=E, E_bar=E_bar, region=region, oversample=oversample, jitter=jitter)


def ematrix_cache_key(p: np.ndarray, params: WaveformParams, region: OsbRegion,
                      oversample: int) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(np.asarray(p, dtype=complex)).tobytes())
    h.update(repr((params.N, params.G, params.gi_mode.value, params.S, params.K,
                   params.M, params.eta, params.data_idx)).encode())
    h.update(repr((tuple(region.intervals), region.panel_width, oversample)).encode())
    return h.hexdigest()


def save_ematrix(path: str, em: EMatrix) -> None:
    """Binary dump: magic, little-endian dimension header, then row-major
    complex128 entries of E followed by E_bar."""
    with open(path, "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(struct.pack("<iii", em.E.shape[0], em.E_bar.shape[0], em.oversample))
        f.write(em.E.astype("<c16").tobytes(order="C"))
        f.write(em.E_bar.astype("<c16").tobytes(order="C"))


def load_ematrix(path: str, region: OsbRegion) -> EMatrix:
    with open(path, "rb") as f:
        if f.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
            raise ValueError(f"{path}: not an E-matrix cache file")
        S, D, oversample = struct.unpack("<iii", f.read(12))
        E = np.frombuffer(f.read(16 * S * S), dtype="<c16").reshape(S, S).copy()
        E_bar = np.frombuffer(f.read(16 * D * D), dtype="<c16").reshape(D, D).copy()
    return EMatrix(E=E, E_bar=E_bar, region=region, oversample=oversample)
