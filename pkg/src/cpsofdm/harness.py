"""Monte-Carlo orchestration: per-block RCM/CCDF runs, averaged PSD with
absolute power calibration, BER sweeps, guard-band search against a spectrum
emission mask, spectral efficiency summaries, and CSV emission.

Every emitted CSV starts with a provenance comment line carrying the config
hash and master seed; per-block randomness comes from per-index substreams of
the master seed, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from . import link, metrics, waveform
from .config import Scenario
from .shaper import ShapingProblem, solve_offset

FLOAT_FMT = "%.12g"


def block_rng(seed: int, index: int) -> np.random.Generator:
    """Deterministic per-block substream, independent of evaluation order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _fmt(v) -> str:
    if isinstance(v, float):
        return FLOAT_FMT % v
    return str(v)


def write_csv(path: str, header: list[str], rows, scenario: Scenario) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(f"# config_hash={scenario.config_hash()} seed={scenario.seed}\n")
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path) as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


@dataclass
class BlockResult:
    index: int
    bits: np.ndarray
    d: np.ndarray
    c: np.ndarray | None       # None when shaping failed or is off
    x_ref: np.ndarray
    x: np.ndarray              # shaped block when available, else x_ref
    shaped: bool


def make_block(scenario: Scenario, index: int) -> BlockResult:
    """Draw one data block and, when enabled, solve the shaping problem."""
    params = scenario.params
    rng = block_rng(scenario.seed, index)
    bits = rng.integers(0, 2, waveform.BITS_PER_SYMBOL * params.D)
    d = waveform.make_data_block(bits, params)
    synth = scenario.synthesis
    x_ref = waveform.transmit_block(d, synth)
    if not scenario.shaping_enabled:
        return BlockResult(index, bits, d, None, x_ref, x_ref, False)
    problem = ShapingProblem(
        Phi_bar=synth.Phi_bar,
        d_bar=d[list(params.data_idx)],
        E_bar=scenario.ematrix.E_bar,
        evm_max=scenario.evm_max,
    )
    sol = solve_offset(problem, scenario.solver_options)
    if not sol.converged:
        return BlockResult(index, bits, d, None, x_ref, x_ref, False)
    c = waveform.expand_offset(sol.c_bar_opt, params)
    return BlockResult(index, bits, d, c, x_ref, waveform.transmit_block(c, synth), True)


# -- RCM / CCDF -------------------------------------------------------------

def run_rcm_ccdf(scenario: Scenario, thresholds: np.ndarray | None = None) -> dict:
    """Per-block RCM of unshaped and shaped signals plus CCDF curves."""
    region = scenario.region
    records = []
    rcm_un, rcm_sh = [], []
    failed = 0
    for b in range(scenario.blocks):
        res = make_block(scenario, b)
        r_un = metrics.rcm(res.x_ref)
        rcm_un.append(r_un)
        if scenario.shaping_enabled and not res.shaped:
            failed += 1
            records.append((b, scenario.label, r_un, float("nan"), float("nan"),
                            float("nan"), "failed"))
            continue
        r_sh = metrics.rcm(res.x) if res.shaped else r_un
        if res.shaped:
            rcm_sh.append(r_sh)
        ev = metrics.evm(res.x, res.x_ref) if res.shaped else 0.0
        osb = metrics.osbee_direct(res.x, region)
        records.append((b, scenario.label, r_un, r_sh, ev, osb,
                        "shaped" if res.shaped else "unshaped"))
    if thresholds is None:
        allv = np.array(rcm_un + rcm_sh)
        thresholds = np.linspace(allv.min() * 0.999, allv.max() * 1.001, 101)
    cc_un = metrics.ccdf(rcm_un, thresholds)
    cc_sh = metrics.ccdf(rcm_sh, thresholds) if rcm_sh else np.full_like(thresholds, np.nan)

    blocks_csv = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_rcm_blocks.csv"),
        ["block_id", "scenario", "rcm_unshaped", "rcm_shaped", "evm", "osbee", "status"],
        records, scenario)
    ccdf_csv = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_rcm_ccdf.csv"),
        ["threshold", "prob_unshaped", "prob_shaped"],
        zip(thresholds.tolist(), cc_un.tolist(), cc_sh.tolist()), scenario)
    return {
        "rcm_unshaped": np.array(rcm_un),
        "rcm_shaped": np.array(rcm_sh),
        "thresholds": np.asarray(thresholds),
        "ccdf_unshaped": cc_un,
        "ccdf_shaped": cc_sh,
        "failed_blocks": failed,
        "blocks_csv": blocks_csv,
        "ccdf_csv": ccdf_csv,
    }


# -- PSD / SEM --------------------------------------------------------------

def psd_grid(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Omega grid centered on the subband and its Hz offsets from center."""
    sem = scenario.sem
    params = scenario.params
    nfft = int(sem["psd_nfft"])
    omega_c = 2.0 * np.pi * (params.eta + params.S / 2.0 - 0.5) / params.N
    omegas = omega_c + np.linspace(-np.pi, np.pi, nfft, endpoint=False)
    freqs = (omegas - omega_c) / (2.0 * np.pi) * sem["sampling_rate_hz"]
    return omegas, freqs


def run_psd(scenario: Scenario) -> dict:
    """Block-averaged PSD, pre- and post-PA, calibrated so the in-band total
    equals the configured transmit power."""
    sem = scenario.sem
    omegas, freqs = psd_grid(scenario)
    blocks = [make_block(scenario, b).x for b in range(scenario.blocks)]
    pre = metrics.psd_average(blocks, omegas)
    stream = waveform.serialize_blocks(blocks)
    distorted = link.pa_apply(stream, scenario.pa)
    n_prime = scenario.params.n_prime
    post_blocks = distorted.reshape(len(blocks), n_prime)
    post = metrics.psd_average(post_blocks, omegas)

    p_tx_mw = 10.0 ** (sem["tx_power_dbm"] / 10.0)
    inband = np.abs(freqs) <= sem["bw_hz"] / 2.0
    pre_mw = pre * (p_tx_mw / pre[inband].sum())
    post_mw = post * (p_tx_mw / post[inband].sum())

    path = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_psd.csv"),
        ["freq_hz", "psd_pre_mw", "psd_post_mw"],
        zip(freqs.tolist(), pre_mw.tolist(), post_mw.tolist()), scenario)
    return {"freqs": freqs, "psd_pre_mw": pre_mw, "psd_post_mw": post_mw, "psd_csv": path}


@dataclass(frozen=True)
class SemMask:
    limit_dbm: float
    measure_bw_hz: float
    grid_hz: float

    @property
    def limit_mw(self) -> float:
        return 10.0 ** (self.limit_dbm / 10.0)


def find_guard_band(freqs: np.ndarray, psd_mw: np.ndarray, mask: SemMask,
                    bw_hz: float) -> float:
    """Smallest guard band (on the mask grid) such that every measurement
    window beyond the subband edge plus the guard stays under the mask."""
    freqs = np.asarray(freqs)
    psd_mw = np.asarray(psd_mw)
    edge = bw_hz / 2.0
    f_max = freqs.max()
    n_steps = int(math.floor((f_max - edge - mask.measure_bw_hz) / mask.grid_hz)) + 1
    if n_steps < 1:
        raise ValueError("PSD grid too narrow for any measurement window")
    for k in range(n_steps):
        delta = k * mask.grid_hz
        ok = True
        for sign in (+1.0, -1.0):
            start = edge + delta
            while start + mask.measure_bw_hz <= f_max + 1e-9:
                lo, hi = sign * start, sign * (start + mask.measure_bw_hz)
                sel = (freqs >= min(lo, hi) - 1e-9) & (freqs < max(lo, hi) - 1e-9)
                if psd_mw[sel].sum() > mask.limit_mw:
                    ok = False
                    break
                start += mask.grid_hz
            if not ok:
                break
        if ok:
            return delta
    raise ValueError("SEM never satisfied within the simulated grid")


# -- BER --------------------------------------------------------------------

def wilson_interval(errors: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    p = errors / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def run_ber(scenario: Scenario) -> dict:
    """Monte-Carlo BER per Eb/N0 point. Per-block Rayleigh fading when a
    channel profile is configured; inter-block interference is carried via
    the convolution tail of the previous block."""
    params = scenario.params
    synth = scenario.synthesis
    rows = []
    curves = []
    block_cache = [make_block(scenario, b) for b in range(scenario.blocks)]
    for ebn0 in scenario.ebn0_db:
        N0 = link.NoiseParams.from_ebn0_db(ebn0, params.Es).N0
        errors = total = 0
        tail = np.zeros(0, dtype=complex)
        for b in range(scenario.blocks):
            res = block_cache[b]
            rng = block_rng(scenario.seed, b).spawn(1)[0]
            noise_rng = np.random.default_rng(
                np.random.SeedSequence(scenario.seed, spawn_key=(b, int(round(ebn0 * 1000)))))
            if scenario.channel_profile is None:
                channel = link.ChannelModel(taps=np.array([1.0 + 0j]))
            else:
                channel = scenario.channel_profile.draw(rng)
                channel.warn_if_exceeds_guard(params)
            x = link.pa_apply(res.x, scenario.pa)
            y_full = np.convolve(x, channel.taps)
            y = y_full[:params.n_prime].copy()
            y[:tail.size] += tail
            tail = y_full[params.n_prime:]
            if N0 > 0:
                y = y + np.sqrt(N0 / 2.0) * (
                    noise_rng.standard_normal(y.size)
                    + 1j * noise_rng.standard_normal(y.size))
            r = link.receive_block(y, params)
            H = link.channel_freq_response(channel, params)
            P_data = synth.P[:, list(params.data_idx)]
            Q = link.mmse_matrix(H, P_data, N0, params.Es)
            _, rx_bits = link.equalize_and_demap(r, Q, params.Es)
            e, t, _ = link.ber_count(res.bits, rx_bits)
            errors += e
            total += t
        ber = errors / total
        lo, hi = wilson_interval(errors, total)
        rows.append((ebn0, errors, total, ber, lo, hi))
        curves.append((ebn0, ber))
    path = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_ber.csv"),
        ["ebn0_db", "errors", "bits", "ber", "ci_lo", "ci_hi"],
        rows, scenario)
    return {"rows": rows, "ber_csv": path}


# -- spectral efficiency ----------------------------------------------------

def run_se(scenario: Scenario, ber_rows, delta_hz: float) -> dict:
    """SE per Eb/N0 point from a completed BER run and a guard-band value."""
    if not ber_rows:
        raise ValueError("run_ber output required")
    sem = scenario.sem
    params = scenario.params
    n_blocks = 15 if params.G == 0 else 14
    rows = []
    for ebn0, _, _, ber, _, _ in ber_rows:
        se = metrics.spectral_efficiency(
            waveform.BITS_PER_SYMBOL, params.D, n_blocks, ber,
            sem["tti_s"], sem["bw_hz"], delta_hz)
        rows.append((ebn0, ber, delta_hz, se))
    path = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_se.csv"),
        ["ebn0_db", "ber", "delta_hz", "se_bit_s_hz"],
        rows, scenario)
    return {"rows": rows, "se_csv": path}


# -- scatter ----------------------------------------------------------------

def export_scatter(scenario: Scenario) -> dict:
    """Re/Im of every optimized offset data symbol across blocks."""
    if not scenario.shaping_enabled:
        raise ValueError("scatter export requires shaping to be enabled")
    rows = []
    for b in range(scenario.blocks):
        res = make_block(scenario, b)
        if not res.shaped:
            continue
        c_bar = res.c[list(scenario.params.data_idx)]
        for pos, v in zip(scenario.params.data_idx, c_bar):
            rows.append((b, pos, float(v.real), float(v.imag),
                         scenario.evm_max_db, scenario.label))
    path = write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_scatter.csv"),
        ["block_id", "data_pos", "re", "im", "evm_max_db", "scenario"],
        rows, scenario)
    return {"rows": rows, "scatter_csv": path}
