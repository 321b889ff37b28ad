"""Scenario configuration: JSON schema binding waveform, prototype, shaping,
channel, PA, noise, and SEM settings into one reproducible run description."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import link, waveform
from .ematrix import EMatrix, build_E_matrix
from .metrics import OsbRegion
from .shaper import SolverOptions, evm_db_to_linear
from .waveform import SynthesisMatrix, WaveformParams

PAPER_OSB_SUBCARRIERS = tuple(range(0, 24)) + tuple(range(80, 128))

DEFAULT_SEM = {
    "tx_power_dbm": 22.0,
    "limit_dbm": -10.0,
    "measure_bw_hz": 30000.0,
    "grid_hz": 15000.0,
    "sampling_rate_hz": 1920000.0,
    "bw_hz": 720000.0,
    "tti_s": 0.001,
    "psd_nfft": 2048,
}


@dataclass
class Scenario:
    """A fully specified experiment: everything a subcommand needs, derived
    from one config mapping plus CLI overrides."""

    config: dict
    label: str
    seed: int
    blocks: int
    out_dir: str

    @classmethod
    def from_config(cls, config: dict, seed: int | None = None,
                    blocks: int | None = None, out_dir: str | None = None) -> "Scenario":
        cfg = dict(config)
        return cls(
            config=cfg,
            label=cfg.get("label", "scenario"),
            seed=int(seed if seed is not None else cfg.get("seed", 0)),
            blocks=int(blocks if blocks is not None else cfg.get("blocks", 1000)),
            out_dir=out_dir if out_dir is not None else cfg.get("out_dir", "out"),
        )

    @classmethod
    def from_file(cls, path: str, **overrides) -> "Scenario":
        with open(path) as f:
            return cls.from_config(json.load(f), **overrides)

    def config_hash(self) -> str:
        canon = json.dumps(self.config, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    # -- waveform -----------------------------------------------------------

    @cached_property
    def params(self) -> WaveformParams:
        wf = self.config.get("waveform", "cps_cp")
        if isinstance(wf, str):
            if wf == "cps_cp":
                return waveform.paper_params("cp")
            if wf == "cps_nogi":
                return waveform.paper_params("nogi")
            if wf == "ofdm":
                return waveform.ofdm_params()
            raise ValueError(f"unknown waveform preset {wf!r}")
        return WaveformParams(
            N=wf["N"], G=wf["G"], gi_mode=wf["gi_mode"], S=wf["S"],
            K=wf["K"], M=wf["M"], eta=wf["eta"],
            data_idx=tuple(wf["data_idx"]),
            constellation=wf.get("constellation", "16qam"),
            Es=wf.get("Es", 1.0),
        )

    @cached_property
    def prototype(self) -> np.ndarray:
        spec = self.config.get("prototype", "tapered")
        wf = self.config.get("waveform", "cps_cp")
        if isinstance(wf, str) and wf == "ofdm":
            spec = self.config.get("prototype", "identity")
        if isinstance(spec, dict):
            return waveform.load_prototype(spec["file"])
        if spec == "tapered":
            return waveform.tapered_prototype(self.params.S)
        if spec == "constant":
            return waveform.constant_prototype(self.params.S)
        if spec == "identity":
            return waveform.identity_prototype(self.params.S)
        raise ValueError(f"unknown prototype {spec!r}")

    @cached_property
    def synthesis(self) -> SynthesisMatrix:
        P = waveform.build_precoder(self.prototype, self.params.K, self.params.M)
        return waveform.build_synthesis(P, self.params)

    @cached_property
    def region(self) -> OsbRegion:
        idx = self.config.get("osb_subcarriers", list(PAPER_OSB_SUBCARRIERS))
        return OsbRegion.from_subcarriers(idx, self.params.N)

    @cached_property
    def ematrix(self) -> EMatrix:
        oversample = int(self.config.get("osb_oversample", 16))
        return build_E_matrix(self.prototype, self.params, self.region, oversample)

    # -- shaping ------------------------------------------------------------

    @property
    def shaping_enabled(self) -> bool:
        return bool(self.config.get("shaping", {}).get("enabled", False))

    @property
    def evm_max_db(self) -> float:
        return float(self.config.get("shaping", {}).get("evm_max_db", -10.0))

    @property
    def evm_max(self) -> float:
        return evm_db_to_linear(self.evm_max_db)

    @property
    def solver_options(self) -> SolverOptions:
        s = self.config.get("shaping", {}).get("solver", {})
        return SolverOptions(
            tol=float(s.get("tol", 1e-7)),
            max_outer=int(s.get("max_outer", 60)),
            max_inner=int(s.get("max_inner", 50)),
            mu=float(s.get("mu", 10.0)),
        )

    # -- link ---------------------------------------------------------------

    @cached_property
    def channel_profile(self) -> link.ChannelProfile | None:
        """None means the identity channel."""
        ch = self.config.get("channel", "identity")
        if ch == "identity":
            return None
        if ch == "tdl_default":
            return link.default_tdl_profile()
        return link.ChannelProfile(delays=tuple(ch["delays"]),
                                   powers_db=tuple(ch["powers_db"]))

    @cached_property
    def pa(self) -> link.PaModel:
        pa = self.config.get("pa", {})
        coeffs = ()
        if "coeffs_file" in pa:
            coeffs = link.load_pa_coeffs(pa["coeffs_file"])
        elif "coeffs" in pa:
            coeffs = tuple(complex(re, im) for re, im in pa["coeffs"])
        return link.PaModel(
            kind=pa.get("kind", "ideal"),
            ibo_db=float(pa.get("ibo_db", 0.0)),
            phase_comp_deg=float(pa.get("phase_comp_deg", 76.3)),
            smoothness=float(pa.get("smoothness", 2.0)),
            sat_amplitude=float(pa.get("sat_amplitude", 1.0)),
            coeffs=coeffs,
        )

    @property
    def ebn0_db(self) -> list[float]:
        return [float(v) for v in self.config.get("ebn0_db", [0, 2, 4, 6, 8, 10, 12, 14])]

    @property
    def sem(self) -> dict:
        return {**DEFAULT_SEM, **self.config.get("sem", {})}
