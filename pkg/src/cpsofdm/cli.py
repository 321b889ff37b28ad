"""Command-line harness: scenario runs and single-block utilities.

Subcommands: rcm-ccdf, psd, ber, se, scatter, solve-one, export-matrices.
All take --config (JSON scenario file) plus optional --seed / --blocks /
--out-dir overrides; any module error exits nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness, waveform
from .config import Scenario
from .ematrix import ematrix_cache_key, save_ematrix
from .shaper import ShapingProblem, solve_offset


def _scenario(args) -> Scenario:
    return Scenario.from_file(args.config, seed=args.seed, blocks=args.blocks,
                              out_dir=args.out_dir)


def cmd_rcm_ccdf(args) -> int:
    out = harness.run_rcm_ccdf(_scenario(args))
    print(out["blocks_csv"])
    print(out["ccdf_csv"])
    if out["failed_blocks"]:
        print(f"warning: {out['failed_blocks']} blocks excluded (solver failed)",
              file=sys.stderr)
    return 0


def cmd_psd(args) -> int:
    out = harness.run_psd(_scenario(args))
    print(out["psd_csv"])
    return 0


def cmd_ber(args) -> int:
    out = harness.run_ber(_scenario(args))
    print(out["ber_csv"])
    return 0


def cmd_se(args) -> int:
    scenario = _scenario(args)
    header, rows = harness.read_csv(args.ber_csv)
    idx = {name: i for i, name in enumerate(header)}
    ber_rows = [(float(r[idx["ebn0_db"]]), int(r[idx["errors"]]), int(r[idx["bits"]]),
                 float(r[idx["ber"]]), float(r[idx["ci_lo"]]), float(r[idx["ci_hi"]]))
                for r in rows]
    if args.delta_hz is not None:
        delta = args.delta_hz
    elif args.psd_csv:
        h, prows = harness.read_csv(args.psd_csv)
        pidx = {name: i for i, name in enumerate(h)}
        freqs = np.array([float(r[pidx["freq_hz"]]) for r in prows])
        psd = np.array([float(r[pidx["psd_post_mw"]]) for r in prows])
        sem = scenario.sem
        mask = harness.SemMask(limit_dbm=sem["limit_dbm"],
                               measure_bw_hz=sem["measure_bw_hz"],
                               grid_hz=sem["grid_hz"])
        delta = harness.find_guard_band(freqs, psd, mask, sem["bw_hz"])
    else:
        print("error: se requires --delta-hz or --psd-csv", file=sys.stderr)
        return 2
    out = harness.run_se(scenario, ber_rows, delta)
    print(out["se_csv"])
    return 0


def cmd_scatter(args) -> int:
    out = harness.export_scatter(_scenario(args))
    print(out["scatter_csv"])
    return 0


def cmd_solve_one(args) -> int:
    scenario = _scenario(args)
    params = scenario.params
    res = harness.make_block(scenario, args.block)
    problem = ShapingProblem(
        Phi_bar=scenario.synthesis.Phi_bar,
        d_bar=res.d[list(params.data_idx)],
        E_bar=scenario.ematrix.E_bar,
        evm_max=scenario.evm_max,
    )
    sol = solve_offset(problem, scenario.solver_options)
    rows = [(i, float(v.real), float(v.imag))
            for i, v in zip(params.data_idx, sol.c_bar_opt)]
    path = harness.write_csv(
        os.path.join(scenario.out_dir, f"{scenario.label}_solution.csv"),
        ["data_pos", "re", "im"], rows, scenario)
    print(path)
    report = {
        "objective_6norm": sol.objective,
        "converged": sol.converged,
        "newton_iterations": sol.iterations,
        "objective_trace": sol.objective_trace,
        "residuals": {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                      for k, v in sol.residuals.items()},
    }
    rpath = os.path.join(scenario.out_dir, f"{scenario.label}_solution_report.json")
    with open(rpath, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    print(rpath)
    return 0 if sol.converged else 1


def cmd_export_matrices(args) -> int:
    scenario = _scenario(args)
    os.makedirs(scenario.out_dir, exist_ok=True)
    phi_path = os.path.join(scenario.out_dir, f"{scenario.label}_phi.npy")
    np.save(phi_path, scenario.synthesis.Phi)
    key = ematrix_cache_key(scenario.prototype, scenario.params,
                            scenario.region, scenario.ematrix.oversample)
    e_path = os.path.join(scenario.out_dir, f"ematrix_{key}.bin")
    save_ematrix(e_path, scenario.ematrix)
    print(phi_path)
    print(e_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpsofdm",
                                     description="CPS-OFDM shaping simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--blocks", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.set_defaults(fn=fn)
        return p

    add("rcm-ccdf", cmd_rcm_ccdf)
    add("psd", cmd_psd)
    add("ber", cmd_ber)
    p_se = add("se", cmd_se)
    p_se.add_argument("--ber-csv", required=True)
    p_se.add_argument("--psd-csv", default=None)
    p_se.add_argument("--delta-hz", type=float, default=None)
    add("scatter", cmd_scatter)
    p_solve = add("solve-one", cmd_solve_one)
    p_solve.add_argument("--block", type=int, default=0)
    add("export-matrices", cmd_export_matrices)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
