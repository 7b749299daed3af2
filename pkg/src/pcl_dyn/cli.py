"""Command line entry point.

Commands: decompose, evolve, compare, scan-L, preset.  All physics
parameters come from a flat key = value config file; see the README for
the schema.  Outputs are deterministic: the same config yields
byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import copy
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from pcl_dyn import config as cfgmod
from pcl_dyn.bath import (
    correlation_fdt,
    reconstruct,
    spectrum_to_text,
    validate_spectrum,
)
from pcl_dyn.errors import ConfigError, DivergenceError, PclDynError
from pcl_dyn.integrator import evolve, tier_convergence_scan
from pcl_dyn.observables import CSV_HEADER

PRESETS = {
    "fig2": {
        "system": {"epsilon_s": 1.0, "alpha": 1.0},
        "coupling": {"lambda": 0.5, "sign_convention": "even"},
        "bath": {"kind": "drude", "xi": 1.0, "gamma_c": 1.0,
                 "temperature": 2.0, "K": 2, "decomposition": "matsubara"},
        "propagation": {"L": 6, "dt": 0.001, "t_final": 50.0,
                        "output_stride": 10, "initial": "ground"},
        "output": {"prefix": "fig2"},
    },
    "fig3": {
        "system": {"epsilon_s": 1.0, "alpha": 2.0},
        "coupling": {"lambda": 0.5, "sign_convention": "even"},
        "bath": {"kind": "drude", "xi": 1.0, "gamma_c": 1.0,
                 "temperature": 2.0, "K": 2, "decomposition": "matsubara"},
        "propagation": {"L": 6, "dt": 0.001, "t_final": 50.0,
                        "output_stride": 10, "initial": "ground"},
        "sweep": {"parameter": "coupling.lambda", "values": [0.5, 1.0, 2.0]},
        "output": {"prefix": "fig3"},
    },
    "fig4": {
        "system": {"epsilon_s": 1.0, "alpha": 0.5},
        "coupling": {"lambda": 0.5, "sign_convention": "even"},
        "bath": {"kind": "drude", "xi": 1.0, "gamma_c": 1.0,
                 "temperature": 2.0, "K": 2, "decomposition": "matsubara"},
        "propagation": {"L": 6, "dt": 0.001, "t_final": 50.0,
                        "output_stride": 10, "initial": "ground"},
        "sweep": {"parameter": "system.alpha", "values": [0.5, 1.0, 1.5, 2.0]},
        "output": {"prefix": "fig4"},
    },
}


def _worker_count() -> int:
    env = os.environ.get("PCL_DYN_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _set_dotted(cfg: dict, dotted: str, value) -> None:
    node = cfg
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value


def _run_one(cfg: dict, which: str, tag: str):
    model = cfgmod.model_from_config(cfg)
    _, spectrum = cfgmod.spectrum_from_config(cfg)
    prop = cfg.get("propagation", {})
    convention = cfg.get("coupling", {}).get("sign_convention", "even")
    t0 = time.perf_counter()
    result = evolve(
        model, spectrum,
        L=int(prop.get("L", 6)),
        dt=float(prop.get("dt", 1e-3)),
        t_final=float(prop.get("t_final", 50.0)),
        which=which,
        convention=convention,
        rho0=cfgmod.initial_state_from_config(cfg),
        output_stride=int(prop.get("output_stride", 10)),
        meta={"tag": tag},
    )
    elapsed = time.perf_counter() - t0
    return result, elapsed


def _write_manifest(path: Path, cfg: dict, entries: list) -> None:
    lines = ["# run manifest", "", "[config]"]
    lines.append(cfgmod.format_config(cfg).rstrip())
    convention = cfg.get("coupling", {}).get("sign_convention", "even")
    if convention == "odd-paper-literal":
        lines.append("")
        lines.append("WARNING: odd-paper-literal sign convention selected; "
                     "this variant vanishes at lambda -> 0 and is retained "
                     "for comparison only.")
    lines.append("")
    lines.append("[runs]")
    for tag, result, elapsed in entries:
        table = result.table
        lines.append(f"{tag}.model = {table.model}")
        lines.append(f"{tag}.g = {table.g!r}")
        lines.append(f"{tag}.indices = {len(table.space)}")
        lines.append(f"{tag}.nonzero_left = {int(np.count_nonzero(table.a_left))}")
        lines.append(f"{tag}.seconds = {elapsed:.3f}")
    path.write_text("\n".join(lines) + "\n")


def cmd_preset(args) -> int:
    if args.name not in PRESETS:
        raise ConfigError(f"unknown preset {args.name!r}; choose from {sorted(PRESETS)}")
    out = _out_dir(args)
    path = out / f"{args.name}.toml"
    path.write_text(cfgmod.format_config(PRESETS[args.name]))
    print(path)
    return 0


def cmd_decompose(args) -> int:
    cfg = cfgmod.load_config(args.config)
    sd, spectrum = cfgmod.spectrum_from_config(cfg)
    report = validate_spectrum(spectrum)
    out = _out_dir(args)
    prefix = cfg.get("output", {}).get("prefix", "run")
    (out / f"{prefix}_spectrum.txt").write_text(spectrum_to_text(spectrum))
    lines = [f"K = {spectrum.K}", f"eta_sum = {report.eta_sum!r}"]
    if sd.kind == "drude":
        beta = spectrum.beta
        grid = np.geomspace(0.1 / sd.gamma_c, 10.0 / sd.gamma_c, 20)
        quad_vals = np.array([correlation_fdt(sd, beta, t) for t in grid])
        rec = reconstruct(spectrum, grid)
        rel = np.max(np.abs(rec - quad_vals)) / np.max(np.abs(quad_vals))
        lines.append(f"reconstruction_max_rel_error = {rel:.6e}")
    (out / f"{prefix}_reconstruction.txt").write_text("\n".join(lines) + "\n")
    print(out / f"{prefix}_spectrum.txt")
    return 0


def _sweep_members(cfg: dict):
    """Expand a sweep section into (tag_suffix, member config) pairs."""
    sweep = cfg.get("sweep")
    if not sweep:
        return [("", cfg)]
    param = sweep["parameter"]
    values = sweep["values"]
    if not isinstance(values, (list, tuple)):
        values = [values]
    short = param.split(".")[-1]
    members = []
    for v in values:
        member = copy.deepcopy(cfg)
        member.pop("sweep", None)
        _set_dotted(member, param, v)
        members.append((f"_{short}{v:g}" if isinstance(v, float) else f"_{short}{v}", member))
    return members


def cmd_evolve(args) -> int:
    cfg = cfgmod.load_config(args.config)
    out = _out_dir(args)
    prefix = cfg.get("output", {}).get("prefix", "run")
    models = [args.model] if args.model else ["pcl", "cl"]
    jobs = [(suffix, member, which)
            for suffix, member in _sweep_members(cfg)
            for which in models]
    entries = []
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        futures = [(suffix, which, pool.submit(_run_one, member, which, f"{prefix}{suffix}_{which}"))
                   for suffix, member, which in jobs]
        for suffix, which, fut in futures:
            result, elapsed = fut.result()
            tag = f"{prefix}{suffix}_{which}"
            result.trajectory.to_csv(out / f"{tag}.csv")
            entries.append((tag, result, elapsed))
    _write_manifest(out / f"{prefix}_manifest.txt", cfg, entries)
    for tag, _, _ in entries:
        print(out / f"{tag}.csv")
    return 0


def cmd_compare(args) -> int:
    cfg = cfgmod.load_config(args.config)
    if "sweep" in cfg:
        raise ConfigError("compare does not accept sweep configs")
    out = _out_dir(args)
    prefix = cfg.get("output", {}).get("prefix", "run")
    res_pcl, el_p = _run_one(cfg, "pcl", f"{prefix}_pcl")
    res_cl, el_c = _run_one(cfg, "cl", f"{prefix}_cl")
    tp, tc = res_pcl.trajectory, res_cl.trajectory
    if len(tp.t) != len(tc.t) or np.any(tp.t != tc.t):
        raise ConfigError("PCL and CL time grids do not match")
    cols = CSV_HEADER.split(",")[1:]
    header = "t," + ",".join(f"pcl_{c}" for c in cols) + "," + ",".join(f"cl_{c}" for c in cols)
    lines = [header]
    series = [tp.t] + [getattr(tp, c) for c in cols] + [getattr(tc, c) for c in cols]
    for i in range(len(tp.t)):
        lines.append(",".join(f"{s[i]:.12g}" for s in series))
    path = out / f"{prefix}_compare.csv"
    path.write_text("\n".join(lines) + "\n")
    _write_manifest(out / f"{prefix}_manifest.txt", cfg,
                    [(f"{prefix}_pcl", res_pcl, el_p), (f"{prefix}_cl", res_cl, el_c)])
    print(path)
    return 0


def cmd_scan_l(args) -> int:
    cfg = cfgmod.load_config(args.config)
    levels = [int(v) for v in args.levels.split(",")]
    model = cfgmod.model_from_config(cfg)
    _, spectrum = cfgmod.spectrum_from_config(cfg)
    prop = cfg.get("propagation", {})
    which = args.model or "pcl"
    _, deviations = tier_convergence_scan(
        model, spectrum, levels,
        dt=float(prop.get("dt", 1e-3)),
        t_final=float(prop.get("t_final", 50.0)),
        which=which,
        convention=cfg.get("coupling", {}).get("sign_convention", "even"),
        rho0=cfgmod.initial_state_from_config(cfg),
    )
    out = _out_dir(args)
    prefix = cfg.get("output", {}).get("prefix", "run")
    lines = ["L_low,L_high,max_bloch_deviation"]
    for (a, b), dev in deviations:
        lines.append(f"{a},{b},{dev:.12g}")
    path = out / f"{prefix}_scanL.txt"
    path.write_text("\n".join(lines) + "\n")
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcl-dyn",
        description="Non-Markovian dynamics for phase-coupled and linear bath coupling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="write a benchmark config file")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("decompose", help="decompose the bath and report reconstruction error")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("evolve", help="propagate and write trajectory CSVs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--model", choices=["pcl", "cl"])
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("compare", help="joint PCL/CL CSV on a shared time grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("scan-L", help="truncation-level convergence scan")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", required=True, help="comma list, e.g. 2,4,6,8")
    p.add_argument("--out", default=".")
    p.add_argument("--model", choices=["pcl", "cl"])
    p.set_defaults(func=cmd_scan_l)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3
    except PclDynError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
