"""Batch entry point: simulate / verify / sweep / report.

Exit codes: 0 success, 1 calibrated check failure, 2 config error,
3 runtime error. Relative output directories resolve under
$BOUSLP_OUTPUT_ROOT when that variable is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from bouslp.config import ConfigError, RunConfig, load_config, parse_config
from bouslp.harness.checks import CHECKS, EnergySeriesObserver, run_checks
from bouslp.harness.records import (
    summary_dict,
    write_records_csv,
    write_summary_json,
)
from bouslp.snapshots import write_snapshot
from bouslp.solver import simulate


def output_dir(config: RunConfig) -> Path:
    out = Path(config.output)
    root = os.environ.get("BOUSLP_OUTPUT_ROOT", "")
    if root and not out.is_absolute():
        out = Path(root) / out
    return out


def load_calibration() -> dict:
    try:
        text = resources.files("bouslp").joinpath("data/calibration.json").read_text()
    except FileNotFoundError:
        return {}
    return json.loads(text).get("checks", {})


def bundled_reference_config_path() -> Path:
    return Path(str(resources.files("bouslp").joinpath("data/reference_verify.json")))


def _run_trajectory(config: RunConfig, check_ids):
    omega0, rho0 = config.initial_fields()
    observers = []
    energy_obs = None
    if check_ids and "density_energy" in check_ids:
        energy_obs = EnergySeriesObserver(omega0, rho0)
        observers.append(energy_obs)
    traj = simulate(
        omega0, rho0, config.solver_config(), stride=config.stride,
        observers=observers,
    )
    return traj, (energy_obs.series() if energy_obs else None)


def cmd_simulate(config: RunConfig) -> int:
    out = output_dir(config)
    snap_dir = out / "snapshots"
    chash = config.config_hash()
    traj, _ = _run_trajectory(config, check_ids=None)
    for idx, state in enumerate(traj.states):
        write_snapshot(snap_dir / f"omega_{idx:05d}", state.omega, "omega",
                       state.t, chash)
        write_snapshot(snap_dir / f"rho_{idx:05d}", state.rho, "rho",
                       state.t, chash)
    summary = {
        "command": "simulate",
        "config_hash": chash,
        "seed": config.seed,
        "samples": len(traj.states),
        "t_final": traj.states[-1].t,
        "snapshot_dir": str(snap_dir),
    }
    write_summary_json(out / "summary.json", summary)
    print(f"simulate: {len(traj.states)} snapshots -> {snap_dir}")
    return 0


def _verify_one(config: RunConfig, csv_name: str, summary_name: str) -> tuple[int, dict]:
    out = output_dir(config)
    chash = config.config_hash()
    check_ids = config.checks if config.checks is not None else list(CHECKS)
    traj, energy_series = _run_trajectory(config, check_ids)
    meta = {
        "grid_n": config.grid_n,
        "kappa": config.solver["kappa"],
        "gamma_name": config.gamma_name,
        "p0": config.p0,
        "p1": config.p1,
        "seed": config.seed,
    }
    records = run_checks(
        check_ids, traj, config.family(), config.gamma_spec(),
        p0=config.p0, p1=config.p1, meta=meta, energy_series=energy_series,
    )
    write_records_csv(out / csv_name, records, config_hash=chash)
    from bouslp.gamma import validate_gamma

    summary = summary_dict(records, calibration=load_calibration())
    summary["gamma_validation"] = validate_gamma(config.gamma_spec()).to_dict()
    summary.update({
        "command": "verify", "config_hash": chash, "seed": config.seed,
        "kappa": config.solver["kappa"], "grid_n": config.grid_n,
        "gamma_name": config.gamma_name, "csv": csv_name,
        "j_max": config.family().j_max,
    })
    write_summary_json(out / summary_name, summary)
    return (0 if summary["all_passed"] else 1), summary


def cmd_verify(config: RunConfig) -> int:
    code, summary = _verify_one(config, "estimates.csv", "summary.json")
    for cid, entry in sorted(summary["checks"].items()):
        status = entry.get("passed")
        tag = "pass" if status else ("FAIL" if status is not None else "n/a ")
        print(f"  [{tag}] {cid}: sup ratio {entry['empirical_constant']:.6g}")
    print(f"verify: all_passed={summary['all_passed']} -> {output_dir(config)}")
    return code


def _value_slug(value) -> str:
    return str(value).replace(".", "p").replace("-", "m")


def _sweep_worker(payload: str) -> tuple[str, int, dict]:
    doc = json.loads(payload)
    config = parse_config(doc["config"])
    code, summary = _verify_one(config, doc["csv_name"], doc["summary_name"])
    return doc["label"], code, summary


def cmd_sweep(config: RunConfig, workers: int = 1) -> int:
    parameter = config.sweep["parameter"]
    values = config.sweep["values"]
    jobs = []
    for value in values:
        derived = config.with_override(parameter, value)
        label = f"{parameter.split('.')[-1]}_{_value_slug(value)}"
        jobs.append(json.dumps({
            "config": derived.to_dict(),
            "csv_name": f"estimates_{label}.csv",
            "summary_name": f"summary_{label}.json",
            "label": label,
        }))

    results = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]

    overall = 0
    index = {"command": "sweep", "parameter": parameter, "values": values,
             "config_hash": config.config_hash(), "runs": {}}
    for label, code, summary in results:
        overall = max(overall, code)
        index["runs"][label] = {
            "all_passed": summary["all_passed"],
            "csv": summary["csv"],
        }
        print(f"  sweep {label}: all_passed={summary['all_passed']}")
    write_summary_json(output_dir(config) / "sweep_summary.json", index)
    return overall


def cmd_report(input_dir: str, out_dir: str | None) -> int:
    input_path = Path(input_dir)
    try:
        import bouslp_report  # the optional renderer package
    except ImportError:
        bouslp_report = None

    if bouslp_report is not None and out_dir is not None:
        index = bouslp_report.render_report(str(input_path), str(out_dir))
        print(f"report: rendered -> {index}")
        return 0

    summaries = sorted(input_path.glob("**/summary*.json"))
    if not summaries:
        print(f"report: no summaries under {input_path}")
        return 0
    for path in summaries:
        doc = json.loads(path.read_text())
        if "checks" not in doc:
            continue
        print(f"{path}:")
        header = f"  {'check':<28} {'sup ratio':>12} {'calibrated':>12} {'status':>8}"
        print(header)
        for cid, entry in sorted(doc["checks"].items()):
            cal = entry.get("calibrated_constant", "")
            status = entry.get("passed")
            tag = "pass" if status else ("FAIL" if status is not None else "-")
            cal_txt = f"{cal:.6g}" if cal != "" else "-"
            print(f"  {cid:<28} {entry['empirical_constant']:>12.6g} "
                  f"{cal_txt:>12} {tag:>8}")
    return 0


def dispatch(config: RunConfig, workers: int = 1) -> int:
    if config.command == "simulate":
        return cmd_simulate(config)
    if config.command == "verify":
        return cmd_verify(config)
    if config.command == "sweep":
        return cmd_sweep(config, workers=workers)
    raise ConfigError(f"dispatch cannot run command {config.command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bouslp",
        description="Boussinesq solver and estimate-verification harness",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in ("simulate", "verify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("report")
    p.add_argument("--input", required=True, help="directory with harness outputs")
    p.add_argument("--out", default=None, help="figure output directory")
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "report":
            return cmd_report(args.input, args.out)
        config = load_config(args.config)
        if config.command != args.subcommand:
            raise ConfigError(
                f"config command {config.command!r} does not match "
                f"subcommand {args.subcommand!r}"
            )
        return dispatch(config, workers=args.workers)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError, ValueError) as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
