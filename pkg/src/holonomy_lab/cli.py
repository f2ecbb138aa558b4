"""
Command line scenario runner.

Subcommands
-----------
classify      lift the eigen-director cycle and report the permutation
simulate      run the time evolution and report the final verdict
sweep         repeat a run over a grid of epsilon, window rate or sample count
spectrum      write (lambda, E1, E2) for the configured model
print-config  dump the effective configuration

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import dynamics, lift, models
from .bloch import eigvec_from_bloch
from .errors import ConfigError, HolonomyError, NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
THREADS_ENV = "HOLONOMY_LAB_THREADS"


# ---------------------------------------------------------------- output


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.16e}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def write_table(path: Path, columns, rows, cfg_hash: str, fmt_kind: str) -> Path:
    path = path.with_suffix("." + fmt_kind)
    if fmt_kind == "csv":
        lines = [f"# config_sha256={cfg_hash}", ",".join(columns)]
        lines += [",".join(fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        doc = {"config_sha256": cfg_hash, "columns": list(columns),
               "rows": [[_jsonable(v) for v in row] for row in rows]}
        path.write_text(json.dumps(doc, indent=1) + "\n")
    return path


def write_report(path: Path, report: dict, cfg_hash: str, fmt_kind: str) -> Path:
    keys = list(report)
    return write_table(path, keys, [[report[k] for k in keys]], cfg_hash, fmt_kind)


# ---------------------------------------------------------------- commands


def _closed_range(cfg, model):
    lo, hi = cfgmod.lambda_range(cfg)
    if not models.is_closed_range(model, lo, hi):
        raise ConfigError("classify needs cycle.periods to be a whole number of periods")
    return lo, hi


def classify_report(cfg: dict, samples: int | None = None):
    """Run the lift classification; returns ``(report, path, result)``."""
    model = cfgmod.build_model(cfg)
    lo, hi = _closed_range(cfg, model)
    n = samples or cfg["cycle"]["samples"]
    path = models.director_path(model, lo, hi, n)
    a0 = models.branch_bloch(model, lo, cfg["initial_branch"])
    result = lift.holonomy(path, a0)
    trials = cfg["robustness"]["trials"]
    agree = 0
    if trials:
        rng = np.random.default_rng(cfg["seed"])
        for _ in range(trials):
            moved = lift.perturb_path(path, rng, cfg["robustness"]["amplitude"])
            start = moved.vectors[0] if moved.vectors[0] @ a0 >= 0 else -moved.vectors[0]
            agree += lift.holonomy(moved, start).permutation is result.permutation
    report = {
        "model": model.kind,
        "permutation": result.permutation.value,
        "homotopy_class": result.homotopy_class.value,
        "endpoint_defect": result.endpoint_defect,
        "closure_residual": result.closure_residual,
        "min_overlap": result.min_overlap,
        "samples": result.n_samples,
        "robustness_trials": trials,
        "robustness_agree": agree,
    }
    return report, path, result


def cmd_classify(cfg: dict, out: Path, emit_path: bool = False) -> int:
    h = cfgmod.config_hash(cfg)
    report, path, result = classify_report(cfg)
    write_report(out / "classify", report, h, cfg["output"]["format"])
    if emit_path:
        rows = [(p, *v) for p, v in zip(path.params, path.vectors)]
        write_table(out / "director_path", ["lambda", "n_x", "n_y", "n_z"], rows, h, cfg["output"]["format"])
        rows = [(p, *v) for p, v in zip(result.lifted.params, result.lifted.samples)]
        write_table(out / "lifted_path", ["lambda", "a_x", "a_y", "a_z"], rows, h, cfg["output"]["format"])
    print(f"{report['permutation']} / {report['homotopy_class']} "
          f"(defect {report['endpoint_defect']:.3g}, {report['samples']} samples)")
    return EXIT_OK


def simulate_run(cfg: dict):
    """Run the configured evolution.

    Returns ``(record, summary, extra)`` where ``extra`` maps additional
    per-sample column names to arrays.
    """
    model = cfgmod.build_model(cfg)
    lo, hi = cfgmod.lambda_range(cfg)
    a0 = models.branch_bloch(model, lo, cfg["initial_branch"])
    psi0 = eigvec_from_bloch(a0)
    s = cfg["schedule"]
    summary = {"model": model.kind}
    extra = {}
    if model.kind == "floquet_map":
        record = dynamics.evolve_kicked(model, dynamics.kicked_sequence(s["kicks"], lo, hi), psi0)
        threshold = dynamics.ADIABATIC_THRESHOLD
        summary["schedule"] = "kicked"
        summary["steps"] = s["kicks"]
    else:
        schedule = cfgmod.build_schedule(cfg)
        record = dynamics.evolve_continuous(model, schedule, psi0, s["dt"])
        diabatic = schedule.kind == "diabatic_window"
        threshold = dynamics.DIABATIC_THRESHOLD if diabatic else dynamics.ADIABATIC_THRESHOLD
        summary["schedule"] = schedule.kind
        summary["steps"] = len(record.times) - 1
        summary["window_rate"] = schedule.rate_at(math.pi)
        if model.kind == "perturbed":
            rate = schedule.rate_at(math.pi)
            summary["lz_estimate"] = dynamics.landau_zener_probability(model.epsilon, rate)
            summary["co_rotating_estimate"] = dynamics.co_rotating_lz_probability(model.epsilon, rate)
            branch = dynamics.unperturbed_reference(record.params, a0)
            extra["unperturbed_fidelity"] = dynamics.fidelity_trace(record, branch)
            summary["unperturbed_branch_fidelity"] = float(extra["unperturbed_fidelity"][-1])
    verdict = dynamics.judge(record.final_state, models.branch_bloch(model, hi, cfg["initial_branch"]), threshold)
    label = verdict.verdict
    if label == "swap" and summary["schedule"] == "diabatic_window":
        label = "swap (diabatic)"
    summary.update({
        "verdict": label,
        "threshold": threshold,
        "fidelity_same": verdict.fidelity_same,
        "fidelity_opposite": verdict.fidelity_opposite,
        "continued_fidelity_final": float(record.projector_fidelities[-1]),
        "continued_fidelity_min": float(np.min(record.projector_fidelities)),
        "norm_drift": record.norm_drift(),
    })
    return record, summary, extra


def cmd_simulate(cfg: dict, out: Path) -> int:
    h = cfgmod.config_hash(cfg)
    record, summary, extra = simulate_run(cfg)
    stride = cfg["output"]["stride"]
    idx = np.arange(0, len(record.times), stride)
    if idx[-1] != len(record.times) - 1:
        idx = np.append(idx, len(record.times) - 1)
    columns = ["t", "lambda", "psi1_re", "psi1_im", "psi2_re", "psi2_im", "fidelity", *extra]
    rows = []
    for k in idx:
        psi = record.states[k]
        row = [record.times[k], record.params[k], psi[0].real, psi[0].imag, psi[1].real, psi[1].imag,
               record.projector_fidelities[k]]
        row += [col[k] for col in extra.values()]
        rows.append(row)
    fmt_kind = cfg["output"]["format"]
    write_table(out / "timeseries", columns, rows, h, fmt_kind)
    write_report(out / "summary", summary, h, fmt_kind)
    print(f"{summary['verdict']} (same {summary['fidelity_same']:.6f}, "
          f"opposite {summary['fidelity_opposite']:.6f})")
    return EXIT_OK


SWEEP_COLUMNS = ["index", "axis", "value", "verdict", "final_fidelity", "lz_estimate", "endpoint_defect"]


def sweep_row(args):
    """One grid point of a sweep; a pure function of its arguments."""
    index, axis, value, cfg = args
    cfg = json.loads(json.dumps(cfg))
    if axis == "samples":
        report, _, _ = classify_report(cfg, samples=int(value))
        return [index, axis, int(value), report["permutation"], math.nan, math.nan, report["endpoint_defect"]]
    if axis == "epsilon":
        cfg["model"]["kind"] = "perturbed"
        cfg["model"]["epsilon"] = float(value)
    model = cfgmod.build_model(cfg)
    if model.kind != "perturbed":
        raise ConfigError(f"sweep axis {axis!r} needs the perturbed model")
    base = cfgmod.build_schedule(cfg)
    lo, hi = cfgmod.lambda_range(cfg)
    if axis == "rate":
        schedule = dynamics.SweepSchedule.from_rates(base.outer_rate, float(value), cfg["schedule"]["half_width"],
                                                     lam_start=lo, lam_end=hi)
    else:
        schedule = base
    a0 = models.branch_bloch(model, lo, cfg["initial_branch"])
    record = dynamics.evolve_continuous(model, schedule, eigvec_from_bloch(a0), cfg["schedule"]["dt"])
    # majority rule: which of the two eigenprojectors holds the state at the end
    verdict = dynamics.judge(record.final_state, models.branch_bloch(model, hi, cfg["initial_branch"]), 0.5)
    final = verdict.fidelity_same if verdict.verdict == "identity" else verdict.fidelity_opposite
    lz = dynamics.landau_zener_probability(model.epsilon, schedule.rate_at(math.pi))
    return [index, axis, float(value), verdict.verdict, final, lz, math.nan]


def sweep_workers(n_points: int) -> int:
    env = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be a positive integer") from None
    return max(1, min(cap, n_points))


def run_sweep(cfg: dict, axis: str):
    values = cfg["sweep"]["values"]
    jobs = [(i, axis, v, cfg) for i, v in enumerate(values)]
    workers = sweep_workers(len(jobs))
    if workers == 1:
        rows = [sweep_row(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_row, jobs))
    rows.sort(key=lambda r: r[0])
    return rows


def cmd_sweep(cfg: dict, out: Path, axis: str | None = None) -> int:
    axis = axis or cfg["sweep"]["axis"]
    if axis not in cfgmod.SWEEP_AXES:
        raise ConfigError(f"sweep axis must be one of {cfgmod.SWEEP_AXES}")
    rows = run_sweep(cfg, axis)
    write_table(out / f"sweep_{axis}", SWEEP_COLUMNS, rows, cfgmod.config_hash(cfg), cfg["output"]["format"])
    for r in rows:
        print(f"{axis}={fmt(r[2])}: {r[3]}")
    return EXIT_OK


def cmd_spectrum(cfg: dict, out: Path) -> int:
    model = cfgmod.build_model(cfg)
    lo, hi = cfgmod.lambda_range(cfg)
    samples = models.spectrum(model, np.linspace(lo, hi, cfg["cycle"]["samples"]))
    rows = [(s.lam, s.levels[0], s.levels[1]) for s in samples]
    write_table(out / "spectrum", ["lambda", "E1", "E2"], rows, cfgmod.config_hash(cfg), cfg["output"]["format"])
    print(f"wrote {len(rows)} spectrum rows for {model.kind}")
    return EXIT_OK


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holonomy-lab", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("command", choices=["classify", "simulate", "sweep", "spectrum", "print-config"])
    p.add_argument("--config", help="JSON scenario file; missing keys take their defaults")
    p.add_argument("--emit-path", action="store_true", help="classify: also write the director and lifted paths")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (overrides output.format)")
    p.add_argument("--seed", type=int, help="seed for random path perturbations (overrides seed)")
    p.add_argument("--axis", choices=list(cfgmod.SWEEP_AXES), help="sweep: grid axis (overrides sweep.axis)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.out is not None or args.format is not None:
        overrides["output"] = {k: v for k, v in (("dir", args.out), ("format", args.format)) if v is not None}
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        cfg = cfgmod.load_config(args.config, overrides)
        if args.command == "print-config":
            sys.stdout.write(cfgmod.dumps(cfg))
            return EXIT_OK
        out = cfgmod.prepare_output_dir(cfg["output"]["dir"])
        if args.command == "classify":
            return cmd_classify(cfg, out, args.emit_path)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, args.axis)
        return cmd_spectrum(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, HolonomyError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
