"""Command-line entry point.

Subcommands: evolve | dos | thermo | oracle | bench. Exit codes: 0 on
success, 1 on numerical failure (norm drift, no usable partition function),
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, report
from .config import (
    ConfigError,
    config_from_dict,
    config_from_file,
    config_hash,
    resolve_schedule,
)
from .evolve import NumericalError, TrotterPlan, evolve
from .model import SpinHamiltonian
from .oracle import exact_spectrum, exact_thermo, update_fixtures
from .pipeline import THERMO_DEFAULT_WINDOW, run_dos, run_thermo
from .statevec import random_state, save_amplitudes
from .thermo import DegenerateDosError


def _add_common(sub):
    sub.add_argument("--config", help="JSON run configuration")
    sub.add_argument("--preset", choices=["tri6", "tri10", "tri15", "tri21"],
                     help="built-in triangular-patch benchmark")
    sub.add_argument("--out", default="results", help="output directory")
    sub.add_argument("--seed", type=int, help="override the run seed")
    sub.add_argument("--samples", type=int, help="override the sample count")
    sub.add_argument("--threads", type=int, help="worker threads for the sample loop")


def _load_config(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = config_from_file(args.config)
    elif args.preset:
        cfg = config_from_dict({"preset": args.preset})
    else:
        raise ConfigError("need --config or --preset")
    if args.seed is not None:
        cfg.seed = int(args.seed)
        cfg.__post_init__()
    if args.samples is not None:
        cfg.samples = int(args.samples)
        cfg.__post_init__()
    if args.threads is not None:
        cfg.threads = int(args.threads)
        cfg.__post_init__()
    return cfg


def _say(path):
    print(f"wrote {path}")


def cmd_evolve(args):
    cfg = _load_config(args)
    schedule = resolve_schedule(cfg)
    out = report.ensure_out_dir(args.out)
    h = cfg.hamiltonian
    plan = TrotterPlan(h, schedule.tau)
    state = random_state(h.num_spins, cfg.ensemble, cfg.seed, stream=0)
    norm0 = state.norm()
    steps = args.steps
    block = 100
    recorded_steps = [0]
    norms = [norm0]
    done = 0
    while done < steps:
        chunk = min(block, steps - done)
        evolve(state, plan, chunk)
        done += chunk
        recorded_steps.append(done)
        norms.append(state.norm())
    run_hash = config_hash(cfg, schedule, None)
    report.write_norms_csv(os.path.join(out, "norms.csv"), recorded_steps, norms, run_hash)
    _say(os.path.join(out, "norms.csv"))
    report.write_op_report(os.path.join(out, "opcounts.json"), plan, run_hash)
    _say(os.path.join(out, "opcounts.json"))
    report.plot_norms(recorded_steps, norms, os.path.join(out, "norms.png"))
    _say(os.path.join(out, "norms.png"))
    if args.dump_amplitudes:
        dump = os.path.join(out, "amplitudes.bin")
        save_amplitudes(state, dump)
        _say(dump)
    drift = abs(norms[-1] - norm0)
    print(f"{steps} steps of tau={schedule.tau:.6g}, norm drift {drift:.3e}")
    if drift > 1e-8:
        raise NumericalError(f"norm drifted by {drift:.3e} over {steps} steps")
    return 0


def _write_series_and_dos(out, result):
    series_path = os.path.join(out, "series.csv")
    report.write_series_csv(series_path, result.series, result.run_hash)
    _say(series_path)
    dos_path = os.path.join(out, "dos.csv")
    report.write_dos_csv(dos_path, result.dos, result.run_hash)
    _say(dos_path)
    report.plot_series(result.series, os.path.join(out, "series.png"))
    _say(os.path.join(out, "series.png"))
    report.plot_dos(result.dos, os.path.join(out, "dos.png"))
    _say(os.path.join(out, "dos.png"))
    ops_path = os.path.join(out, "opcounts.json")
    _write_ops(ops_path, result)
    _say(ops_path)


def _write_ops(path, result):
    import json

    payload = {"tool_version": __version__, "config_hash": result.run_hash}
    payload.update(result.op_totals)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_dos(args):
    cfg = _load_config(args)
    result = run_dos(cfg)
    out = report.ensure_out_dir(args.out)
    _write_series_and_dos(out, result)
    s = result.schedule
    print(f"E_max={s.e_max:.6g} tau={s.tau:.6g} delta_t={s.delta_t:.6g} "
          f"N={s.num_points} resolution={s.resolution:.4g} "
          f"integral={result.dos.integral():.6g}")
    return 0


def cmd_thermo(args):
    cfg = _load_config(args)
    result = run_thermo(cfg)
    out = report.ensure_out_dir(args.out)
    _write_series_and_dos(out, result)
    curve = result.curve
    thermo_path = os.path.join(out, "thermo.csv")
    report.write_thermo_csv(thermo_path, curve, result.run_hash)
    _say(thermo_path)
    report.plot_thermo(curve, os.path.join(out, "thermo.png"))
    _say(os.path.join(out, "thermo.png"))
    report.plot_heat_spread(curve, os.path.join(out, "heat_spread.png"))
    _say(os.path.join(out, "heat_spread.png"))
    dead = curve.temperatures[curve.n_valid == 0]
    if dead.size:
        raise DegenerateDosError(1.0 / dead.max(), 0.0)
    return 0


def cmd_oracle(args):
    cfg = _load_config(args)
    out = report.ensure_out_dir(args.out)
    try:
        spectrum = exact_spectrum(cfg.hamiltonian)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    schedule = resolve_schedule(cfg)
    run_hash = config_hash(cfg, schedule, THERMO_DEFAULT_WINDOW)
    spec_path = os.path.join(out, "spectrum.csv")
    report._write_rows(spec_path, run_hash, "index,energy",
                       enumerate(spectrum.eigenvalues))
    _say(spec_path)
    curve = exact_thermo(spectrum, cfg.temperatures)
    thermo_path = os.path.join(out, "exact_thermo.csv")
    report.write_thermo_csv(thermo_path, curve, run_hash)
    _say(thermo_path)
    report.plot_thermo(curve, os.path.join(out, "exact_thermo.png"))
    _say(os.path.join(out, "exact_thermo.png"))
    fixtures_path = os.path.join(out, "fixtures.json")
    record, problems = update_fixtures(fixtures_path, cfg.hamiltonian, cfg.temperatures)
    _say(fixtures_path)
    print(f"ground energy {record['ground_energy']:.12g}")
    if problems:
        for p in problems:
            print(f"fixture mismatch: {p}", file=sys.stderr)
        raise NumericalError("results drifted from the stored fixtures")
    return 0


def _chain(num_spins):
    bonds = [(i, i + 1, -1.0, -1.0, -1.0) for i in range(num_spins - 1)]
    return SpinHamiltonian(num_spins, bonds)


def _best_time(fn, reps, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    out = report.ensure_out_dir(args.out)
    rows = []
    per_step = []
    print("L      D   diag_s      rot_s      step_s")
    for L in sizes:
        h = _chain(L)
        plan = TrotterPlan(h, args.tau)
        rng = np.random.default_rng(0)
        amps = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
        amps /= np.linalg.norm(amps)
        from .statevec import StateVector

        state = StateVector(L, amps)
        plan.step(state)  # compile and warm caches
        reps = max(1, args.reps * (1 << max(0, 18 - L)))
        diag_t = _best_time(lambda: plan.z_half.apply(state.amplitudes), reps)
        from .evolve import apply_axis_rotation

        rot_t = _best_time(lambda: apply_axis_rotation(state, "x"), max(1, reps // 4))
        step_t = _best_time(lambda: plan.step(state), max(1, reps // 8))
        rows.append((L, h.dim, plan.z_half.num_terms, diag_t, rot_t, step_t))
        per_step.append(step_t)
        print(f"{L:2d} {h.dim:7d} {diag_t:.3e}  {rot_t:.3e}  {step_t:.3e}")
    path = os.path.join(out, "bench.csv")
    report._write_rows(path, "bench", "L,dim,diag_terms,diag_seconds,rotation_seconds,step_seconds", rows)
    _say(path)
    report.plot_bench(sizes, per_step, os.path.join(out, "bench.png"))
    _say(os.path.join(out, "bench.png"))
    if len(sizes) > 1:
        growth = [(per_step[i + 1] / per_step[i]) ** (1.0 / (sizes[i + 1] - sizes[i]))
                  for i in range(len(sizes) - 1)]
        print("per-spin step-time growth:", ", ".join(f"{g:.2f}" for g in growth))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spindos",
        description="spin-1/2 dynamics, trace sampling, spectral density, thermodynamics",
    )
    parser.add_argument("--version", action="version", version=f"spindos {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("evolve", help="propagate one random state and log the norm")
    _add_common(p)
    p.add_argument("--steps", type=int, default=1000, help="number of steps")
    p.add_argument("--dump-amplitudes", action="store_true",
                   help="write the final state as a binary amplitude dump")
    p.set_defaults(func=cmd_evolve)

    p = subs.add_parser("dos", help="estimate the trace series and spectral density")
    _add_common(p)
    p.set_defaults(func=cmd_dos)

    p = subs.add_parser("thermo", help="spectral density plus equilibrium curves")
    _add_common(p)
    p.set_defaults(func=cmd_thermo)

    p = subs.add_parser("oracle", help="dense reference results and fixtures")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = subs.add_parser("bench", help="kernel timings across system sizes")
    p.add_argument("--sizes", default="12,16,20", help="comma-separated spin counts")
    p.add_argument("--reps", type=int, default=4, help="repetition base count")
    p.add_argument("--tau", type=float, default=0.05, help="step size for the plan")
    p.add_argument("--out", default="results", help="output directory")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, DegenerateDosError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
