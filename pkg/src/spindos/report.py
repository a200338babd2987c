"""Delimited output and figure rendering.

Every CSV starts with a comment line carrying the tool version and the hash
of the resolved run parameters, so a file can always be traced back to the
exact run that produced it. Column names and order are fixed. Figures are
rendered straight to PNG files next to the CSVs.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__

SERIES_COLUMNS = "t,re_c,im_c,sd_re,sd_im"
DOS_COLUMNS = "epsilon,dos_mean,dos_sd"
THERMO_COLUMNS = "T,E_per_site_mean,C_per_site_mean,C_per_site_sd,n_valid_samples"
NORMS_COLUMNS = "step,norm"

plt.rcParams.update({
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
})


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _header(run_hash):
    return f"# spindos {__version__} config_hash={run_hash}\n"


def _write_rows(path, run_hash, columns, rows):
    with open(path, "w") as fh:
        fh.write(_header(run_hash))
        fh.write(columns + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_series_csv(path, series, run_hash):
    sd_re, sd_im = series.sample_sd()
    rows = zip(series.times, series.values.real, series.values.imag, sd_re, sd_im)
    _write_rows(path, run_hash, SERIES_COLUMNS, rows)


def write_dos_csv(path, dos, run_hash):
    rows = zip(dos.energies, dos.density, dos.sample_sd())
    _write_rows(path, run_hash, DOS_COLUMNS, rows)


def write_thermo_csv(path, curve, run_hash):
    rows = zip(curve.temperatures, curve.e_per_site, curve.c_per_site,
               curve.c_per_site_sd, curve.n_valid)
    _write_rows(path, run_hash, THERMO_COLUMNS, rows)


def write_norms_csv(path, steps, norms, run_hash):
    _write_rows(path, run_hash, NORMS_COLUMNS, zip(steps, norms))


def write_op_report(path, plan, run_hash):
    payload = {"tool_version": __version__, "config_hash": run_hash}
    payload.update(plan.op_report())
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _save(fig, path):
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_series(series, path):
    fig, ax = plt.subplots(figsize=(6.5, 4))
    t = series.times
    ax.plot(t, series.values.real, lw=1.0, label="Re c(t)")
    ax.plot(t, series.values.imag, lw=1.0, alpha=0.8, label="Im c(t)")
    ax.set_xlabel("t")
    ax.set_ylabel("trace estimate")
    ax.legend(loc="upper right")
    return _save(fig, path)


def plot_dos(dos, path):
    fig, ax = plt.subplots(figsize=(6.5, 4))
    sd = dos.sample_sd()
    ax.plot(dos.energies, dos.density, lw=1.2, color="tab:blue")
    if np.any(sd > 0):
        ax.fill_between(dos.energies, dos.density - sd, dos.density + sd,
                        color="tab:blue", alpha=0.25, lw=0)
    ax.set_xlabel("energy")
    ax.set_ylabel("density of states")
    ax.set_title(f"resolution {dos.resolution:.3g}, window {dos.window}")
    return _save(fig, path)


def plot_thermo(curve, path):
    fig, (ax_e, ax_c) = plt.subplots(1, 2, figsize=(9.5, 4))
    t = curve.temperatures
    ax_e.plot(t, curve.e_per_site, lw=1.2, color="tab:orange")
    ax_e.set_xscale("log")
    ax_e.set_xlabel("T")
    ax_e.set_ylabel("E / L")
    sd = curve.c_per_site_sd
    ax_c.errorbar(t, curve.c_per_site, yerr=np.where(np.isnan(sd), 0.0, sd),
                  lw=1.2, color="tab:red", elinewidth=0.8, capsize=2)
    ax_c.set_xscale("log")
    ax_c.set_xlabel("T")
    ax_c.set_ylabel("C / L")
    fig.suptitle(f"{curve.num_spins} spins, {curve.sample_count} samples")
    return _save(fig, path)


def plot_heat_spread(curve, path):
    """Cross-sample spread of C/L against temperature, log-log."""
    fig, ax = plt.subplots(figsize=(6.5, 4))
    sd = curve.c_per_site_sd
    ok = ~np.isnan(sd) & (sd > 0)
    if np.any(ok):
        ax.plot(curve.temperatures[ok], sd[ok], "o-", ms=3, lw=1.0)
        ax.set_yscale("log")
    ax.set_xscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel("sd of C / L across samples")
    return _save(fig, path)


def plot_norms(steps, norms, path):
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.plot(steps, np.asarray(norms) - 1.0, lw=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("norm - 1")
    return _save(fig, path)


def plot_bench(sizes, per_step, path):
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.semilogy(sizes, per_step, "o-", lw=1.0)
    ax.set_xlabel("spins")
    ax.set_ylabel("seconds per application")
    ax.set_xticks(list(sizes))
    return _save(fig, path)


def ensure_out_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
