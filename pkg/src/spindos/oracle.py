"""Dense reference results for small systems.

Everything here goes through an eigendecomposition of the dense Hamiltonian
matrix, deliberately independent of the state-vector propagation path, so it
can arbitrate correctness for up to a dozen spins.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .model import dense_matrix
from .spectral import CorrelationSeries
from .thermo import ThermoCurve

FIXTURE_EIGENVALUE_CUTOFF = 6  # list full spectra up to this many spins


@dataclass
class SpectrumResult:
    num_spins: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    @property
    def dim(self):
        return 1 << self.num_spins

    @property
    def ground_energy(self):
        return float(self.eigenvalues[0])


def exact_spectrum(h, max_spins=12, vectors=False):
    """Sorted eigenvalues (and optionally eigenvectors) of the dense matrix."""
    m = dense_matrix(h, max_spins=max_spins)
    if vectors:
        vals, vecs = np.linalg.eigh(m)
        return SpectrumResult(h.num_spins, vals, vecs)
    return SpectrumResult(h.num_spins, np.linalg.eigvalsh(m))


def exact_propagator(h, t, max_spins=12):
    """Dense exp(-i t H) through the spectral decomposition."""
    m = dense_matrix(h, max_spins=max_spins)
    vals, vecs = np.linalg.eigh(m)
    return (vecs * np.exp(-1j * t * vals)) @ vecs.conj().T


def exact_trace_series(spectrum, num_points, delta_t):
    """Exact c(t_k) = sum_i exp(-i t_k E_i) packaged like an estimated series."""
    times = delta_t * np.arange(num_points)
    values = np.exp(-1j * np.outer(times, spectrum.eigenvalues)).sum(axis=1)
    return CorrelationSeries(
        delta_t=float(delta_t),
        dim=spectrum.dim,
        values=values,
        per_sample=values[np.newaxis, :].copy(),
    )


def exact_thermo(spectrum, temperatures, max_shift=True):
    """Spectral-sum thermodynamics, shifted by the ground energy for stability."""
    temperatures = np.asarray(temperatures, dtype=float)
    ev = spectrum.eigenvalues
    shift = ev.min() if max_shift else 0.0
    e_arr = np.empty(len(temperatures))
    c_arr = np.empty(len(temperatures))
    lz_arr = np.empty(len(temperatures))
    for i, temp in enumerate(temperatures):
        beta = 1.0 / temp
        w = np.exp(-beta * (ev - shift))
        z = w.sum()
        e1 = (ev * w).sum() / z
        e2 = (ev ** 2 * w).sum() / z
        e_arr[i] = e1
        c_arr[i] = beta ** 2 * (e2 - e1 ** 2)
        lz_arr[i] = -beta * shift + np.log(z)
    return ThermoCurve(
        temperatures=temperatures,
        num_spins=spectrum.num_spins,
        e_mean=e_arr,
        c_mean=c_arr,
        c_per_site_sd=np.zeros(len(temperatures)),
        n_valid=np.ones(len(temperatures), dtype=int),
        per_sample_e=e_arr[np.newaxis, :],
        per_sample_c=c_arr[np.newaxis, :],
        per_sample_log_z=lz_arr[np.newaxis, :],
    )


def fixture_record(h, temperatures):
    """Reference values for one Hamiltonian, keyed by its content hash.

    Small systems store the full spectrum; larger ones store the edge of the
    spectrum plus a checksum so later runs can still detect drift.
    """
    spec = exact_spectrum(h)
    curve = exact_thermo(spec, temperatures)
    ev = spec.eigenvalues
    record = {
        "num_spins": h.num_spins,
        "num_bonds": h.num_bonds,
        "ground_energy": float(ev[0]),
        "eigenvalue_sum": float(ev.sum()),
        "eigenvalue_sq_sum": float((ev ** 2).sum()),
        "temperatures": [float(t) for t in curve.temperatures],
        "heat_per_site": [float(c) for c in curve.c_per_site],
        "energy_per_site": [float(e) for e in curve.e_per_site],
    }
    if h.num_spins <= FIXTURE_EIGENVALUE_CUTOFF:
        record["eigenvalues"] = [float(e) for e in ev]
    else:
        record["eigenvalues_low"] = [float(e) for e in ev[:20]]
    return record


def save_fixtures(path, fixtures):
    with open(path, "w") as fh:
        json.dump(fixtures, fh, indent=1, sort_keys=True)


def load_fixtures(path):
    if not os.path.exists(path):
        return {}
    with open(path) as fh:
        return json.load(fh)


def compare_records(old, new, rtol=1e-9, atol=1e-9):
    """Field-by-field comparison; returns a list of human-readable mismatches."""
    problems = []
    for key, val in old.items():
        if key not in new:
            problems.append(f"missing field {key}")
            continue
        ref = np.asarray(val, dtype=float) if not isinstance(val, (int,)) else val
        got = np.asarray(new[key], dtype=float) if not isinstance(new[key], (int,)) else new[key]
        if isinstance(ref, int):
            if ref != got:
                problems.append(f"{key}: {got} != {ref}")
        elif np.asarray(ref).shape != np.asarray(got).shape:
            problems.append(f"{key}: shape {np.asarray(got).shape} != {np.asarray(ref).shape}")
        elif not np.allclose(got, ref, rtol=rtol, atol=atol):
            worst = float(np.max(np.abs(np.asarray(got) - np.asarray(ref))))
            problems.append(f"{key}: max deviation {worst:.3e}")
    return problems


def update_fixtures(path, h, temperatures):
    """Write the record on first sight, compare against it afterwards.

    Returns (record, problems). A non-empty problem list means the stored
    reference no longer matches what the current code computes.
    """
    fixtures = load_fixtures(path)
    key = h.content_hash()
    record = fixture_record(h, temperatures)
    if key in fixtures:
        return record, compare_records(fixtures[key], record)
    fixtures[key] = record
    save_fixtures(path, fixtures)
    return record, []
