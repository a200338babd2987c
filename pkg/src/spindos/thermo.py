"""Equilibrium averages from a spectral density.

All quantities are Boltzmann-weighted sums over the energy grid,

    Z(beta)  = sum_j exp(-beta eps_j) d_j  deps
    E(beta)  = Z^-1 sum_j eps_j exp(-beta eps_j) d_j deps
    C(beta)  = beta^2 (Z^-1 sum_j eps_j^2 exp(-beta eps_j) d_j deps - E^2)

computed with the weights shifted by the lowest grid energy so that the
exponentials never overflow; the dropped prefactor is tracked in log form.
A noisy density can push Z to zero or below at large beta, which is reported
as DegenerateDosError rather than silently returning garbage.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class DegenerateDosError(ValueError):
    """The Boltzmann-weighted density summed to a non-positive partition function."""

    def __init__(self, beta, value):
        self.beta = beta
        self.value = value
        super().__init__(
            f"partition function is {value:.3e} <= 0 at beta = {beta:.4g}; "
            "the density is too noisy at this temperature"
        )


def temperature_grid(t_min=0.05, t_max=5.0, count=60):
    """Log-spaced temperature grid, low to high."""
    if t_min <= 0 or t_max <= t_min:
        raise ValueError(f"need 0 < t_min < t_max, got [{t_min}, {t_max}]")
    return np.geomspace(t_min, t_max, count)


def _boltzmann_terms(energies, density, beta):
    """Boltzmann-weighted density restricted to occupied grid points.

    Shifting by the lowest energy carrying any density (rather than the grid
    edge) keeps exp(-beta (e - e_ref)) <= 1 without flushing the whole sum to
    zero when the grid extends far below the spectrum.
    """
    nz = np.flatnonzero(density)
    if nz.size == 0:
        raise DegenerateDosError(beta, 0.0)
    e = energies[nz]
    e_ref = float(e.min())
    w = np.exp(-beta * (e - e_ref)) * density[nz]
    return e_ref, e, w


def log_partition(energies, density, spacing, beta):
    """Log of the partition function from a gridded density.

    Parameters
    ----------
    energies : ndarray
        Uniform energy grid.
    density : ndarray
        Density values on the grid; may contain negative excursions.
    spacing : float
        Grid step used as the quadrature weight.
    beta : float
        Inverse temperature.

    Returns
    -------
    float
        log Z(beta).

    Raises
    ------
    DegenerateDosError
        If the weighted sum is not positive.
    """
    e_ref, e, w = _boltzmann_terms(energies, density, beta)
    total = w.sum() * spacing
    if not total > 0.0:
        raise DegenerateDosError(beta, total)
    return float(-beta * e_ref + np.log(total))


def partition_function(energies, density, spacing, beta):
    """Z(beta); prefer log_partition when beta |E_min| is large."""
    return float(np.exp(log_partition(energies, density, spacing, beta)))


def energy_and_heat(energies, density, spacing, beta):
    """Mean energy and heat capacity at one inverse temperature.

    Both are ratios of Boltzmann sums, so the overflow shift cancels and only
    the sign of Z matters, which is checked the same way as in log_partition.

    Returns
    -------
    (float, float)
        (E, C) at this beta, for the whole system (not per site).
    """
    _, e, w = _boltzmann_terms(energies, density, beta)
    z = w.sum()
    if not z > 0.0:
        raise DegenerateDosError(beta, z * spacing)
    e1 = (e * w).sum() / z
    e2 = (e ** 2 * w).sum() / z
    return float(e1), float(beta ** 2 * (e2 - e1 ** 2))


@dataclass
class ThermoCurve:
    """Per-temperature averages with cross-sample statistics.

    per_sample_* arrays have shape (S, T) and hold NaN at points where the
    sample's density was unusable (non-positive Z). Mean values are taken
    over the valid samples only, and c_per_site_sd is the unbiased standard
    deviation across samples, NaN wherever fewer than two survive.
    """

    temperatures: np.ndarray
    num_spins: int
    e_mean: np.ndarray
    c_mean: np.ndarray
    c_per_site_sd: np.ndarray
    n_valid: np.ndarray
    per_sample_e: np.ndarray = field(repr=False)
    per_sample_c: np.ndarray = field(repr=False)
    per_sample_log_z: np.ndarray = field(repr=False)

    @property
    def e_per_site(self):
        return self.e_mean / self.num_spins

    @property
    def c_per_site(self):
        return self.c_mean / self.num_spins

    @property
    def sample_count(self):
        return self.per_sample_e.shape[0]


def sample_statistics(temperatures, num_spins, per_sample_e, per_sample_c,
                      per_sample_log_z=None):
    """Fold per-sample E(T) and C(T) rows into a ThermoCurve.

    Parameters
    ----------
    temperatures : ndarray
    num_spins : int
    per_sample_e, per_sample_c : ndarray, shape (S, T)
        Whole-system values, NaN at aborted points.
    per_sample_log_z : ndarray, optional

    Returns
    -------
    ThermoCurve
    """
    pe = np.atleast_2d(np.asarray(per_sample_e, dtype=float))
    pc = np.atleast_2d(np.asarray(per_sample_c, dtype=float))
    if pe.shape != pc.shape or pe.shape[1] != len(temperatures):
        raise ValueError(f"sample arrays disagree: {pe.shape} vs {pc.shape} "
                         f"vs {len(temperatures)} temperatures")
    if per_sample_log_z is None:
        plz = np.full_like(pe, np.nan)
    else:
        plz = np.atleast_2d(np.asarray(per_sample_log_z, dtype=float))
    n_valid = np.sum(~np.isnan(pc), axis=0)
    with np.errstate(invalid="ignore"), warnings.catch_warnings():
        # a temperature with zero valid samples yields NaN means, not a warning
        warnings.simplefilter("ignore", RuntimeWarning)
        e_mean = np.nanmean(np.where(np.isnan(pc), np.nan, pe), axis=0)
        c_mean = np.nanmean(pc, axis=0)
    sd = np.full(len(temperatures), np.nan)
    for t in range(len(temperatures)):
        col = pc[:, t] / num_spins
        col = col[~np.isnan(col)]
        if col.size >= 2:
            sd[t] = col.std(ddof=1)
    return ThermoCurve(
        temperatures=np.asarray(temperatures, dtype=float),
        num_spins=int(num_spins),
        e_mean=e_mean,
        c_mean=c_mean,
        c_per_site_sd=sd,
        n_valid=n_valid,
        per_sample_e=pe,
        per_sample_c=pc,
        per_sample_log_z=plz,
    )


def curve_from_dos(dos, temperatures, num_spins):
    """Thermodynamics from every sample's density separately, then statistics.

    Statistics across samples are taken on the final quantities (one E(T) and
    C(T) curve per sample), not on the densities, so the reported spread is
    the spread of the physical observable.
    """
    temperatures = np.asarray(temperatures, dtype=float)
    s = dos.per_sample.shape[0]
    t = len(temperatures)
    pe = np.full((s, t), np.nan)
    pc = np.full((s, t), np.nan)
    plz = np.full((s, t), np.nan)
    step = dos.grid_step
    for si in range(s):
        d = dos.per_sample[si]
        for ti, temp in enumerate(temperatures):
            beta = 1.0 / temp
            try:
                plz[si, ti] = log_partition(dos.energies, d, step, beta)
                pe[si, ti], pc[si, ti] = energy_and_heat(dos.energies, d, step, beta)
            except DegenerateDosError:
                continue
    return sample_statistics(temperatures, num_spins, pe, pc, plz)
