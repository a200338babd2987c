"""Time correlations c(t) = Tr exp(-i t H) and their Fourier-side density.

The trace is estimated from random states: for unit-norm |phi> drawn from a
suitable ensemble, D <phi| exp(-i t H) |phi> is an unbiased estimator, and
averaging S independent states shrinks the fluctuation like 1/sqrt(S).

The spectral density on an energy grid is

    d(eps) = (dt / 2 pi) sum_k w(|k|) exp(+i eps t_k) c(t_k)

summed over k = -(N-1) .. N-1 with the Hermitian extension c(-t) = c(t)^*,
evaluated by FFT with zero padding. Sampling at the Nyquist interval
dt = pi / E_max guarantees no aliasing when E_max bounds the spectral
radius, and the usable resolution is d_eps = pi / (N dt).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .statevec import inner_product
from .evolve import evolve


class SeriesMethod(Enum):
    DIRECT_INNER = "direct_inner"
    HALF_TIME = "half_time"

    @classmethod
    def parse(cls, name):
        for m in cls:
            if m.value == name:
                return m
        raise ValueError(f"unknown series method {name!r}; choose from "
                         f"{[m.value for m in cls]}")


class WindowKind(Enum):
    GAUSSIAN = "gaussian"
    HANN = "hann"

    @classmethod
    def parse(cls, name):
        for w in cls:
            if w.value == name:
                return w
        raise ValueError(f"unknown window {name!r}; choose from "
                         f"{[w.value for w in cls]}")


def window_weights(kind, num_points):
    """One-sided window w(k), k = 0 .. N-1, with w(0) = 1.

    GAUSSIAN tapers to exp(-4.5) ~ 1.1e-2 at the end of the series; HANN
    tapers smoothly to zero, which suppresses far sidelobes much harder and
    is the right choice when the density feeds Boltzmann-weighted sums.
    """
    k = np.arange(num_points)
    if kind == WindowKind.GAUSSIAN:
        return np.exp(-0.5 * (3.0 * k / num_points) ** 2)
    if kind == WindowKind.HANN:
        return np.cos(np.pi * k / (2.0 * num_points)) ** 2
    raise ValueError(f"unknown window kind {kind!r}")


def nyquist_interval(e_max, tau=None):
    """Largest safe sampling interval pi / e_max, optionally snapped down to a
    whole number of steps of size tau."""
    if e_max <= 0:
        raise ValueError(f"energy bound must be positive, got {e_max}")
    dt = np.pi / e_max
    if tau is None:
        return dt
    if tau <= 0:
        raise ValueError(f"step size must be positive, got {tau}")
    q = int(np.floor(dt / tau + 1e-12))
    if q < 1:
        raise ValueError(
            f"step size {tau} exceeds the sampling interval {dt:.6g}; reduce tau"
        )
    return q * tau


def _steps_per_interval(delta_t, tau):
    q = delta_t / tau
    qi = int(round(q))
    if qi < 1 or abs(q - qi) > 1e-9 * max(1.0, qi):
        raise ValueError(
            f"sampling interval {delta_t} is not a whole number of steps of {tau}"
        )
    return qi


def correlation_sample(plan, state, num_points, delta_t,
                       method=SeriesMethod.DIRECT_INNER):
    """One sample's correlation values <phi| exp(-i t_k H) |phi>, k = 0 .. N-1.

    DIRECT_INNER keeps a copy of the initial state and records inner products
    while the working copy advances. HALF_TIME advances only to t_k / 2 and
    records sum_n a_n(t_k/2)^2 (plain squares, no conjugation), which equals
    the same inner product because the step operator is complex symmetric
    whenever H is real. It needs no stored copy and half the steps, but is
    only valid for a real Hamiltonian (no y fields) and a real initial state.
    """
    if num_points < 1:
        raise ValueError("num_points must be positive")
    qi = _steps_per_interval(delta_t, plan.tau)
    values = np.empty(num_points, dtype=np.complex128)

    if method == SeriesMethod.DIRECT_INNER:
        reference = state.copy()
        work = state.copy()
        values[0] = inner_product(reference, work)
        for k in range(1, num_points):
            evolve(work, plan, qi)
            values[k] = inner_product(reference, work)
        return values

    if method == SeriesMethod.HALF_TIME:
        if not plan.hamiltonian.has_real_matrix():
            raise ValueError(
                "the half-time shortcut needs a real Hamiltonian matrix, but a "
                "y field makes it complex; use DIRECT_INNER"
            )
        if not state.is_real(tol=0.0):
            raise ValueError(
                "the half-time shortcut needs a real initial state; use "
                "DIRECT_INNER for this ensemble"
            )
        if qi % 2 != 0:
            raise ValueError(
                f"half-time sampling needs an even number of steps per interval, "
                f"got {qi}; adjust delta_t or tau"
            )
        work = state.copy()
        values[0] = np.sum(work.amplitudes ** 2)
        for k in range(1, num_points):
            evolve(work, plan, qi // 2)
            values[k] = np.sum(work.amplitudes ** 2)
        return values

    raise ValueError(f"unknown method {method!r}")


@dataclass
class CorrelationSeries:
    """Trace-scaled correlation series with per-sample values retained.

    values[k] estimates Tr exp(-i t_k H) at t_k = k delta_t; per_sample holds
    the same quantity for each of the S samples so downstream statistics can
    be taken across samples. For unit-norm samples c_0 = D exactly.
    """

    delta_t: float
    dim: int
    values: np.ndarray
    per_sample: np.ndarray = field(repr=False)

    @property
    def num_points(self):
        return self.values.shape[0]

    @property
    def sample_count(self):
        return self.per_sample.shape[0]

    @property
    def times(self):
        return self.delta_t * np.arange(self.num_points)

    def sample_sd(self):
        """Cross-sample standard deviation of (Re, Im) at each t_k, ddof = 1."""
        if self.sample_count < 2:
            z = np.zeros(self.num_points)
            return z, z.copy()
        sd_re = self.per_sample.real.std(axis=0, ddof=1)
        sd_im = self.per_sample.imag.std(axis=0, ddof=1)
        return sd_re, sd_im


def trace_estimate(sample_values, delta_t, dim):
    """Combine per-sample correlations into a trace estimate.

    The ensemble identity D E[a_n^* a_m] = delta_nm puts the factor of the
    Hilbert-space dimension here and nowhere else: inputs are raw unit-norm
    expectation values, outputs are in trace units.
    """
    rows = [np.asarray(v, dtype=np.complex128) for v in sample_values]
    if not rows:
        raise ValueError("need at least one sample")
    n = rows[0].shape
    for v in rows[1:]:
        if v.shape != n:
            raise ValueError(
                f"samples disagree on the time grid: {v.shape} vs {n}"
            )
    per_sample = dim * np.vstack(rows)
    return CorrelationSeries(
        delta_t=float(delta_t),
        dim=int(dim),
        values=per_sample.mean(axis=0),
        per_sample=per_sample,
    )


@dataclass
class DosEstimate:
    """Spectral density on a uniform energy grid covering [-pi/dt, pi/dt].

    The grid is denser than the physical resolution: ``resolution`` is the
    honest linewidth pi / (N dt) while the grid step only controls rendering.
    """

    energies: np.ndarray
    density: np.ndarray
    per_sample: np.ndarray = field(repr=False)
    delta_t: float = 0.0
    resolution: float = 0.0
    window: str = ""
    dim: int = 0

    @property
    def grid_step(self):
        return float(self.energies[1] - self.energies[0])

    def sample_sd(self):
        if self.per_sample.shape[0] < 2:
            return np.zeros_like(self.density)
        return self.per_sample.std(axis=0, ddof=1)

    def integral(self):
        return float(self.density.sum() * self.grid_step)


def _density_transform(two_sided_padded, delta_t):
    d = (delta_t / (2.0 * np.pi)) * two_sided_padded.shape[-1] * np.fft.ifft(two_sided_padded, axis=-1)
    return np.fft.fftshift(d, axes=-1)


def dos_from_series(series, window=WindowKind.GAUSSIAN, pad_factor=4):
    """Windowed Fourier transform of a correlation series into a density.

    Each sample's series is extended Hermitian-symmetrically, windowed,
    zero-padded pad_factor-fold, and transformed; the returned density is the
    cross-sample mean and integrates to the Hilbert-space dimension.
    """
    if pad_factor < 1:
        raise ValueError("pad_factor must be at least 1")
    n = series.num_points
    if n < 2:
        raise ValueError("need at least two time samples for a density")
    w = window_weights(window, n)
    g = series.per_sample * w
    m = pad_factor * (2 * n - 1)
    padded = np.zeros((series.sample_count, m), dtype=np.complex128)
    padded[:, :n] = g
    padded[:, m - n + 1:] = np.conj(g[:, 1:][:, ::-1])
    d = _density_transform(padded, series.delta_t)
    scale = np.abs(d.real).max()
    imag_leak = np.abs(d.imag).max()
    if scale > 0 and imag_leak > 1e-10 * scale:
        raise ValueError(
            f"density came out complex (imag/real = {imag_leak / scale:.2e}); "
            "the series is not Hermitian-extendable"
        )
    per_sample = np.ascontiguousarray(d.real)
    energies = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(m, d=series.delta_t))
    return DosEstimate(
        energies=energies,
        density=per_sample.mean(axis=0),
        per_sample=per_sample,
        delta_t=series.delta_t,
        resolution=np.pi / (n * series.delta_t),
        window=window.value,
        dim=series.dim,
    )
