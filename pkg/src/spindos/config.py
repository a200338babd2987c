"""Run configuration: JSON parsing, presets, derived schedule, result hashing."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .model import LatticeSpec, SpinHamiltonian, build_triangular, coupling_scale, energy_bound
from .spectral import SeriesMethod, WindowKind, nyquist_interval
from .statevec import RandomStateKind
from .thermo import temperature_grid

PRESETS = {
    "tri6": 3,
    "tri10": 4,
    "tri15": 5,
    "tri21": 6,
}

_KNOWN_KEYS = {
    "preset", "hamiltonian", "tau", "delta_t", "time_samples",
    "resolution_target", "samples", "ensemble", "method", "window",
    "seed", "threads", "temperatures",
}

DEFAULT_STEP_SCALE = 0.05  # tau0 = this over the largest coupling magnitude


class ConfigError(ValueError):
    """Bad or inconsistent run configuration (maps to exit code 2)."""


def preset_hamiltonian(name):
    try:
        rows = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return build_triangular(LatticeSpec(rows=rows, coupling=-1.0))


@dataclass
class RunConfig:
    hamiltonian: SpinHamiltonian
    tau: float | None = None
    delta_t: float | None = None
    time_samples: int | None = None
    resolution_target: float = 0.1
    samples: int = 20
    ensemble: RandomStateKind = RandomStateKind.RANDOM_SIGN
    method: SeriesMethod = SeriesMethod.DIRECT_INNER
    window: WindowKind | None = None
    seed: int = 0
    threads: int = 1
    temperatures: np.ndarray = field(default_factory=temperature_grid)

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError(f"samples must be positive, got {self.samples}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        if self.resolution_target <= 0:
            raise ConfigError("resolution_target must be positive")
        self.temperatures = np.asarray(self.temperatures, dtype=float)
        if self.temperatures.ndim != 1 or len(self.temperatures) == 0 \
                or np.any(self.temperatures <= 0):
            raise ConfigError("temperatures must be a nonempty list of positive values")


def _parse_hamiltonian(value, base_dir):
    if isinstance(value, dict) and "file" in value:
        path = value["file"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        try:
            return SpinHamiltonian.load(path)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load hamiltonian from {path}: {exc}") from exc
    if isinstance(value, dict):
        try:
            return SpinHamiltonian.from_dict(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad hamiltonian: {exc}") from exc
    raise ConfigError("hamiltonian must be an object")


def _parse_temperatures(value):
    if isinstance(value, dict):
        extra = set(value) - {"min", "max", "count", "spacing"}
        if extra:
            raise ConfigError(f"unknown temperature keys {sorted(extra)}")
        spacing = value.get("spacing", "log")
        if spacing != "log":
            raise ConfigError(f"only log spacing is supported, got {spacing!r}")
        try:
            return temperature_grid(value.get("min", 0.05), value.get("max", 5.0),
                                    int(value.get("count", 60)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(value, (list, tuple)):
        return np.asarray(value, dtype=float)
    raise ConfigError("temperatures must be a list or a {min, max, count} object")


def config_from_dict(data, base_dir="."):
    """Build a RunConfig from a parsed JSON object; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "preset" in data and "hamiltonian" in data:
        raise ConfigError("give either preset or hamiltonian, not both")
    if "preset" in data:
        h = preset_hamiltonian(data["preset"])
    elif "hamiltonian" in data:
        h = _parse_hamiltonian(data["hamiltonian"], base_dir)
    else:
        raise ConfigError("config needs a preset or a hamiltonian")
    kwargs = {"hamiltonian": h}
    try:
        if "tau" in data:
            kwargs["tau"] = float(data["tau"])
        if "delta_t" in data and data["delta_t"] != "nyquist":
            kwargs["delta_t"] = float(data["delta_t"])
        if "time_samples" in data:
            kwargs["time_samples"] = int(data["time_samples"])
        if "resolution_target" in data:
            kwargs["resolution_target"] = float(data["resolution_target"])
        if "samples" in data:
            kwargs["samples"] = int(data["samples"])
        if "seed" in data:
            kwargs["seed"] = int(data["seed"])
        if "threads" in data:
            kwargs["threads"] = int(data["threads"])
        if "ensemble" in data:
            kwargs["ensemble"] = RandomStateKind.parse(data["ensemble"])
        if "method" in data:
            kwargs["method"] = SeriesMethod.parse(data["method"])
        if "window" in data:
            kwargs["window"] = WindowKind.parse(data["window"])
        if "temperatures" in data:
            kwargs["temperatures"] = _parse_temperatures(data["temperatures"])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    return RunConfig(**kwargs)


def config_from_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


@dataclass(frozen=True)
class Schedule:
    """Resolved time grid: step size, sampling interval, and series length."""

    e_max: float
    tau: float
    delta_t: float
    steps_per_interval: int
    num_points: int

    @property
    def resolution(self):
        return np.pi / (self.num_points * self.delta_t)

    @property
    def horizon(self):
        return self.num_points * self.delta_t


def resolve_schedule(cfg):
    """Fill in tau, delta_t and the series length from the energy bound.

    Defaults: tau = min(0.05 / max-coupling, Nyquist interval); delta_t is
    the Nyquist interval snapped down to a whole (and for the half-time
    method, even) number of steps; the series length targets a resolution of
    resolution_target via N = ceil(4 E_max / resolution_target).
    """
    h = cfg.hamiltonian
    e_max = energy_bound(h)
    if e_max <= 0 and (cfg.delta_t is None or cfg.time_samples is None):
        raise ConfigError(
            "the energy bound is zero (empty Hamiltonian); set delta_t and "
            "time_samples explicitly"
        )
    tau = cfg.tau
    if tau is None:
        scale = coupling_scale(h)
        tau = DEFAULT_STEP_SCALE / scale if scale > 0 else cfg.delta_t
        if e_max > 0:
            tau = min(tau, np.pi / e_max)
    if tau is None or tau <= 0:
        raise ConfigError(f"step size must be positive, got {tau}")
    delta_t = cfg.delta_t
    if delta_t is None:
        try:
            delta_t = nyquist_interval(e_max, tau)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.method == SeriesMethod.HALF_TIME:
            q = int(round(delta_t / tau))
            if q % 2 == 1:
                if q < 2:
                    raise ConfigError(
                        "the half-time method needs at least two steps per "
                        f"sampling interval; reduce tau below {delta_t / 2:.6g}"
                    )
                delta_t = (q - 1) * tau
    q = delta_t / tau
    qi = int(round(q))
    if qi < 1 or abs(q - qi) > 1e-9 * max(1.0, qi):
        raise ConfigError(
            f"delta_t = {delta_t} is not a whole number of steps of tau = {tau}"
        )
    if cfg.method == SeriesMethod.HALF_TIME and qi % 2 == 1:
        raise ConfigError(
            f"the half-time method needs an even number of steps per sampling "
            f"interval, got {qi}; adjust delta_t or tau"
        )
    num_points = cfg.time_samples
    if num_points is None:
        num_points = int(np.ceil(4.0 * e_max / cfg.resolution_target))
    if num_points < 2:
        raise ConfigError(f"need at least two time samples, got {num_points}")
    return Schedule(e_max=float(e_max), tau=float(tau), delta_t=float(delta_t),
                    steps_per_interval=qi, num_points=int(num_points))


def run_identity(cfg, schedule, window):
    """Canonical dict of everything that determines the numbers in the output."""
    return {
        "hamiltonian": cfg.hamiltonian.to_dict(),
        "tau": schedule.tau,
        "delta_t": schedule.delta_t,
        "time_samples": schedule.num_points,
        "samples": cfg.samples,
        "ensemble": cfg.ensemble.value,
        "method": cfg.method.value,
        "window": None if window is None else window.value,
        "seed": int(cfg.seed),
        "temperatures": [float(t) for t in cfg.temperatures],
    }


def config_hash(cfg, schedule, window):
    blob = json.dumps(run_identity(cfg, schedule, window),
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
