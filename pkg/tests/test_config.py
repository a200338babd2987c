"""Run configuration parsing, presets, and time-grid resolution."""

import json

import numpy as np
import pytest

from spindos.config import (
    ConfigError,
    RunConfig,
    config_from_dict,
    config_from_file,
    config_hash,
    preset_hamiltonian,
    resolve_schedule,
)
from spindos.model import LatticeSpec, build_triangular
from spindos.spectral import SeriesMethod, WindowKind
from spindos.statevec import RandomStateKind


def minimal(**extra):
    data = {"preset": "tri6"}
    data.update(extra)
    return config_from_dict(data)


class TestPresets:
    @pytest.mark.parametrize("name,spins,bonds", [
        ("tri6", 6, 9), ("tri10", 10, 18), ("tri15", 15, 30), ("tri21", 21, 45),
    ])
    def test_patch_sizes(self, name, spins, bonds):
        h = preset_hamiltonian(name)
        assert h.num_spins == spins
        assert h.num_bonds == bonds
        for b in h.bonds:
            assert (b.jx, b.jy, b.jz) == (-1.0, -1.0, -1.0)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="unknown preset"):
            preset_hamiltonian("tri7")


class TestConfigParsing:
    def test_defaults(self):
        cfg = minimal()
        assert cfg.samples == 20
        assert cfg.seed == 0
        assert cfg.threads == 1
        assert cfg.ensemble is RandomStateKind.RANDOM_SIGN
        assert cfg.method is SeriesMethod.DIRECT_INNER
        assert cfg.window is None
        assert cfg.resolution_target == pytest.approx(0.1)
        assert len(cfg.temperatures) == 60

    def test_explicit_values(self):
        cfg = minimal(tau=0.02, delta_t=0.4, time_samples=64, samples=5,
                      seed=9, ensemble="gaussian_complex", method="half_time",
                      window="hann", temperatures=[0.5, 1.0, 2.0])
        assert cfg.tau == pytest.approx(0.02)
        assert cfg.delta_t == pytest.approx(0.4)
        assert cfg.time_samples == 64
        assert cfg.ensemble is RandomStateKind.GAUSSIAN_COMPLEX
        assert cfg.method is SeriesMethod.HALF_TIME
        assert cfg.window is WindowKind.HANN
        assert list(cfg.temperatures) == [0.5, 1.0, 2.0]

    def test_nyquist_sentinel_means_default(self):
        assert minimal(delta_t="nyquist").delta_t is None

    def test_temperature_object(self):
        cfg = minimal(temperatures={"min": 0.1, "max": 2.0, "count": 7, "spacing": "log"})
        t = cfg.temperatures
        assert len(t) == 7
        assert t[0] == pytest.approx(0.1)
        assert t[-1] == pytest.approx(2.0)

    def test_inline_hamiltonian(self):
        cfg = config_from_dict({"hamiltonian": {
            "L": 2, "bonds": [[0, 1, -1, -1, -1]]}})
        assert cfg.hamiltonian.num_spins == 2

    def test_triangular_shorthand(self):
        cfg = config_from_dict({"hamiltonian": {"triangular": {"rows": 2}}})
        assert cfg.hamiltonian.num_bonds == 3

    def test_hamiltonian_from_file(self, tmp_path):
        build_triangular(LatticeSpec(2)).save(tmp_path / "h.json")
        cfg_path = tmp_path / "run.json"
        cfg_path.write_text(json.dumps({"hamiltonian": {"file": "h.json"},
                                        "samples": 3}))
        cfg = config_from_file(cfg_path)
        assert cfg.hamiltonian.num_spins == 3
        assert cfg.samples == 3

    @pytest.mark.parametrize("data,match", [
        ({"preset": "tri6", "volume": 3}, "unknown config keys"),
        ({"preset": "tri6", "hamiltonian": {"triangular": {"rows": 2}}}, "not both"),
        ({}, "needs a preset or a hamiltonian"),
        ({"preset": "tri6", "samples": 0}, "samples must be positive"),
        ({"preset": "tri6", "samples": "many"}, "bad config value"),
        ({"preset": "tri6", "threads": -1}, "threads must be positive"),
        ({"preset": "tri6", "seed": 1 << 70}, "64 bits"),
        ({"preset": "tri6", "resolution_target": 0}, "resolution_target"),
        ({"preset": "tri6", "ensemble": "pauli"}, "bad config value"),
        ({"preset": "tri6", "temperatures": []}, "nonempty"),
        ({"preset": "tri6", "temperatures": {"min": 1, "max": 2, "count": 3, "speed": 4}},
         "unknown temperature keys"),
        ({"preset": "tri6", "temperatures": {"min": 1, "max": 2, "count": 3,
                                             "spacing": "linear"}}, "only log spacing"),
    ])
    def test_rejected_configs(self, data, match):
        with pytest.raises(ConfigError, match=match):
            config_from_dict(data)

    def test_bad_json_file(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{nope")
        with pytest.raises(ConfigError, match="not valid JSON"):
            config_from_file(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            config_from_file(tmp_path / "gone.json")


class TestSchedule:
    def test_six_site_defaults(self):
        # E_max = 27/4; tau defaults to 0.05/1; delta_t = pi/E_max snapped to 9
        # steps; N = ceil(4 E_max / 0.1)
        sched = resolve_schedule(minimal())
        assert sched.e_max == pytest.approx(6.75)
        assert sched.tau == pytest.approx(0.05)
        assert sched.steps_per_interval == 9
        assert sched.delta_t == pytest.approx(0.45)
        assert sched.num_points == 270
        assert sched.resolution == pytest.approx(np.pi / (270 * 0.45))
        assert sched.horizon == pytest.approx(270 * 0.45)

    def test_sampling_interval_below_nyquist(self):
        sched = resolve_schedule(minimal())
        assert sched.delta_t <= np.pi / sched.e_max + 1e-12

    def test_half_time_gets_even_steps(self):
        sched = resolve_schedule(minimal(method="half_time"))
        assert sched.steps_per_interval % 2 == 0
        assert sched.steps_per_interval == 8

    def test_explicit_odd_interval_rejected_for_half_time(self):
        with pytest.raises(ConfigError, match="even number of steps"):
            resolve_schedule(minimal(method="half_time", tau=0.05, delta_t=0.25))

    def test_non_commensurate_rejected(self):
        with pytest.raises(ConfigError, match="whole number of steps"):
            resolve_schedule(minimal(tau=0.05, delta_t=0.23))

    def test_resolution_target_sets_length(self):
        sched = resolve_schedule(minimal(resolution_target=0.5))
        assert sched.num_points == 54
        coarse = resolve_schedule(minimal(resolution_target=1.0))
        assert coarse.num_points < sched.num_points

    def test_explicit_grid_wins(self):
        sched = resolve_schedule(minimal(tau=0.01, delta_t=0.1, time_samples=32))
        assert (sched.tau, sched.delta_t, sched.num_points) == (0.01, 0.1, 32)
        assert sched.steps_per_interval == 10

    def test_empty_hamiltonian_needs_explicit_grid(self):
        cfg = config_from_dict({"hamiltonian": {"L": 1, "bonds": []}})
        with pytest.raises(ConfigError, match="energy bound is zero"):
            resolve_schedule(cfg)


class TestConfigHash:
    def test_stable_and_sensitive(self):
        a = minimal(seed=1)
        b = minimal(seed=1)
        c = minimal(seed=2)
        sa = resolve_schedule(a)
        assert config_hash(a, sa, WindowKind.HANN) == config_hash(b, resolve_schedule(b), WindowKind.HANN)
        assert config_hash(a, sa, WindowKind.HANN) != config_hash(c, resolve_schedule(c), WindowKind.HANN)
        assert config_hash(a, sa, WindowKind.HANN) != config_hash(a, sa, WindowKind.GAUSSIAN)

    def test_short_hex(self):
        cfg = minimal()
        h = config_hash(cfg, resolve_schedule(cfg), None)
        assert len(h) == 12
        int(h, 16)
