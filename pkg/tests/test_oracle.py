"""Dense reference spectra, closed-form cross-checks, and fixture persistence."""

import numpy as np
import pytest
import scipy.linalg

from spindos.model import LatticeSpec, SpinHamiltonian, build_triangular, dense_matrix
from spindos.oracle import (
    compare_records,
    exact_propagator,
    exact_spectrum,
    exact_thermo,
    exact_trace_series,
    fixture_record,
    load_fixtures,
    update_fixtures,
)


def heisenberg_pair():
    return SpinHamiltonian(2, [(0, 1, -1.0, -1.0, -1.0)])


class TestSpectra:
    def test_pair_levels(self):
        spec = exact_spectrum(heisenberg_pair())
        assert np.allclose(spec.eigenvalues, [-0.75, 0.25, 0.25, 0.25], atol=1e-12)
        assert spec.ground_energy == pytest.approx(-0.75)
        assert spec.dim == 4

    def test_traceless_and_norm(self):
        # no fields: Tr H = 0; Tr H^2 = (3/16) P D for isotropic unit couplings
        spec = exact_spectrum(build_triangular(LatticeSpec(3)))
        ev = spec.eigenvalues
        assert abs(ev.sum()) < 1e-10
        assert (ev**2).sum() == pytest.approx(3 / 16 * 9 * 64, rel=1e-12)

    def test_six_site_patch_ground_state(self):
        # frozen reference for the 3-row patch: doubly degenerate ground
        # level at -2.25
        spec = exact_spectrum(build_triangular(LatticeSpec(3)))
        assert spec.ground_energy == pytest.approx(-2.25, abs=1e-9)
        assert np.sum(np.abs(spec.eigenvalues + 2.25) < 1e-9) == 2

    def test_cap(self):
        h = SpinHamiltonian(13, [(i, i + 1, -1, -1, -1) for i in range(12)])
        with pytest.raises(ValueError, match="cap"):
            exact_spectrum(h)

    def test_vectors_diagonalize(self):
        h = heisenberg_pair()
        spec = exact_spectrum(h, vectors=True)
        m = dense_matrix(h)
        recon = spec.eigenvectors @ np.diag(spec.eigenvalues) @ spec.eigenvectors.conj().T
        assert np.abs(recon - m).max() < 1e-12


class TestPropagator:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_matches_expm(self, seed):
        rng = np.random.default_rng(seed)
        bonds = [(0, 1, *rng.uniform(-1, 1, 3)), (1, 2, *rng.uniform(-1, 1, 3))]
        h = SpinHamiltonian(3, bonds, fields=rng.uniform(-1, 1, (3, 3)))
        t = 0.9
        u = exact_propagator(h, t)
        ref = scipy.linalg.expm(-1j * t * dense_matrix(h))
        assert np.abs(u - ref).max() < 1e-12

    def test_unitary(self):
        u = exact_propagator(build_triangular(LatticeSpec(2)), 2.0)
        assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-12


class TestTraceSeries:
    def test_equals_spectral_sum(self):
        spec = exact_spectrum(heisenberg_pair())
        series = exact_trace_series(spec, 7, 0.3)
        t = 0.3 * np.arange(7)
        ref = np.exp(-1j * np.outer(t, spec.eigenvalues)).sum(axis=1)
        assert np.abs(series.values - ref).max() < 1e-12
        assert series.values[0] == pytest.approx(4.0)
        assert series.per_sample.shape == (1, 7)


class TestExactThermo:
    def test_pair_closed_form(self):
        # Z = e^{3 beta/4} + 3 e^{-beta/4}
        spec = exact_spectrum(heisenberg_pair())
        temps = np.array([0.3, 1.0, 4.0])
        curve = exact_thermo(spec, temps)
        beta = 1.0 / temps
        z = np.exp(0.75 * beta) + 3 * np.exp(-0.25 * beta)
        e = (-0.75 * np.exp(0.75 * beta) + 0.75 * np.exp(-0.25 * beta)) / z
        assert np.allclose(curve.e_mean, e, rtol=1e-12)
        db = 1e-3  # large enough that the second difference beats roundoff
        for i, b in enumerate(beta):
            zp = np.exp(0.75 * (b + db)) + 3 * np.exp(-0.25 * (b + db))
            zm = np.exp(0.75 * (b - db)) + 3 * np.exp(-0.25 * (b - db))
            e_fd2 = (np.log(zp) - 2 * np.log(z[i]) + np.log(zm)) / db**2
            assert curve.c_mean[i] == pytest.approx(b**2 * e_fd2, rel=1e-4)

    def test_limits(self):
        spec = exact_spectrum(build_triangular(LatticeSpec(2)))
        hot = exact_thermo(spec, np.array([1e6]))
        assert abs(hot.e_mean[0]) < 1e-4
        assert hot.c_mean[0] < 1e-4
        cold = exact_thermo(spec, np.array([1e-3]))
        assert cold.e_mean[0] == pytest.approx(spec.ground_energy, abs=1e-8)


class TestFixtures:
    def test_record_contents(self):
        h = build_triangular(LatticeSpec(2))
        rec = fixture_record(h, temperatures=[1.0, 2.0])
        assert rec["num_spins"] == 3
        assert rec["num_bonds"] == 3
        assert rec["ground_energy"] == pytest.approx(-0.75)
        assert rec["eigenvalue_sum"] == pytest.approx(0.0, abs=1e-12)
        assert rec["eigenvalue_sq_sum"] == pytest.approx(4.5)
        assert len(rec["eigenvalues"]) == 8
        assert len(rec["heat_per_site"]) == 2

    def test_first_write_then_clean_compare(self, tmp_path):
        path = tmp_path / "fixtures.json"
        h = build_triangular(LatticeSpec(2))
        _, problems = update_fixtures(path, h, [1.0])
        assert problems == []
        assert h.content_hash() in load_fixtures(path)
        _, problems = update_fixtures(path, h, [1.0])
        assert problems == []

    def test_detects_drift(self, tmp_path):
        path = tmp_path / "fixtures.json"
        h = build_triangular(LatticeSpec(2))
        update_fixtures(path, h, [1.0])
        stored = load_fixtures(path)
        stored[h.content_hash()]["ground_energy"] += 1e-3
        from spindos.oracle import save_fixtures
        save_fixtures(path, stored)
        _, problems = update_fixtures(path, h, [1.0])
        assert any("ground_energy" in p for p in problems)

    def test_different_hamiltonians_do_not_collide(self, tmp_path):
        path = tmp_path / "fixtures.json"
        update_fixtures(path, build_triangular(LatticeSpec(2)), [1.0])
        _, problems = update_fixtures(path, heisenberg_pair(), [1.0])
        assert problems == []
        assert len(load_fixtures(path)) == 2

    def test_compare_reports_shape_changes(self):
        a = {"temperatures": [1.0, 2.0]}
        b = {"temperatures": [1.0]}
        assert any("shape" in p for p in compare_records(a, b))
        assert compare_records(a, {}) == ["missing field temperatures"]
