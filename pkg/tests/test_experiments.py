"""Sweeps, zero-field scan, rotating-frame validation, serialization."""

import numpy as np
import pytest

from nvpair.experiments import (params_for_zero_field, rwa_validation,
                                save_sweep, save_zero_field_scan,
                                sweep_theta, transfer_rate_trend,
                                zero_field_scan)
from nvpair.model import ModelParams

N_BASE = ModelParams(mu_b=0.05, dip_prefactor=10.0)
P_BASE = ModelParams(mu_b=0.001, dip_prefactor=9.091)
TH_STAR = np.arccos(1 / np.sqrt(3))


@pytest.fixture(scope="module")
def small_sweep_n():
    return sweep_theta("N", N_BASE, theta_range=(0.34 * np.pi, 0.46 * np.pi),
                       n_theta=7, tuning="tuned", n_time=800)


class TestSweep:
    def test_requires_two_points(self):
        with pytest.raises(ValueError):
            sweep_theta("N", N_BASE, n_theta=1)

    def test_population_bounds_and_consistency(self, small_sweep_n):
        res = small_sweep_n
        assert res.population_map.min() >= 0.0
        assert res.population_map.max() <= 1.0 + 1e-12
        for i, p in enumerate(res.points):
            assert p.p_peak == pytest.approx(res.population_map[i].max(),
                                             abs=1e-4)

    def test_efficient_region_points(self, small_sweep_n):
        for p in small_sweep_n.points:
            assert p.p_peak > 0.99

    def test_degenerate_points_flagged_not_skipped(self):
        res = sweep_theta("N", N_BASE,
                          theta_range=(TH_STAR - 1e-9, TH_STAR + 1e-9),
                          n_theta=3, tuning="tuned", n_time=300, t_max=30.0)
        assert all(p.degenerate for p in res.points)
        assert res.population_map.shape == (3, 300)

    def test_tuned_dominates_fixed(self):
        thetas = (0.36 * np.pi, 0.44 * np.pi)
        tuned = sweep_theta("N", N_BASE, theta_range=thetas, n_theta=4,
                            tuning="tuned", n_time=600)
        fixed = sweep_theta("N", N_BASE, theta_range=thetas, n_theta=4,
                            tuning="fixed_half_azz", n_time=600)
        for pt, pf in zip(tuned.points, fixed.points):
            assert not pt.degenerate
            assert pt.p_peak >= pf.p_peak - 1e-6

    def test_deterministic_csv(self, tmp_path, small_sweep_n):
        res2 = sweep_theta("N", N_BASE,
                           theta_range=(0.34 * np.pi, 0.46 * np.pi),
                           n_theta=7, tuning="tuned", n_time=800)
        a = tmp_path / "a"
        b = tmp_path / "b"
        save_sweep(small_sweep_n, str(a))
        save_sweep(res2, str(b))
        for suffix in ("_map.csv", "_curve.csv"):
            assert (tmp_path / f"a{suffix}").read_bytes() == \
                   (tmp_path / f"b{suffix}").read_bytes()


@pytest.fixture(scope="module")
def slow_region_sweep():
    return sweep_theta("N", N_BASE, theta_range=(0.0, 0.3 * np.pi),
                       n_theta=7, tuning="tuned", n_time=800)


class TestTrend:
    def test_slower_with_angle(self, slow_region_sweep):
        rep = transfer_rate_trend(slow_region_sweep)
        t_of = dict(zip(np.round(rep.thetas / np.pi, 3), rep.t_peaks))
        assert t_of[0.05] < t_of[0.25]

    def test_theta_zero_fastest(self, slow_region_sweep):
        # resonant chain at theta = 0: transfer time within a grid step of
        # the scanned minimum and far below the slow end of the range
        rep = transfer_rate_trend(slow_region_sweep)
        dt = float(np.diff(slow_region_sweep.time_grid[:2])[0])
        assert rep.t_peaks[0] <= rep.t_peaks.min() + 2 * dt
        assert rep.t_peaks[0] < rep.t_peaks[-1] / 3
        assert rep.increasing_fraction >= 0.8

    def test_rejects_single_point(self, slow_region_sweep):
        single = type(slow_region_sweep)(
            protocol="N", tuning="tuned",
            theta_grid=slow_region_sweep.theta_grid[:1],
            time_grid=slow_region_sweep.time_grid,
            population_map=slow_region_sweep.population_map[:1],
            points=slow_region_sweep.points[:1],
            base_params=slow_region_sweep.base_params,
            metadata=slow_region_sweep.metadata)
        with pytest.raises(ValueError):
            transfer_rate_trend(single)


@pytest.fixture(scope="module")
def zf_scan():
    return zero_field_scan(ratio_range=(0.2, 2.0), n_points=19)


class TestZeroFieldScan:
    def test_candidates_always_reported(self, zf_scan):
        scan = zf_scan
        assert set(scan.candidate_report) == {"0.1293", "1.293"}

    def test_adjudicates_large_candidate(self, zf_scan):
        scan = zf_scan
        assert abs(scan.best_ratio - 1.293) / 1.293 <= 0.05
        assert scan.metadata["adjudicated_candidate"] == "1.293"

    def test_small_candidate_fails_to_deplete(self, zf_scan):
        scan = zf_scan
        small = scan.candidate_report["0.1293"]
        assert small["p00"] > 0.5
        large = scan.candidate_report["1.293"]
        assert large["p00"] < 0.01

    def test_vanishing_coupling_no_transfer(self):
        params = params_for_zero_field(0.01, 40.0)
        from nvpair.dynamics import run_protocol_zero_field
        traj, rep = run_protocol_zero_field(params)
        assert rep.p00 > 0.95
        assert rep.doe < 0.15

    def test_regime_flag(self, zf_scan):
        scan = zf_scan
        assert all(p.in_raman_regime for p in scan.points)

    def test_serialization(self, tmp_path, zf_scan):
        scan = zf_scan
        paths = save_zero_field_scan(scan, str(tmp_path / "scan"), "json")
        assert len(paths) == 1
        import json
        payload = json.loads((tmp_path / "scan.json").read_text())
        assert "meta" in payload and "data" in payload
        assert payload["meta"]["best_ratio"] == pytest.approx(scan.best_ratio)


@pytest.fixture(scope="module")
def fig3_tuned():
    from nvpair.dynamics import refine_detuning
    from nvpair.model import with_delta
    base = ModelParams(mu_b=0.05, dip_prefactor=10.0, theta=0.426 * np.pi)
    return with_delta(base, refine_detuning("N", base).delta)


class TestRwaValidation:
    def test_monotone_improvement(self, fig3_tuned):
        out = rwa_validation(fig3_tuned, [100.0, 300.0, 1000.0])
        overlaps = [c.overlap for c in out]
        assert overlaps[0] < overlaps[1] < overlaps[2]

    def test_overlap_recovers_at_physical_ratio(self, fig3_tuned):
        out = rwa_validation(fig3_tuned, [3e5])
        assert out[0].overlap > 0.999

    def test_rejects_small_ratio(self, fig3_tuned):
        with pytest.raises(ValueError):
            rwa_validation(fig3_tuned, [10.0])

    def test_drive_only_matches_bloch_siegert_scale(self):
        # no dipole, no field: single-spin physics; the residual error is
        # set by the counter-rotating drive term alone
        params = ModelParams(mu_b=0.0, dip_prefactor=0.0, theta=0.0)
        out = rwa_validation(params, [100.0, 300.0], t_span=np.pi * np.sqrt(2))
        for c in out:
            bound = 10.0 * (params.omega_rabi / c.carrier_ratio) ** 2
            assert 1.0 - c.overlap < bound
