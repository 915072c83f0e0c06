"""Observables and protocol runs."""

import numpy as np
import pytest

from nvpair.dynamics import (UnknownLabelError, default_t_final,
                             degree_of_entanglement, doe_of_sym,
                             effective_gap, fidelity, first_peak,
                             intermediate_oscillation, peak_population,
                             population, psi_dq_target, refine_detuning,
                             run_protocol_N, run_protocol_P,
                             run_protocol_zero_field, sym_to_canonical,
                             zero_field_effective_trajectory)
from nvpair.effective import tune_detuning
from nvpair.experiments import params_for_zero_field
from nvpair.model import (SYM_LABELS, ModelParams, pm_product_vectors,
                          with_delta)

FIG3_BASE = ModelParams(mu_b=0.05, dip_prefactor=10.0, theta=0.426 * np.pi)
FIG6_BASE = ModelParams(mu_b=0.001, dip_prefactor=9.09, theta=0.292 * np.pi)


def sym_basis_state(label):
    v = np.zeros(9, dtype=complex)
    v[SYM_LABELS.index(label)] = 1.0
    return v


class TestPopulationFidelity:
    def test_population_basics(self):
        psi = sym_basis_state("00")
        assert population(psi, "00") == 1.0
        assert population(sym_basis_state("N"), "00") == 0.0
        mix = (sym_basis_state("P") + sym_basis_state("N")) / np.sqrt(2)  # |++>
        assert population(mix, "P") == pytest.approx(0.5)

    def test_population_unknown_label(self):
        with pytest.raises(UnknownLabelError):
            population(sym_basis_state("00"), "XX")

    def test_fidelity_self_and_orthogonal(self):
        a, b = sym_basis_state("P"), sym_basis_state("N")
        assert fidelity(a, a) == pytest.approx(1.0)
        assert fidelity(a, b) == 0.0

    def test_fidelity_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.zeros(9), np.zeros(4))


class TestDegreeOfEntanglement:
    def test_product_state(self):
        pm = pm_product_vectors()
        assert degree_of_entanglement(pm["00"]) == pytest.approx(0.0, abs=1e-12)
        assert degree_of_entanglement(pm["+-"]) == pytest.approx(0.0, abs=1e-12)

    def test_bell_state_with_phase(self):
        pm = pm_product_vectors()
        psi = (pm["++"] + np.exp(-1j * np.pi / 4) * pm["--"]) / np.sqrt(2)
        assert degree_of_entanglement(psi) == pytest.approx(1.0, abs=1e-12)

    def test_partial_entanglement_value(self):
        # binary-entropy oracle: -(0.9 ln 0.9 + 0.1 ln 0.1)/ln 2
        pm = pm_product_vectors()
        psi = np.sqrt(0.9) * pm["++"] + np.sqrt(0.1) * pm["--"]
        expected = -(0.9 * np.log(0.9) + 0.1 * np.log(0.1)) / np.log(2)
        assert expected == pytest.approx(0.4690, abs=1e-4)
        assert degree_of_entanglement(psi) == pytest.approx(expected, abs=1e-12)

    def test_local_phase_invariance(self):
        rng = np.random.default_rng(42)
        sz = np.diag([1.0, 0.0, -1.0])
        for _ in range(20):
            v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
            v /= np.linalg.norm(v)
            d0 = degree_of_entanglement(v)
            phi1, phi2 = rng.uniform(0, 2 * np.pi, 2)
            u = np.kron(np.diag(np.exp(1j * phi1 * np.diag(sz))),
                        np.diag(np.exp(1j * phi2 * np.diag(sz))))
            assert abs(degree_of_entanglement(u @ v) - d0) < 1e-12

    def test_target_states_maximal(self):
        for label in ("P", "N"):
            assert doe_of_sym(sym_basis_state(label)) == pytest.approx(1.0, abs=1e-12)


class TestProtocolN:
    def test_transfer_at_refined_detuning(self):
        ref = refine_detuning("N", FIG3_BASE)
        params = with_delta(FIG3_BASE, ref.delta)
        traj = run_protocol_N(params)
        pk = first_peak(traj.times, traj.populations["N"])
        assert pk.value >= 0.999
        assert traj.populations["P0+"].max() < 0.02

    def test_no_drive_frozen(self):
        params = ModelParams(omega_rabi=0.0, mu_b=0.05, dip_prefactor=10.0,
                             theta=0.426 * np.pi, delta=-4.2)
        traj = run_protocol_N(params, t_final=50.0, n_samples=200)
        assert traj.populations["00"].min() > 1 - 1e-12

    def test_degenerate_angle_fails_to_transfer(self):
        th_star = np.arccos(1 / np.sqrt(3))
        bad = ModelParams(mu_b=0.05, dip_prefactor=10.0, theta=th_star,
                          delta=0.0)
        good = with_delta(
            FIG3_BASE, refine_detuning("N", FIG3_BASE, t_max=67.0).delta)
        t_bad = run_protocol_N(bad, t_final=67.0)
        t_good = run_protocol_N(good, t_final=67.0)
        assert (t_good.populations["N"].max()
                - t_bad.populations["N"].max()) > 0.3

    def test_norm_and_probability_conservation(self):
        params = with_delta(FIG3_BASE, tune_detuning("N", FIG3_BASE).delta)
        traj = run_protocol_N(params, n_samples=400)
        norms = np.linalg.norm(traj.states, axis=1)
        assert np.abs(norms - 1).max() < 1e-9
        total = sum(traj.populations[l] for l in traj.labels)
        assert np.abs(total - 1).max() < 1e-9

    def test_dark_sector_stays_empty(self):
        params = with_delta(FIG3_BASE, -4.2)
        traj = run_protocol_N(params, t_final=100.0, n_samples=500)
        dark = sum(traj.populations[l] for l in ("N0+", "N0-", "N+-"))
        assert dark.max() < 1e-10

    def test_exchange_symmetry(self):
        # swapping the two spins leaves bright-sector states invariant
        params = with_delta(FIG3_BASE, -4.2)
        traj = run_protocol_N(params, t_final=80.0, n_samples=50)
        swap = np.zeros((9, 9))
        for i in range(3):
            for j in range(3):
                swap[3 * i + j, 3 * j + i] = 1.0
        for state in traj.states[::10]:
            can = sym_to_canonical(state)
            assert np.abs(swap @ can - can).max() < 1e-10

    def test_effective_gap_predicts_period(self):
        ref = refine_detuning("N", FIG3_BASE)
        params = with_delta(FIG3_BASE, ref.delta)
        gap = effective_gap(params, "N")
        predicted_half = np.pi / abs(gap)
        traj = run_protocol_N(params)
        pk = first_peak(traj.times, traj.populations["N"])
        assert abs(predicted_half - pk.time) / pk.time < 0.05


class TestProtocolP:
    def test_transfer_at_refined_detuning(self):
        ref = refine_detuning("P", FIG6_BASE)
        traj = run_protocol_P(with_delta(FIG6_BASE, ref.delta))
        assert traj.populations["P"].max() >= 0.995

    def test_p_faster_than_n(self):
        ref_n = refine_detuning("N", FIG3_BASE)
        ref_p = refine_detuning("P", FIG6_BASE)
        t_n = run_protocol_N(with_delta(FIG3_BASE, ref_n.delta))
        t_p = run_protocol_P(with_delta(FIG6_BASE, ref_p.delta))
        pk_n = first_peak(t_n.times, t_n.populations["N"])
        pk_p = first_peak(t_p.times, t_p.populations["P"])
        assert pk_p.time < pk_n.time

    def test_intermediate_oscillates_visibly(self):
        ref = refine_detuning("P", FIG6_BASE)
        traj = run_protocol_P(with_delta(FIG6_BASE, ref.delta))
        assert intermediate_oscillation(traj) > 0.005

    def test_zero_field_decouples_magnetic_levels(self):
        params = ModelParams(mu_b=0.0, dip_prefactor=9.09,
                             theta=0.292 * np.pi, delta=-0.497)
        traj = run_protocol_P(params, t_final=200.0, n_samples=400)
        assert traj.populations["P0-"].max() < 1e-20
        assert traj.populations["P+-"].max() < 1e-20


class TestZeroField:
    def test_report_at_adjudicated_parameters(self):
        params = params_for_zero_field(1.293, 40.0)
        traj, rep = run_protocol_zero_field(params)
        assert rep.p00 <= 0.01
        assert rep.doe >= 0.99
        assert abs(rep.relative_phase - (-np.pi / 4)) < 0.1
        assert rep.fidelity_to_target > 0.99

    def test_degenerate_azz_blocks_lower_branch(self):
        # without the zz coupling |--> is unreachable and the double-quantum
        # superposition never forms
        p_ok = params_for_zero_field(1.293, 40.0)
        params = ModelParams(omega_rabi=p_ok.omega_rabi,
                             dip_prefactor=p_ok.dip_prefactor,
                             theta=np.arccos(1 / np.sqrt(3)))
        traj, rep = run_protocol_zero_field(params, t_final=5.0)
        assert traj.populations["--"].max() < 1e-6
        assert rep.doe < 0.5

    def test_three_level_model_tracks_full_run(self):
        params = params_for_zero_field(1.293, 40.0)
        traj, _ = run_protocol_zero_field(params)
        eff = zero_field_effective_trajectory(params, traj.times)
        for key, full_key in (("00", "00"), ("++", "++"), ("--", "--")):
            assert np.abs(eff[key] - traj.populations[full_key]).max() < 0.05

    def test_target_state_definition(self):
        t = psi_dq_target()
        assert abs(t[2]) == pytest.approx(1 / np.sqrt(2))
        assert np.angle(t[3] / t[2]) == pytest.approx(-np.pi / 4)


class TestPeakMachinery:
    def test_first_peak_prefers_earliest(self):
        ts = np.linspace(0, 10, 1001)
        series = np.sin(ts) ** 2   # equal peaks at pi/2, 3pi/2, ...
        pk = first_peak(ts, series)
        assert pk.time == pytest.approx(np.pi / 2, abs=0.02)

    def test_peak_population_refines_off_grid(self):
        ref = refine_detuning("N", FIG3_BASE)
        params = with_delta(FIG3_BASE, ref.delta)
        pk = peak_population(params, "N", default_t_final(params, "N"),
                             n_samples=400)
        # coarse grid plus refinement still lands on the true peak
        assert pk.value > 0.9995
