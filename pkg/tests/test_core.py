"""Spin algebra and propagator contracts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvpair.core import (NonHermitianError, kron, pm_transform,
                         propagate_series, propagate_static,
                         propagate_timedep, spin1_operators, unitarity_defect)

OPS = spin1_operators()
I3 = np.eye(3)


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


def random_state(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class TestSpinOperators:
    def test_sz_diagonal(self):
        assert np.allclose(np.diag(OPS.sz), [1, 0, -1])

    def test_commutators_cyclic(self):
        # [sx, sy] = i sz and cyclic permutations
        for a, b, c in [(OPS.sx, OPS.sy, OPS.sz),
                        (OPS.sy, OPS.sz, OPS.sx),
                        (OPS.sz, OPS.sx, OPS.sy)]:
            comm = a @ b - b @ a
            assert np.abs(comm - 1j * c).max() < 1e-14

    def test_casimir(self):
        s2 = OPS.sx @ OPS.sx + OPS.sy @ OPS.sy + OPS.sz @ OPS.sz
        assert np.abs(s2 - 2 * I3).max() < 1e-14

    def test_pm_transform_unitary(self):
        assert unitarity_defect(pm_transform()) < 1e-12

    def test_sx_pm_block_structure(self):
        # in the {|+>, |0>, |->} ordering sx only connects |0> and |+>
        sx = OPS.sx_pm
        assert abs(sx[0, 1]) == pytest.approx(1.0, abs=1e-12)
        assert abs(sx[1, 0]) == pytest.approx(1.0, abs=1e-12)
        mask = np.ones((3, 3), dtype=bool)
        mask[0, 1] = mask[1, 0] = False
        assert np.abs(sx[mask]).max() < 1e-14

    def test_sy_pm_connects_zero_minus(self):
        sy = OPS.sy_pm
        assert abs(abs(sy[1, 2]) - 1.0) < 1e-12
        mask = np.ones((3, 3), dtype=bool)
        mask[1, 2] = mask[2, 1] = False
        assert np.abs(sy[mask]).max() < 1e-14


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(I3, I3), np.eye(9))

    def test_opposite_magnetization_cancels(self):
        op = kron(OPS.sz, I3) + kron(I3, OPS.sz)
        # |1> (x) |-1>: canonical index 3*0 + 2 = 2
        v = np.zeros(9)
        v[2] = 1.0
        assert np.abs(op @ v).max() < 1e-14

    def test_product_of_eigenvalues(self):
        op = kron(OPS.sz, OPS.sz)
        v = np.zeros(9)
        v[0] = 1.0   # |1>|1>
        assert np.allclose(op @ v, v)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            kron(np.ones((2, 3)), I3)


class TestPropagateStatic:
    def test_zero_hamiltonian(self):
        rng = np.random.default_rng(7)
        psi = random_state(rng, 9)
        out = propagate_static(np.zeros((9, 9)), psi, 3.7)
        assert np.allclose(out, psi)

    def test_diagonal_phase(self):
        psi = np.array([1.0, 0.0, 0.0], dtype=complex)
        out = propagate_static(OPS.sz, psi, np.pi)
        assert out[0] == pytest.approx(np.exp(-1j * np.pi), abs=1e-12)
        assert abs(out[0]) == pytest.approx(1.0, abs=1e-12)

    def test_two_level_rabi_flop(self):
        # coupling Omega/2 between two resonant levels: P_excited(t) =
        # sin^2(Omega t / 2); the full cycle closes at t = 2 pi / Omega
        omega = 1.0
        h = 0.5 * omega * np.array([[0, 1], [1, 0]], dtype=complex)
        psi0 = np.array([1.0, 0.0], dtype=complex)
        for t in (0.3, np.pi / omega, 2 * np.pi / omega, 4.21):
            out = propagate_static(h, psi0, t)
            assert abs(out[1]) ** 2 == pytest.approx(
                np.sin(omega * t / 2) ** 2, abs=1e-12)
        full = propagate_static(h, psi0, 2 * np.pi / omega)
        assert abs(full[0]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_hermitian(self):
        m = np.zeros((3, 3), dtype=complex)
        m[0, 1] = 1.0
        with pytest.raises(NonHermitianError) as err:
            propagate_static(m, np.array([1, 0, 0], dtype=complex), 1.0)
        assert "1.000e+00" in str(err.value)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 1e4))
    def test_unitarity_random(self, seed, t):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 9)
        psi = random_state(rng, 9)
        out = propagate_static(h, psi, t)
        assert abs(np.linalg.norm(out) - 1.0) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 50.0), st.floats(0.1, 50.0))
    def test_composition(self, seed, t1, t2):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 9)
        psi = random_state(rng, 9)
        once = propagate_static(h, psi, t1 + t2)
        twice = propagate_static(h, propagate_static(h, psi, t1), t2)
        assert np.linalg.norm(once - twice) < 1e-9

    def test_series_matches_pointwise(self):
        rng = np.random.default_rng(3)
        h = random_hermitian(rng, 9)
        psi = random_state(rng, 9)
        times = np.linspace(0, 10, 7)
        series = propagate_series(h, psi, times)
        for t, row in zip(times, series):
            assert np.linalg.norm(row - propagate_static(h, psi, t)) < 1e-10


class TestPropagateTimedep:
    def test_constant_reduces_to_static(self):
        rng = np.random.default_rng(11)
        h = random_hermitian(rng, 9)
        psi = random_state(rng, 9)
        t_final = 5.0
        out = propagate_timedep(lambda t: h, psi, t_final, dt=0.01)
        ref = propagate_static(h, psi, t_final)
        assert abs(np.vdot(ref, out)) ** 2 > 1 - 1e-8

    def test_detuned_drive_averages_away(self):
        # cos(w t) sx with w far above the coupling scale transfers nothing
        omega_fast = 80.0
        psi0 = np.array([0, 1, 0], dtype=complex)
        out = propagate_timedep(
            lambda t: np.cos(omega_fast * t) * OPS.sx, psi0, 10.0,
            dt=2 * np.pi / omega_fast / 60)
        # average Hamiltonian vanishes, so the state barely moves
        assert abs(np.vdot(psi0, out)) ** 2 > 0.999

    def test_dt_halving_converges(self):
        rng = np.random.default_rng(5)
        h0 = random_hermitian(rng, 3)
        v = random_hermitian(rng, 3)
        psi = random_state(rng, 3)

        def h_of_t(t):
            return h0 + np.sin(3.0 * t) * v

        a = propagate_timedep(h_of_t, psi, 4.0, dt=2e-3)
        b = propagate_timedep(h_of_t, psi, 4.0, dt=1e-3)
        assert 1 - abs(np.vdot(a, b)) ** 2 < 1e-6

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            propagate_timedep(lambda t: OPS.sz, np.array([1, 0, 0]), 1.0, dt=0.0)
