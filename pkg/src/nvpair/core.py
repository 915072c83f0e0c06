"""Dense complex linear algebra for two coupled spin-1 systems.

Everything here is basis-agnostic plumbing: spin-1 operators, Kronecker
products, hermiticity checks, and exact propagators built on Hermitian
eigendecomposition.  All rates are dimensionless angular frequencies; time
is measured in the inverse of whichever rate defines the unit system.

Conventions (fixed, see also :mod:`nvpair.model`):

* single-spin canonical basis order is ``{|1>, |0>, |-1>}``;
* two-spin index is ``3*(first spin) + (second spin)`` (row-major);
* ``|+-> = (|1> +- |-1>)/sqrt(2)`` with product order ``{|+>, |0>, |->}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_DRIFT_ABORT = 1e-6

_SQ2 = 1.0 / np.sqrt(2.0)


class NonHermitianError(ValueError):
    """Raised when an operator expected to be Hermitian is not."""


class NormDriftError(RuntimeError):
    """Raised when time stepping loses norm beyond the abort threshold."""


@dataclass(frozen=True)
class SpinOperatorSet:
    """Spin-1 matrices plus their rewrite in the |+/0/-> product basis."""

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    basis_order: tuple[str, ...]
    # same operators conjugated into the {|+>, |0>, |->} ordering
    sx_pm: np.ndarray
    sy_pm: np.ndarray
    sz_pm: np.ndarray
    pm_order: tuple[str, ...]


def pm_transform() -> np.ndarray:
    """Unitary whose columns express {|+>, |0>, |->} in the canonical basis."""
    u = np.zeros((3, 3), dtype=complex)
    u[:, 0] = (_SQ2, 0.0, _SQ2)    # |+>
    u[:, 1] = (0.0, 1.0, 0.0)      # |0>
    u[:, 2] = (_SQ2, 0.0, -_SQ2)   # |->
    return u


def spin1_operators() -> SpinOperatorSet:
    """Spin-1 matrices in the canonical {|1>, |0>, |-1>} ordering."""
    sx = _SQ2 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
    sy = _SQ2 * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    u = pm_transform()
    return SpinOperatorSet(
        sx=sx, sy=sy, sz=sz, basis_order=("+1", "0", "-1"),
        sx_pm=u.conj().T @ sx @ u,
        sy_pm=u.conj().T @ sy @ u,
        sz_pm=u.conj().T @ sz @ u,
        pm_order=("+", "0", "-"),
    )


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, row-major index convention idx = dim_b*i_a + i_b."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects square matrices")
    return np.kron(a, b)


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


def assert_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NonHermitianError(
            f"matrix is not Hermitian: max|M - M^dag| = {defect:.3e} > {tol:.1e}")


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def propagate_static(h: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    """Evolve psi0 under a time-independent Hermitian h for time t.

    Uses the Hermitian eigendecomposition, so the step is exactly unitary up
    to solver accuracy.  Rejects non-Hermitian input with a diagnostic.
    """
    assert_hermitian(h)
    if t < 0:
        raise ValueError("t must be >= 0")
    w, v = np.linalg.eigh(h)
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))


def propagate_series(h: np.ndarray, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """States at every time in `times` under static h; shape (len(times), dim)."""
    assert_hermitian(h)
    w, v = np.linalg.eigh(h)
    c0 = v.conj().T @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * c0[None, :]) @ v.T


def propagate_timedep(h_of_t, psi0: np.ndarray, t_final: float, dt: float) -> np.ndarray:
    """Fixed-step exponential-midpoint integrator for h(t).

    Each step applies exp(-i h(t + dt/2) dt) built from an eigendecomposition,
    so norm is conserved structurally; drift beyond NORM_DRIFT_ABORT aborts
    with a step-size diagnostic.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    psi = np.asarray(psi0, dtype=complex).copy()
    n0 = np.linalg.norm(psi)
    nsteps = max(1, int(np.ceil(t_final / dt - 1e-12)))
    step = t_final / nsteps
    t = 0.0
    for _ in range(nsteps):
        h = h_of_t(t + step / 2.0)
        assert_hermitian(h)
        w, v = np.linalg.eigh(h)
        psi = v @ (np.exp(-1j * w * step) * (v.conj().T @ psi))
        t += step
    drift = abs(np.linalg.norm(psi) - n0)
    if drift > NORM_DRIFT_ABORT:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds {NORM_DRIFT_ABORT:.1e}; "
            f"reduce dt below {step:.3e}")
    return psi


def periodic_drive_propagator(h_static: np.ndarray, v_drive: np.ndarray,
                              omega_carrier: float, steps_per_period: int = 128
                              ) -> tuple[np.ndarray, float]:
    """One-period midpoint propagator for h(t) = h_static + cos(w t) v_drive.

    Returns (U_period, period).  Because the drive is strictly periodic and
    the midpoint grid divides the period exactly, powers of U_period
    reproduce the fixed-step integrator over whole periods at negligible
    cost, which makes large carrier-to-Rabi ratios affordable.
    """
    assert_hermitian(h_static)
    assert_hermitian(v_drive)
    period = 2.0 * np.pi / omega_carrier
    dt = period / steps_per_period
    u = np.eye(h_static.shape[0], dtype=complex)
    for k in range(steps_per_period):
        tm = (k + 0.5) * dt
        w, v = np.linalg.eigh(h_static + np.cos(omega_carrier * tm) * v_drive)
        u = (v * np.exp(-1j * w * dt)) @ v.conj().T @ u
    return u, period


def propagate_periodic(h_static: np.ndarray, v_drive: np.ndarray,
                       omega_carrier: float, psi0: np.ndarray, t_final: float,
                       steps_per_period: int = 128) -> np.ndarray:
    """Evolve under h_static + cos(w t) v_drive from t=0 to t_final."""
    u_p, period = periodic_drive_propagator(h_static, v_drive, omega_carrier,
                                            steps_per_period)
    n_per = int(t_final // period)
    psi = np.linalg.matrix_power(u_p, n_per) @ np.asarray(psi0, dtype=complex)
    # remainder with the same midpoint grid
    t = n_per * period
    dt = period / steps_per_period
    while t < t_final - 1e-15 * max(1.0, t_final):
        step = min(dt, t_final - t)
        tm = t + step / 2.0
        w, v = np.linalg.eigh(h_static + np.cos(omega_carrier * tm) * v_drive)
        psi = v @ (np.exp(-1j * w * step) * (v.conj().T @ psi))
        t += step
    return psi
