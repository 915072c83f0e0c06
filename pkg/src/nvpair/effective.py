"""Effective Hamiltonians: adiabatic elimination and detuning tuning.

The bright-sector Hamiltonian is reduced to three levels by eliminating the
weakly coupled block, H_eff = H1 - H2 H3^{-1} H2^dag.  Closed forms for the
induced shifts are kept alongside the matrix route so each can check the
other.  The resonant-transfer condition, with the closed-form shifts
substituted and denominators cleared, becomes a polynomial in the detuning
whose real roots are found via companion-matrix eigenvalues.

All elimination blocks use the convention in which the ground state sits at
2*delta, i.e. the bright block shifted by +2*delta times the identity (a
global offset with no effect on populations).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .model import (BRIGHT_LABELS, ModelParams, bright_hamiltonian,
                    dipole_coeffs)

DEGENERACY_TOL_FACTOR = 1e-6      # |azz| below this (in drive units) is degenerate
CONDITION_LIMIT = 1e8

KEEP_N = ("00", "N", "P0+")
DROP_N = ("P", "P+-", "P0-")
KEEP_P = ("00", "P", "P0+")
DROP_P = ("P+-", "P0-", "N")


class SingularShiftError(ZeroDivisionError):
    """A closed-form shift denominator vanished."""


class EliminationConditionError(RuntimeError):
    """The eliminated block is too ill-conditioned to invert."""


class RootSelectionError(RuntimeError):
    """No real polynomial root near the requested branch."""


@dataclass(frozen=True)
class EliminationSplit:
    keep_labels: tuple[str, ...]
    drop_labels: tuple[str, ...]
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    condition_number: float


@dataclass(frozen=True)
class TunedDetuning:
    delta: float
    residual: float               # resonance-condition mismatch, drive units
    poly_residual: float          # cleared-polynomial value at the root
    root_branch: str              # "N" or "P"
    degenerate_flag: bool
    all_real_roots: tuple[float, ...]
    coefficients: tuple[float, ...]  # cleared polynomial, low order first


def shifted_bright(params: ModelParams) -> np.ndarray:
    """Bright block plus 2*delta on the diagonal (ground state at 2*delta)."""
    return bright_hamiltonian(params) + 2.0 * params.delta * np.eye(6)


def elimination_split(params: ModelParams, protocol: str) -> EliminationSplit:
    """Partition the bright block for the requested transfer protocol."""
    keep, drop = (KEEP_N, DROP_N) if protocol.upper() == "N" else (KEEP_P, DROP_P)
    h = shifted_bright(params)
    ki = [BRIGHT_LABELS.index(l) for l in keep]
    di = [BRIGHT_LABELS.index(l) for l in drop]
    h1 = h[np.ix_(ki, ki)]
    h2 = h[np.ix_(ki, di)]
    h3 = h[np.ix_(di, di)]
    cond = float(np.linalg.cond(h3))
    return EliminationSplit(tuple(keep), tuple(drop), h1, h2, h3, cond)


def adiabatic_eliminate(split: EliminationSplit) -> np.ndarray:
    """H_eff = H1 - H2 H3^{-1} H2^dag over the kept labels."""
    if split.condition_number > CONDITION_LIMIT:
        raise EliminationConditionError(
            f"eliminated block condition number {split.condition_number:.3e} "
            f"exceeds {CONDITION_LIMIT:.1e} (near-resonant elimination)")
    heff = split.h1 - split.h2 @ np.linalg.solve(split.h3, split.h2.conj().T)
    return 0.5 * (heff + heff.conj().T)


def _guard(value: float, name: str, params: ModelParams) -> float:
    scale = max(1.0, params.omega_rabi, params.dip_prefactor)
    if abs(value) < 1e-9 * scale or not np.isfinite(value):
        raise SingularShiftError(
            f"denominator {name} vanishes at theta={params.theta:.6f}, "
            f"delta={params.delta:.6f}")
    return value


def shift_delta_N(params: ModelParams) -> float:
    """Level shift induced on the intermediate state in the N-protocol split.

    Closed form equivalent to the (3,3) entry of H2 H3^{-1} H2^dag with the
    N-protocol blocks; agrees with `adiabatic_eliminate` to machine
    precision (the two are tested against each other).
    """
    co = dipole_coeffs(params)
    a = _guard(co.azz, "Azz", params)
    y = _guard(co.ayy + params.delta, "Ayy + Delta", params)
    om = params.omega_rabi
    mb = params.mu_b
    den = _guard(4.0 * y * (a * a - 4.0 * mb * mb) - a * om * om,
                 "4(Ayy+Delta)(Azz^2-4(muB)^2) - Azz*Omega^2", params)
    lead = -((mb * om) ** 2) * (2.0 * y + a) / den * (2.0 / a + 1.0 / y)
    return lead - om * om / (4.0 * a) - mb * mb / y


def shifts_P(params: ModelParams) -> tuple[float, float, float]:
    """(delta', alpha, delta'') induced by the P-protocol elimination.

    delta' shifts the target level, alpha is the induced target-intermediate
    coupling, delta'' shifts the intermediate.  Both Zeeman-driven terms
    vanish as (muB)^2, so in the low-field hierarchy they tend to zero.
    """
    co = dipole_coeffs(params)
    a = _guard(co.azz, "Azz", params)
    y = co.ayy + params.delta
    om = params.omega_rabi
    mb = params.mu_b
    r = _guard(a * y - om * om / 4.0, "Azz(Ayy+Delta) - Omega^2/4", params)
    d1 = -4.0 * mb * mb * y / r
    alpha = mb * mb * om / r
    d2 = om * om / (4.0 * a) - mb * mb * a / r
    return d1, alpha, d2


def raman_condition_residual(protocol: str, params: ModelParams, delta: float) -> float:
    """Mismatch of the two-level resonance condition at the given detuning.

    Protocol N: 2*Delta + Azz - Omega^2 / (4*(Axx + Delta + delta_shift)).
    Protocol P: the analogue with the P-protocol shifts and coupling alpha.
    Returned in drive units; zero at a tuned detuning.
    """
    from .model import with_delta
    p = with_delta(params, delta)
    co = dipole_coeffs(p)
    om = p.omega_rabi
    if protocol.upper() == "N":
        x = co.axx + delta + shift_delta_N(p)
        return float(2.0 * delta - (-co.azz + om * om / (4.0 * x)))
    d1, alpha, d2 = shifts_P(p)
    x = co.axx + delta + d2
    lhs = 2.0 * delta - om * om / (2.0 * x)
    rhs = co.azz + d1 - (om / 2.0 + alpha) ** 2 / x
    return float(lhs - rhs)


def _cleared_polynomial_N(params: ModelParams) -> np.ndarray:
    """Resonance condition for protocol N with denominators cleared.

    Exact substitution of the closed-form shift keeps the full rational
    structure, so the cleared polynomial is quartic in the detuning; the two
    extra roots sit at the shift's poles, far from the physical branch.
    """
    co = dipole_coeffs(params)
    a, w, m = co.azz, params.omega_rabi / 2.0, 2.0 * params.mu_b
    y = np.array([co.ayy, 1.0])                                   # Ayy + D
    det = npoly.polysub(npoly.polymul(y, [a * a - m * m]), [a * w * w])
    q = npoly.polymul([4.0 * a], npoly.polymul(y, det))
    two_y_plus_a = npoly.polyadd(npoly.polymul([2.0], y), [a])
    nd = npoly.polyadd(
        npoly.polyadd(
            npoly.polymul([-m * m * w * w], npoly.polypow(two_y_plus_a, 2)),
            npoly.polymul([-4.0 * w * w], npoly.polymul(y, det))),
        npoly.polymul([-a * m * m], det))
    lhs = npoly.polymul([a, 2.0],
                        npoly.polyadd(npoly.polymul([co.axx, 1.0], q), nd))
    return npoly.polysub(lhs, npoly.polymul([w * w], q))


def _cleared_polynomial_P(params: ModelParams) -> np.ndarray:
    co = dipole_coeffs(params)
    a, w, m = co.azz, params.omega_rabi / 2.0, 2.0 * params.mu_b
    y = np.array([co.ayy, 1.0])
    r = npoly.polysub(npoly.polymul([a], y), [w * w])              # a y - w^2
    s = np.array([co.axx + w * w / a, 1.0])
    t = npoly.polysub(npoly.polymul([4.0], npoly.polymul(r, s)), [m * m * a])
    term1 = npoly.polymul(np.array([0.0, 2.0]), npoly.polymul(r, t))
    term2 = npoly.polymul([-8.0 * w * w], npoly.polymul(r, r))
    term3 = npoly.polymul([-a], npoly.polymul(r, t))
    term4 = npoly.polymul(npoly.polymul([m * m], y), t)
    term5 = npoly.polymul([w * w],
                          npoly.polypow(npoly.polyadd(npoly.polymul([2.0], r),
                                                      [m * m]), 2))
    return npoly.polyadd(npoly.polyadd(npoly.polyadd(term1, term2),
                                       npoly.polyadd(term3, term4)), term5)


def tuning_polynomial(protocol: str, params: ModelParams) -> np.ndarray:
    """Cleared resonance polynomial, coefficients low order first."""
    if protocol.upper() == "N":
        return _cleared_polynomial_N(params)
    return _cleared_polynomial_P(params)


def tune_detuning(protocol: str, params: ModelParams) -> TunedDetuning:
    """Solve the resonance condition for the detuning.

    Real roots come from companion-matrix eigenvalues of the cleared
    polynomial; the root nearest -Azz/2 (protocol N) or +Azz/2 (protocol P)
    is selected, with ties broken by condition residual and then |delta|.
    A degenerate azz returns delta = 0 with the flag set: transfer is known
    to fail there and no finite tuning helps.
    """
    proto = protocol.upper()
    if proto not in ("N", "P"):
        raise ValueError("protocol must be 'N' or 'P'")
    co = dipole_coeffs(params)
    if abs(co.azz) < DEGENERACY_TOL_FACTOR * params.omega_rabi:
        return TunedDetuning(0.0, float("nan"), float("nan"), proto, True, (), ())
    coeffs = tuning_polynomial(proto, params)
    roots = np.polynomial.polynomial.polyroots(coeffs)
    scale = max(1.0, abs(co.azz))
    real = np.sort(roots[np.abs(roots.imag) < 1e-9 * scale].real)
    target = -co.azz / 2.0 if proto == "N" else co.azz / 2.0
    if real.size == 0:
        raise RootSelectionError(f"no real roots; complex roots: {roots}")
    dist = np.abs(real - target)
    best = dist.min()
    cand = real[dist <= best * (1.0 + 1e-12) + 1e-15]
    if cand.size > 1:
        res = [abs(raman_condition_residual(proto, params, d)) for d in cand]
        cand = cand[np.argsort(res)][:1] if min(res) < max(res) else cand
    if cand.size > 1:
        cand = cand[np.argsort(np.abs(cand))]
    delta = _polish_root(proto, params, float(cand[0]), scale)
    res = abs(raman_condition_residual(proto, params, delta))
    poly_res = abs(float(npoly.polyval(delta, coeffs)))
    return TunedDetuning(delta, res, poly_res, proto, False,
                         tuple(float(r) for r in real),
                         tuple(float(c) for c in coeffs))


def _polish_root(proto: str, params: ModelParams, delta: float,
                 scale: float) -> float:
    """Secant iterations on the uncleared condition.

    Companion-matrix roots are accurate relative to the polynomial's
    coefficient scale, which can leave the condition residual above the
    contract when the coefficients are large; a few secant steps fix that.
    """
    f0 = raman_condition_residual(proto, params, delta)
    step = 1e-9 * scale
    d_prev, f_prev = delta + step, raman_condition_residual(proto, params,
                                                            delta + step)
    d, f = delta, f0
    for _ in range(8):
        if abs(f) < 1e-13 * scale or f == f_prev:
            break
        d_next = d - f * (d - d_prev) / (f - f_prev)
        if abs(d_next - d) > 0.1 * scale:
            break
        d_prev, f_prev = d, f
        d, f = d_next, raman_condition_residual(proto, params, d_next)
    return d if abs(f) <= abs(f0) else delta


def fallback_detuning(protocol: str, params: ModelParams) -> float:
    """Untuned seed: -Azz/2 for protocol N, +Azz/2 for protocol P."""
    co = dipole_coeffs(params)
    return -co.azz / 2.0 if protocol.upper() == "N" else co.azz / 2.0


# ---------------------------------------------------------------------------
# zero-field (four-level) sector


def zero_field_block(params: ModelParams) -> tuple[np.ndarray, tuple[str, ...]]:
    """4x4 block over {|00>, |P0+>, |++>, |-->} at zero field and detuning."""
    if params.mu_b != 0.0 or params.delta != 0.0:
        raise ValueError("zero-field block requires mu_b = 0 and delta = 0")
    h = shifted_bright(params)  # delta = 0, shift is a no-op
    i00, ip0, ip, in_ = (BRIGHT_LABELS.index(l) for l in ("00", "P0+", "P", "N"))
    s2 = 1.0 / np.sqrt(2.0)
    basis = np.zeros((6, 4), dtype=complex)
    basis[i00, 0] = 1.0
    basis[ip0, 1] = 1.0
    basis[ip, 2], basis[in_, 2] = s2, s2        # |++>
    basis[ip, 3], basis[in_, 3] = s2, -s2       # |-->
    return basis.conj().T @ h @ basis, ("00", "P0+", "++", "--")


def zero_field_effective(params: ModelParams) -> np.ndarray:
    """3x3 effective Hamiltonian over {|00>, |++>, |-->} at zero field.

    Eliminating the far-detuned intermediate produces the coupling
    omega_eff = -Omega^2/(2*Axx) between |00> and |++>, the same value on
    both of their diagonals, and the bare zz coupling between |++> and |-->.
    Cross-checked in tests against eliminating the intermediate from the
    four-level block with the generic matrix route.
    """
    co = dipole_coeffs(params)
    if abs(co.axx) < 1e-12:
        raise SingularShiftError("Axx = 0: intermediate state is resonant")
    if params.mu_b != 0.0 or params.delta != 0.0:
        raise ValueError("zero-field reduction requires mu_b = 0 and delta = 0")
    k = zero_field_coupling(params)
    return np.array([[k, k, 0.0], [k, k, co.azz], [0.0, co.azz, 0.0]],
                    dtype=complex)


def zero_field_coupling(params: ModelParams) -> float:
    """Effective |00> <-> |++> coupling at zero field, -Omega^2/(2*Axx)."""
    co = dipole_coeffs(params)
    if abs(co.axx) < 1e-12:
        raise SingularShiftError("Axx = 0: intermediate state is resonant")
    return -params.omega_rabi ** 2 / (2.0 * co.axx)
