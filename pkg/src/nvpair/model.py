"""Hamiltonian construction for two parallel, dipole-coupled NV centers.

Builds the lab-frame Hamiltonian, its time-independent rotating-frame
counterpart, the change to the symmetric/antisymmetric two-spin basis, and
the exact bright/dark block split.  The drive Rabi amplitude defines the
base rate unit unless stated otherwise.

Basis orderings (fixed):

* canonical two-spin: ``3*m1 + m2`` over ``{|1>, |0>, |-1>}`` per spin;
* symmetric: ``[|00>, |P0+>, |P0->, |P>, |N>, |P+->, |N0+>, |N0->, |N+->]``
  (bright block first, dark block last), where ``|P> = (|++>+|-->)/sqrt2``,
  ``|N> = (|++>-|-->)/sqrt2`` and ``|Pij>/|Nij> = (|ij> +- |ji>)/sqrt2``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import kron, spin1_operators

BRIGHT_LABELS = ("00", "P0+", "P0-", "P", "N", "P+-")
DARK_LABELS = ("N0+", "N0-", "N+-")
SYM_LABELS = BRIGHT_LABELS + DARK_LABELS

LEAKAGE_TOL = 1e-12

_OPS = spin1_operators()
_I3 = np.eye(3, dtype=complex)


class BrightDarkLeakageError(RuntimeError):
    """Coupling between bright and dark sectors above tolerance."""


@dataclass(frozen=True)
class ModelParams:
    """All dimensionless rates of the two-NV model.

    Rates are in units of the Rabi amplitude unless the caller redefines the
    unit (the zero-field protocol uses the Azz coupling as its unit); the
    equations of motion only see the ratios.
    """

    omega_rabi: float = 1.0
    delta: float = 0.0            # drive detuning from the zero-field line
    mu_b: float = 0.0             # Zeeman rate
    dip_prefactor: float = 0.0    # mu0 mu^2 / (4 pi r^3)
    theta: float = 0.0            # angle of the NV-NV axis, radians in [0, pi/2]
    omega_carrier: float | None = None  # lab-frame runs only

    def __post_init__(self):
        if self.dip_prefactor < 0:
            raise ValueError("dip_prefactor must be >= 0")
        if not (0.0 <= self.theta <= np.pi / 2 + 1e-12):
            raise ValueError("theta must lie in [0, pi/2]")


@dataclass(frozen=True)
class DipoleCoeffs:
    """Surviving diagonal dipole couplings a_jj = prefactor*(1 - 3 r_j^2)."""

    axx: float
    ayy: float
    azz: float


@dataclass(frozen=True)
class BasisTransform:
    u: np.ndarray
    source_tag: str
    target_tag: str
    index_map: tuple[str, ...]


def dipole_coeffs(params: ModelParams) -> DipoleCoeffs:
    """Diagonal dipole couplings for the unit vector (sin th, 0, cos th).

    Off-diagonal tensor components are not represented here: the y-row and
    y-column vanish by geometry and the xz cross terms average to zero in
    the rotating frame (they do enter `hamiltonian_lab`).
    """
    c = params.dip_prefactor
    sx, cz = np.sin(params.theta), np.cos(params.theta)
    return DipoleCoeffs(
        axx=c * (1.0 - 3.0 * sx * sx),
        ayy=c,
        azz=c * (1.0 - 3.0 * cz * cz),
    )


def params_from_coeffs(azz: float, axx: float, omega_rabi: float = 1.0,
                       mu_b: float = 0.0, delta: float = 0.0) -> ModelParams:
    """Invert (axx, azz) -> (theta, prefactor).

    Requires axx < 0 < azz or azz < 0 < axx or compatible signs; the
    prefactor is just ayy = -(axx + azz) and theta follows from the ratio.
    Useful when a study fixes the couplings instead of the geometry.
    """
    c = -(axx + azz)
    if c <= 0:
        raise ValueError("axx + azz must be negative to invert the geometry")
    cos2 = (1.0 - azz / c) / 3.0
    if not (-1e-12 <= cos2 <= 1.0 + 1e-12):
        raise ValueError(f"no angle reproduces axx={axx}, azz={azz}")
    theta = float(np.arccos(np.sqrt(min(max(cos2, 0.0), 1.0))))
    return ModelParams(omega_rabi=omega_rabi, delta=delta, mu_b=mu_b,
                       dip_prefactor=c, theta=theta)


def with_delta(params: ModelParams, delta: float) -> ModelParams:
    return replace(params, delta=delta)


def _two_body(op1: np.ndarray, op2: np.ndarray) -> np.ndarray:
    return kron(op1, op2)


def _sym_ops():
    sx, sy, sz = _OPS.sx, _OPS.sy, _OPS.sz
    return (
        _two_body(sx, _I3) + _two_body(_I3, sx),
        _two_body(sy, _I3) + _two_body(_I3, sy),
        _two_body(sz, _I3) + _two_body(_I3, sz),
        _two_body(sz @ sz, _I3) + _two_body(_I3, sz @ sz),
    )


_SX_TOT, _SY_TOT, _SZ_TOT, _SZ2_TOT = _sym_ops()


def hamiltonian_lab(params: ModelParams, t: float) -> np.ndarray:
    """Full 9x9 lab-frame Hamiltonian in the canonical basis at time t.

    The zero-field splitting enters only as (omega_carrier - delta) on the
    Sz^2 terms, i.e. the simulator works relative to the carrier.  The full
    anisotropic dipole tensor is kept, including the xz cross terms that the
    rotating-frame average discards.
    """
    hs, vd = lab_parts(params)
    return hs + np.cos(params.omega_carrier * t) * vd


def lab_parts(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(static part, drive operator) with h_lab(t) = static + cos(w t)*drive."""
    if params.omega_carrier is None:
        raise ValueError("omega_carrier must be set for lab-frame runs")
    co = dipole_coeffs(params)
    sx, sy, sz = _OPS.sx, _OPS.sy, _OPS.sz
    axz = params.dip_prefactor * (-3.0 * np.sin(params.theta) * np.cos(params.theta))
    h = (params.omega_carrier - params.delta) * _SZ2_TOT
    h = h + params.mu_b * _SZ_TOT
    h = h + co.axx * _two_body(sx, sx) + co.ayy * _two_body(sy, sy) \
          + co.azz * _two_body(sz, sz)
    h = h + axz * (_two_body(sx, sz) + _two_body(sz, sx))
    v = params.omega_rabi * _SX_TOT
    return h, v


def hamiltonian_rwa(params: ModelParams) -> np.ndarray:
    """Time-independent 9x9 rotating-frame Hamiltonian, canonical basis.

    Zeeman + detuning + half-amplitude drive + the surviving dipole terms:
    the xx and yy flip-flop exchanges and the full zz product.
    """
    co = dipole_coeffs(params)
    sz = _OPS.sz
    h = params.mu_b * _SZ_TOT
    h = h - params.delta * _SZ2_TOT
    h = h + 0.5 * params.omega_rabi * _SX_TOT
    h = h + _flip_flop(co.axx, co.ayy)
    h = h + co.azz * _two_body(sz, sz)
    return h


def _flip_flop(axx: float, ayy: float) -> np.ndarray:
    u = pm_product_vectors()
    op = np.outer(u["0+"], u["+0"].conj())
    om = np.outer(u["0-"], u["-0"].conj())
    return axx * (op + op.conj().T) + ayy * (om + om.conj().T)


def pm_product_vectors() -> dict[str, np.ndarray]:
    """Two-spin product states over {|+>, |0>, |->} in canonical coordinates."""
    ket = {
        "+": np.array([1, 0, 1], dtype=complex) / np.sqrt(2),
        "0": np.array([0, 1, 0], dtype=complex),
        "-": np.array([1, 0, -1], dtype=complex) / np.sqrt(2),
    }
    out = {}
    for a in "+0-":
        for b in "+0-":
            out[a + b] = np.kron(ket[a], ket[b])
    return out


def symmetric_transform() -> BasisTransform:
    """Unitary mapping canonical coordinates to the symmetric ordering."""
    u = pm_product_vectors()
    s2 = 1.0 / np.sqrt(2.0)
    cols = [
        u["00"],
        s2 * (u["0+"] + u["+0"]),
        s2 * (u["0-"] + u["-0"]),
        s2 * (u["++"] + u["--"]),
        s2 * (u["++"] - u["--"]),
        s2 * (u["+-"] + u["-+"]),
        s2 * (u["0+"] - u["+0"]),
        s2 * (u["0-"] - u["-0"]),
        s2 * (u["+-"] - u["-+"]),
    ]
    return BasisTransform(u=np.column_stack(cols), source_tag="canonical",
                          target_tag="symmetric", index_map=SYM_LABELS)


_SYM = symmetric_transform()


def to_symmetric(h_canonical: np.ndarray) -> np.ndarray:
    return _SYM.u.conj().T @ h_canonical @ _SYM.u


def split_bright_dark(h_sym: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Split a symmetric-ordered Hamiltonian into its 6x6 and 3x3 blocks.

    The leakage (largest bright-dark coupling) must vanish for any model
    parameters; anything above tolerance signals a basis-ordering bug.
    """
    bright = h_sym[:6, :6]
    dark = h_sym[6:, 6:]
    leakage = float(max(np.abs(h_sym[:6, 6:]).max(), np.abs(h_sym[6:, :6]).max()))
    if leakage > LEAKAGE_TOL:
        raise BrightDarkLeakageError(
            f"bright/dark leakage {leakage:.3e} exceeds {LEAKAGE_TOL:.1e}")
    return bright, dark, leakage


def bright_hamiltonian(params: ModelParams) -> np.ndarray:
    """6x6 bright-sector block of the rotating-frame Hamiltonian."""
    bright, _, _ = split_bright_dark(to_symmetric(hamiltonian_rwa(params)))
    return bright
