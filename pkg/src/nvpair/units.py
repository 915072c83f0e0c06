"""Physical-unit conversion to the dimensionless model parameters.

The dynamics never see absolute frequencies; this helper maps a physical
configuration (NV separation, bias field, drive amplitude) to rates in
units of the drive amplitude.  Constants: zero-field splitting
D/(2pi) = 2.87 GHz and gyromagnetic factor mu/(2pi) = 28 GHz/T.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import ModelParams

TWO_PI = 2.0 * np.pi
D_SPLITTING_HZ = 2.87e9            # zero-field splitting / 2pi
GYROMAGNETIC_HZ_PER_T = 28.0e9     # mu / 2pi
MU0 = 4.0e-7 * np.pi               # vacuum permeability, SI
HBAR = 1.054571817e-34             # J s

MIN_SAFE_SEPARATION_NM = 3.0


class ExchangeRegimeWarning(UserWarning):
    """Separations below ~3 nm: exchange interactions dominate dipole."""


@dataclass(frozen=True)
class PhysicalInputs:
    separation_nm: float
    b_field_mT: float
    rabi_MHz: float
    theta: float


@dataclass(frozen=True)
class ConvertedRates:
    """Raw angular rates (rad/s) next to their dimensionless ratios."""

    dip_prefactor_rad_s: float
    mu_b_rad_s: float
    omega_rad_s: float
    params: ModelParams


def dipolar_prefactor_rad_s(separation_nm: float) -> float:
    """mu0 mu^2 hbar / (4 pi r^3) in angular units (~2pi x 52 kHz at 10 nm)."""
    if separation_nm <= 0:
        raise ValueError("separation must be positive")
    mu_angular = TWO_PI * GYROMAGNETIC_HZ_PER_T          # rad/s per tesla
    r = separation_nm * 1e-9
    return MU0 * HBAR * mu_angular ** 2 / (4.0 * np.pi * r ** 3)


def convert_units(phys: PhysicalInputs) -> ConvertedRates:
    """Dimensionless model parameters for a physical configuration."""
    if phys.rabi_MHz <= 0:
        raise ValueError("rabi_MHz must be positive")
    if phys.b_field_mT < 0:
        raise ValueError("b_field_mT must be >= 0")
    if phys.separation_nm < MIN_SAFE_SEPARATION_NM:
        warnings.warn(
            f"separation {phys.separation_nm} nm is below "
            f"{MIN_SAFE_SEPARATION_NM} nm; exchange interactions would "
            "dominate the dipole coupling there", ExchangeRegimeWarning)
    omega = TWO_PI * phys.rabi_MHz * 1e6
    pref = dipolar_prefactor_rad_s(phys.separation_nm)
    mu_b = TWO_PI * GYROMAGNETIC_HZ_PER_T * phys.b_field_mT * 1e-3
    params = ModelParams(omega_rabi=1.0, delta=0.0, mu_b=mu_b / omega,
                         dip_prefactor=pref / omega, theta=phys.theta)
    return ConvertedRates(dip_prefactor_rad_s=pref, mu_b_rad_s=mu_b,
                          omega_rad_s=omega, params=params)
