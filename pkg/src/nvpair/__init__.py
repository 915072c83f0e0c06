"""Entangled-state preparation in a dipole-coupled pair of parallel NV centers.

Simulates the driven two-spin-1 system, tunes the drive detuning for the
double-quantum transfer protocols, and reproduces the reference study's
figures at desk scale.
"""

__version__ = "0.1.0"

from .core import (NonHermitianError, NormDriftError, SpinOperatorSet, kron,
                   propagate_static, propagate_timedep, spin1_operators)
from .dynamics import (EntanglementReport, Trajectory, degree_of_entanglement,
                       fidelity, population, refine_detuning, run_protocol_N,
                       run_protocol_P, run_protocol_zero_field)
from .effective import (EliminationSplit, TunedDetuning, adiabatic_eliminate,
                        elimination_split, shift_delta_N, shifts_P,
                        tune_detuning, zero_field_effective)
from .model import (BasisTransform, DipoleCoeffs, ModelParams, dipole_coeffs,
                    hamiltonian_lab, hamiltonian_rwa, split_bright_dark,
                    symmetric_transform)
from .units import PhysicalInputs, convert_units

__all__ = [
    "__version__",
    "BasisTransform", "DipoleCoeffs", "EliminationSplit",
    "EntanglementReport", "ModelParams", "NonHermitianError",
    "NormDriftError", "PhysicalInputs", "SpinOperatorSet", "Trajectory",
    "TunedDetuning", "adiabatic_eliminate", "convert_units",
    "degree_of_entanglement", "dipole_coeffs", "elimination_split",
    "fidelity", "hamiltonian_lab", "hamiltonian_rwa", "kron", "population",
    "propagate_static", "propagate_timedep", "refine_detuning",
    "run_protocol_N", "run_protocol_P", "run_protocol_zero_field",
    "shift_delta_N", "shifts_P", "spin1_operators", "split_bright_dark",
    "symmetric_transform", "tune_detuning", "zero_field_effective",
]
