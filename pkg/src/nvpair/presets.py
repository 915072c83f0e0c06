"""Named parameter presets for the bundled study configurations.

Each preset fixes the physical parameters (field, geometry, coupling
strength) of one reference figure.  Detunings are produced by the tuner at
dispatch time unless a preset pins one explicitly; sweep presets fix the
shared time window so heatmaps are reproducible.
"""

from __future__ import annotations

import numpy as np

from .experiments import default_sweep_window, params_for_zero_field
from .model import ModelParams

ZERO_FIELD_RATIO = 1.293          # adjudicated by the zero-field scan
ZERO_FIELD_OMEGA_OVER_AZZ = 40.0


def _p(omega=1.0, delta=0.0, mu_b=0.0, pref=0.0, theta=0.0) -> ModelParams:
    return ModelParams(omega_rabi=omega, delta=delta, mu_b=mu_b,
                       dip_prefactor=pref, theta=theta)


PRESETS: dict[str, dict] = {
    "fig3": {
        "command": "transfer-n",
        "params": _p(mu_b=0.05, pref=10.0, theta=0.426 * np.pi),
        "tuning": "refined",
    },
    "fig4": {
        "command": "sweep",
        "protocol": "N",
        "tuning": "tuned",
        "params": _p(mu_b=0.05, pref=10.0),
        "t_max": default_sweep_window("N"),
        "n_theta": 200,
    },
    "fig5": {
        "command": "sweep",
        "protocol": "N",
        "tuning": "tuned",
        "params": _p(mu_b=0.05, pref=10.0),
        "t_max": default_sweep_window("N"),
        "n_theta": 200,
    },
    "fig6": {
        "command": "transfer-p",
        "params": _p(mu_b=0.001, pref=9.09, theta=0.292 * np.pi),
        "tuning": "refined",
    },
    "fig7": {
        "command": "sweep",
        "protocol": "P",
        "tuning": "tuned",
        "params": _p(mu_b=0.001, pref=9.091),
        "t_max": default_sweep_window("P"),
        "n_theta": 200,
    },
    "fig8": {
        "command": "sweep",
        "protocol": "P",
        "tuning": "tuned",
        "params": _p(mu_b=0.001, pref=9.091),
        "t_max": default_sweep_window("P"),
        "n_theta": 200,
    },
    "fig9": {
        "command": "zero-field",
        "params": params_for_zero_field(ZERO_FIELD_RATIO,
                                        ZERO_FIELD_OMEGA_OVER_AZZ),
    },
    "fig10": {
        "command": "sweep",
        "protocol": "N",
        "tuning": "fixed_half_azz",
        "params": _p(mu_b=0.05, pref=10.0),
        "t_max": default_sweep_window("N"),
        "n_theta": 200,
    },
    "fig11": {
        "command": "sweep",
        "protocol": "P",
        "tuning": "fixed_half_azz",
        "params": _p(mu_b=0.001, pref=9.091),
        "t_max": default_sweep_window("P"),
        "n_theta": 200,
    },
}


def preset_names() -> list[str]:
    return sorted(PRESETS, key=lambda s: int(s[3:]))
