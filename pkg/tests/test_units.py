"""Physical-unit conversion."""

import numpy as np
import pytest

from nvpair.units import (ExchangeRegimeWarning, PhysicalInputs,
                          convert_units, dipolar_prefactor_rad_s)


class TestDipolarPrefactor:
    def test_inverse_cube_scaling(self):
        assert dipolar_prefactor_rad_s(10.0) == pytest.approx(
            dipolar_prefactor_rad_s(20.0) * 8.0, rel=1e-12)

    def test_frozen_reference_value(self):
        # independent evaluation of mu0 hbar mu^2 / (4 pi r^3) at r = 10 nm
        # with mu/(2pi) = 28 GHz/T: 51.9487 kHz
        assert dipolar_prefactor_rad_s(10.0) / (2 * np.pi) == pytest.approx(
            5.19487e4, rel=1e-5)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            dipolar_prefactor_rad_s(0.0)


class TestConvertUnits:
    def test_zero_field_exact(self):
        conv = convert_units(PhysicalInputs(10.0, 0.0, 1.0, 0.3))
        assert conv.params.mu_b == 0.0

    def test_dimensionless_ratios(self):
        conv = convert_units(PhysicalInputs(10.0, 1.0, 1.0, 0.3))
        # mu B for 1 mT at 28 GHz/T is 28 MHz; over a 1 MHz Rabi rate: 28
        assert conv.params.mu_b == pytest.approx(28.0, rel=1e-12)
        assert conv.params.dip_prefactor == pytest.approx(
            5.19487e4 / 1e6, rel=1e-5)
        assert conv.params.theta == 0.3

    def test_rabi_rescales_everything(self):
        a = convert_units(PhysicalInputs(10.0, 1.0, 1.0, 0.3)).params
        b = convert_units(PhysicalInputs(10.0, 1.0, 2.0, 0.3)).params
        assert b.mu_b == pytest.approx(a.mu_b / 2)
        assert b.dip_prefactor == pytest.approx(a.dip_prefactor / 2)

    def test_close_separation_warns(self):
        with pytest.warns(ExchangeRegimeWarning):
            convert_units(PhysicalInputs(2.5, 0.0, 1.0, 0.0))

    def test_safe_separation_silent(self, recwarn):
        convert_units(PhysicalInputs(5.0, 0.0, 1.0, 0.0))
        assert not [w for w in recwarn.list
                    if issubclass(w.category, ExchangeRegimeWarning)]

    def test_validation(self):
        with pytest.raises(ValueError):
            convert_units(PhysicalInputs(10.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError):
            convert_units(PhysicalInputs(10.0, -1.0, 1.0, 0.0))
