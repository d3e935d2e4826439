import os
import numpy as np

from scipy.constants import c

from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.propagation.calc_coupling import PairCoupling


DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), '..', 'data')
SILICA_FILE = os.path.join(DATA_DIR, 'silica_sellmeier.json')


class ConstantProvider(DispersionProvider):
    def __init__(self, n=1.45, radius_um=1.0):
        self.n = n
        self.radius_um = radius_um
        self.wavelength_range_um = (0.4, 2.0)
        self.geometry_range_um = (0.5, 1.5)

    def _n_eff(self, wavelength_um, geometry_um):
        return np.full(np.shape(wavelength_um), self.n)

    def _mode_radius(self, wavelength_um, geometry_um):
        return np.full(np.shape(wavelength_um), self.radius_um)


class LinearProvider(ConstantProvider):
    """n = a + b l."""

    def __init__(self, a=1.45, b=-0.01):
        super().__init__()
        self.a, self.b = a, b

    def _n_eff(self, wavelength_um, geometry_um):
        return self.a + self.b * wavelength_um


class SmoothProvider(ConstantProvider):
    """n = 1.45 + 0.01 sin(3 l), with its exact derivative for convergence checks."""

    def _n_eff(self, wavelength_um, geometry_um):
        return 1.45 + 0.01 * np.sin(3 * wavelength_um)

    def exact_group_index(self, wavelength_um):
        return self._n_eff(wavelength_um, None) - wavelength_um * 0.03 * np.cos(3 * wavelength_um)


class OmegaSquaredProvider(ConstantProvider):
    """n = a + b w^2 with w in rad/s, so that beta2 = 6 b w / c."""

    def __init__(self, a=1.45, b=1e-33):
        super().__init__()
        self.a, self.b = a, b

    def _n_eff(self, wavelength_um, geometry_um):
        omega = 2 * np.pi * c / (wavelength_um * 1e-6)
        return self.a + self.b * omega ** 2


class TaperedProvider(ConstantProvider):
    """
    n = 1.45 + (0.004 + 0.04 (g - 1)) / l^2 with a mode radius of 0.9 g.

    A 10 % modulation of g swings the phase mismatch by about its own size.
    """

    def _n_eff(self, wavelength_um, geometry_um):
        return 1.45 + (0.004 + 0.04 * (geometry_um - 1.0)) / wavelength_um ** 2

    def _mode_radius(self, wavelength_um, geometry_um):
        return 0.9 * geometry_um * np.ones_like(wavelength_um)


def small_config(sellmeier_file=SILICA_FILE):
    """A fast CW run configuration on bulk silica with a fixed mode radius."""
    return {
        'waveguide': {'average_um': 1.0, 'modulation_depth': 0.1, 'period_m': 0.01,
                      'periods': 3, 'steps_per_period': 20},
        'dispersion': {'provider': 'sellmeier', 'sellmeier_file': sellmeier_file,
                       'n2_m2_per_W': 2.25e-20, 'mode_radius_um': 1.0},
        'pump': {'kind': 'cw', 'lambda_pump_nm': 780.0, 'power_W': 1.0},
        'grid': {'signal_start_nm': 740.0, 'signal_stop_nm': 779.0, 'signal_points': 12,
                 'target_signal_nm': 750.0, 'normalize': True},
        'chunk_size': 4,
    }


N2 = 2.25e-20


def pair_coupling(gamma, delta_kappa):
    """PairCoupling of a single pump pair from scalar functions of z."""
    return PairCoupling(gamma=lambda z: np.asarray(gamma(z), dtype=float)[None, ...],
                        delta_kappa=lambda z: np.asarray(delta_kappa(z), dtype=float)[None, ...])
