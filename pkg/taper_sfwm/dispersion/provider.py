from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from taper_sfwm.exceptions import DomainError


# relative slack accepted at the domain edges before a query is rejected
EDGE_TOLERANCE = 1e-12


class DispersionProvider(ABC):
    """
    Maps (wavelength, geometry parameter) to the effective index of the guided mode.

    Subclasses implement `_n_eff` on arrays that are already broadcast and checked
    against the domain. Providers are immutable once constructed.

    Attributes
    ----------
    wavelength_range_um : Tuple[float, float]
        Closed wavelength interval where the provider is valid.
    geometry_range_um : Tuple[float, float]
        Closed geometry interval (pitch or width) where the provider is valid.
    """

    wavelength_range_um: Tuple[float, float]
    geometry_range_um: Tuple[float, float]

    @abstractmethod
    def _n_eff(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        ...

    def _mode_radius(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        raise DomainError(f'{type(self).__name__} carries no mode-size data; '
                          'set dispersion.mode_radius_um in the configuration')

    def n_eff(self, wavelength_um, geometry_um) -> np.ndarray:
        wavelength_um, geometry_um = self.check_domain(wavelength_um, geometry_um)
        return self._n_eff(wavelength_um, geometry_um)

    def mode_radius(self, wavelength_um, geometry_um) -> np.ndarray:
        """Gaussian field radius (um) of the mode, F = exp(-r^2/w^2)."""
        wavelength_um, geometry_um = self.check_domain(wavelength_um, geometry_um)
        return self._mode_radius(wavelength_um, geometry_um)

    def check_domain(self, wavelength_um, geometry_um) -> Tuple[np.ndarray, np.ndarray]:
        """
        Broadcasts the query and rejects anything outside the declared domain.

        Returns
        -------
        Tuple[np.ndarray, np.ndarray]
            Broadcast wavelength and geometry arrays, clipped onto the domain edges
            when they exceed them by no more than the rounding slack.
        """
        wavelength_um, geometry_um = np.broadcast_arrays(
            np.asarray(wavelength_um, dtype=float),
            np.asarray(geometry_um, dtype=float),
        )
        wavelength_um = _inside(wavelength_um, self.wavelength_range_um, 'wavelength')
        geometry_um = _inside(geometry_um, self.geometry_range_um, 'geometry')
        return wavelength_um, geometry_um


def _inside(values: np.ndarray, bounds: Tuple[float, float], name: str) -> np.ndarray:
    lo, hi = bounds
    slack_lo = EDGE_TOLERANCE * max(abs(lo), 1.0) if np.isfinite(lo) else 0.0
    slack_hi = EDGE_TOLERANCE * max(abs(hi), 1.0) if np.isfinite(hi) else 0.0
    if not np.all(np.isfinite(values)):
        raise DomainError(f'{name} must be finite')
    if np.any(values < lo - slack_lo) or np.any(values > hi + slack_hi):
        raise DomainError(
            f'{name} outside the provider domain [{lo}, {hi}] um: '
            f'got [{values.min()}, {values.max()}]'
        )
    return np.clip(values, lo, hi)
