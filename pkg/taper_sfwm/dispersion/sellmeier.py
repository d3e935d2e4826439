import json
import numpy as np

from dataclasses import dataclass
from typing import Tuple

from taper_sfwm.dispersion.provider import DispersionProvider, _inside
from taper_sfwm.exceptions import ConfigError, DomainError


@dataclass(frozen=True)
class SellmeierModel:
    """
    Sellmeier coefficients of a bulk material.

    Attributes
    ----------
    B : Tuple[float, ...]
        Oscillator strengths (dimensionless).
    C_um2 : Tuple[float, ...]
        Resonance wavelengths squared (um^2).
    range_um : Tuple[float, float]
        Wavelength interval where the fit is valid.
    material : str
    """

    B: Tuple[float, ...]
    C_um2: Tuple[float, ...]
    range_um: Tuple[float, float]
    material: str = 'unknown'

    def __post_init__(self) -> None:
        object.__setattr__(self, 'B', tuple(float(b) for b in self.B))
        object.__setattr__(self, 'C_um2', tuple(float(c) for c in self.C_um2))
        object.__setattr__(self, 'range_um', tuple(float(x) for x in self.range_um))

        if len(self.B) != len(self.C_um2):
            raise DomainError('B and C_um2 must have the same number of terms')
        if any(c <= 0.0 for c in self.C_um2):
            raise DomainError('every Sellmeier C_k must be positive')
        lo, hi = self.range_um
        if not 0.0 < lo < hi:
            raise DomainError(f'invalid Sellmeier range {self.range_um}')


def material_index(model: SellmeierModel, wavelength_um) -> np.ndarray:
    """
    Refractive index n = sqrt(1 + sum_k B_k l^2 / (l^2 - C_k)).

    Raises
    ------
    DomainError
        If a wavelength lies outside the model range or on a resonance.
    """
    wavelength_um = _inside(np.asarray(wavelength_um, dtype=float), model.range_um, 'wavelength')
    l2 = wavelength_um ** 2

    susceptibility = np.zeros_like(l2)
    for b, c in zip(model.B, model.C_um2):
        if np.any(np.isclose(l2, c, rtol=1e-12, atol=0.0)):
            raise DomainError(f'wavelength on the Sellmeier resonance sqrt({c}) um')
        susceptibility = susceptibility + b * l2 / (l2 - c)

    n2 = 1.0 + susceptibility
    if np.any(n2 < 1.0):
        raise DomainError(f'{model.material} index falls below 1 inside the requested range')
    return np.sqrt(n2)


def load_sellmeier(path: str) -> SellmeierModel:
    """Reads a Sellmeier coefficient file ({material, B, C_um2, range_um})."""
    with open(path, 'r') as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{path} is not valid JSON: {exc}') from exc
    try:
        return SellmeierModel(B=data['B'],
                              C_um2=data['C_um2'],
                              range_um=data['range_um'],
                              material=data.get('material', 'unknown'))
    except (KeyError, TypeError, DomainError) as exc:
        raise ConfigError(f'malformed Sellmeier file {path}: {exc}') from exc


class SellmeierProvider(DispersionProvider):
    """Bulk material dispersion, independent of the geometry parameter."""

    def __init__(self, model: SellmeierModel) -> None:
        self.model = model
        self.wavelength_range_um = model.range_um
        self.geometry_range_um = (0.0, np.inf)

    def _n_eff(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        return material_index(self.model, wavelength_um)
