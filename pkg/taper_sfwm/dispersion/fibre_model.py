import json
import numpy as np

from dataclasses import dataclass
from typing import Tuple

from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.dispersion.sellmeier import SellmeierModel, material_index
from taper_sfwm.exceptions import ConfigError, DomainError


@dataclass(frozen=True, eq=False)
class FibreCoefficients:
    """
    Empirical V/W coefficients of a solid-core hexagonal microstructured fibre.

    V = A1 + A2 / (1 + A3 exp(A4 l/pitch)) with
    A_i = a_i0 + a_i1 x^b_i1 + a_i2 x^b_i2 + a_i3 x^b_i3 and x = d/pitch;
    W follows the same form with (c, d).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    hole_ratio_range: Tuple[float, float]
    lambda_over_pitch_range: Tuple[float, float]
    pitch_range_um: Tuple[float, float]

    def __post_init__(self) -> None:
        for name, shape in (('a', (4, 4)), ('b', (4, 3)), ('c', (4, 4)), ('d', (4, 3))):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != shape:
                raise DomainError(f'coefficient block {name} must have shape {shape}')
            value.setflags(write=False)
            object.__setattr__(self, name, value)


def load_fibre_coefficients(path: str) -> FibreCoefficients:
    with open(path, 'r') as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{path} is not valid JSON: {exc}') from exc
    try:
        return FibreCoefficients(a=data['V']['a'],
                                 b=data['V']['b'],
                                 c=data['W']['c'],
                                 d=data['W']['d'],
                                 hole_ratio_range=tuple(data['hole_ratio_range']),
                                 lambda_over_pitch_range=tuple(data['lambda_over_pitch_range']),
                                 pitch_range_um=tuple(data['pitch_range_um']))
    except (KeyError, TypeError, DomainError) as exc:
        raise ConfigError(f'malformed fibre coefficient file {path}: {exc}') from exc


def _sigmoid_parameter(prefactors: np.ndarray, exponents: np.ndarray, hole_ratio: float) -> np.ndarray:
    powers = hole_ratio ** exponents
    return prefactors[:, 0] + np.sum(prefactors[:, 1:] * powers, axis=1)


class FibreEmpiricalProvider(DispersionProvider):
    """
    Microstructured fibre whose geometry parameter is the hole pitch (um).

    The hole diameter follows the pitch at a fixed ratio d/pitch, so a tapered
    fibre keeps its cross-section shape. The core material enters through its
    Sellmeier model and the effective core radius is pitch/sqrt(3).

    Methods
    -------
    normalized_frequencies(wavelength_um, pitch_um)
    """

    def __init__(self,
                 coefficients: FibreCoefficients,
                 core: SellmeierModel,
                 hole_ratio: float = 0.5) -> None:

        lo, hi = coefficients.hole_ratio_range
        if not lo <= hole_ratio <= hi:
            raise DomainError(f'hole ratio {hole_ratio} outside [{lo}, {hi}]')

        self.coefficients = coefficients
        self.core = core
        self.hole_ratio = hole_ratio
        self.wavelength_range_um = core.range_um
        self.geometry_range_um = coefficients.pitch_range_um

        self._A = _sigmoid_parameter(coefficients.a, coefficients.b, hole_ratio)
        self._B = _sigmoid_parameter(coefficients.c, coefficients.d, hole_ratio)

    def normalized_frequencies(self, wavelength_um: np.ndarray, pitch_um: np.ndarray):
        """Returns the (V, W) parameters at the given wavelengths and pitches."""
        ratio = wavelength_um / pitch_um
        lo, hi = self.coefficients.lambda_over_pitch_range
        if np.any(ratio < lo) or np.any(ratio > hi):
            raise DomainError(f'wavelength/pitch outside the fitted range [{lo}, {hi}]')

        A, B = self._A, self._B
        V = A[0] + A[1] / (1.0 + A[2] * np.exp(A[3] * ratio))
        W = B[0] + B[1] / (1.0 + B[2] * np.exp(B[3] * ratio))
        return V, W

    def _n_eff(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        V, W = self.normalized_frequencies(wavelength_um, geometry_um)
        n_core = material_index(self.core, wavelength_um)
        ka = 2.0 * np.pi / wavelength_um * geometry_um / np.sqrt(3.0)
        n2 = n_core ** 2 - (V ** 2 - W ** 2) / ka ** 2
        if np.any(n2 < 1.0):
            raise DomainError('empirical fibre model left its physical range (n_eff < 1)')
        return np.sqrt(n2)

    def _mode_radius(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        V, _ = self.normalized_frequencies(wavelength_um, geometry_um)
        a_eff = geometry_um / np.sqrt(3.0)
        return a_eff * (0.65 + 1.619 * V ** -1.5 + 2.879 * V ** -6)
