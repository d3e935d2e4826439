import numpy as np

from dataclasses import dataclass
from typing import Optional, Sequence
from scipy.integrate import dblquad

from taper_sfwm.exceptions import DomainError


@dataclass(frozen=True)
class GaussianMode:
    """
    Transverse field F = a exp(-r^2/w^2) of a guided mode.

    Attributes
    ----------
    radius_um : float
    wavelength_um : float
    index : float
        Effective index of the mode.
    amplitude : float
        Peak amplitude a.
    """

    radius_um: float
    wavelength_um: float
    index: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not self.radius_um > 0:
            raise DomainError('mode radius must be positive')
        if not self.amplitude > 0:
            raise DomainError('mode amplitude must be positive')


def gaussian_area(radius_um, amplitude=1.0):
    """S = a^2 pi w^2 / 2 (um^2), broadcasting."""
    return np.asarray(amplitude) ** 2 * np.pi * np.asarray(radius_um) ** 2 / 2.0


def gaussian_xpm(radius_p, radius_q, amplitude_p=1.0, amplitude_q=1.0):
    """Closed form of the integral of |F_p|^2 |F_q|^2 (um^2)."""
    denominator = 2.0 / np.asarray(radius_p) ** 2 + 2.0 / np.asarray(radius_q) ** 2
    return (np.asarray(amplitude_p) * np.asarray(amplitude_q)) ** 2 * np.pi / denominator


def gaussian_fwm(radius_p1, radius_p2, radius_s, radius_i, amplitudes=(1.0, 1.0, 1.0, 1.0)):
    """Closed form of the integral of F_p1 F_p2 F_s F_i (um^2)."""
    # pumps and signal/idler summed separately so swapping s and i is exact
    pumps = 1.0 / np.asarray(radius_p1) ** 2 + 1.0 / np.asarray(radius_p2) ** 2
    pair = 1.0 / np.asarray(radius_s) ** 2 + 1.0 / np.asarray(radius_i) ** 2
    a1, a2, a_s, a_i = (np.asarray(a) for a in amplitudes)
    return (a1 * a2) * (a_s * a_i) * np.pi / (pumps + pair)


def mode_area(mode: GaussianMode) -> float:
    return float(gaussian_area(mode.radius_um, mode.amplitude))


def overlap_fwm(p1: GaussianMode, p2: GaussianMode, s: GaussianMode, i: GaussianMode) -> float:
    return float(gaussian_fwm(p1.radius_um, p2.radius_um, s.radius_um, i.radius_um,
                              (p1.amplitude, p2.amplitude, s.amplitude, i.amplitude)))


def overlap_xpm(p: GaussianMode, q: GaussianMode) -> float:
    return float(gaussian_xpm(p.radius_um, q.radius_um, p.amplitude, q.amplitude))


def overlap_quadrature(modes: Sequence[GaussianMode], powers: Sequence[int],
                       epsrel: float = 1e-12) -> float:
    """
    Numerical integral over the transverse plane of prod_k F_k^powers[k].

    The square of integration extends eight decay lengths of the product.
    """
    if len(modes) != len(powers):
        raise DomainError('one power per mode is required')

    decay = sum(p / m.radius_um ** 2 for m, p in zip(modes, powers))
    half_width = 8.0 / np.sqrt(decay)
    scale = np.prod([m.amplitude ** p for m, p in zip(modes, powers)])

    value, _ = dblquad(lambda y, x: np.exp(-decay * (x * x + y * y)),
                       -half_width, half_width, -half_width, half_width,
                       epsabs=0.0, epsrel=epsrel)
    return float(scale * value)


def radius_from_area(area_um2):
    """Inverts S = pi w^2 / 2 for a unit-amplitude Gaussian."""
    area_um2 = np.asarray(area_um2, dtype=float)
    if np.any(area_um2 <= 0):
        raise DomainError('mode area must be positive')
    return np.sqrt(2.0 * area_um2 / np.pi)


@dataclass(frozen=True)
class ModeSizeModel:
    """
    Where mode radii come from: the dispersion provider, or a fixed override.

    Attributes
    ----------
    radius_um : float, optional
        Fixed radius used at every wavelength and geometry when given.
    amplitude : float
        Peak field amplitude convention; photon numbers do not depend on it.
    """

    radius_um: Optional[float] = None
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.radius_um is not None and not self.radius_um > 0:
            raise DomainError('mode radius override must be positive')
        if not self.amplitude > 0:
            raise DomainError('mode amplitude must be positive')

    def radius(self, provider, wavelength_um, geometry_um) -> np.ndarray:
        if self.radius_um is not None:
            shape = np.broadcast_shapes(np.shape(wavelength_um), np.shape(geometry_um))
            return np.full(shape, float(self.radius_um))
        return provider.mode_radius(wavelength_um, geometry_um)
