import numpy as np

from scipy.constants import c

from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import DomainError


# s^2/m -> ps^2/m
PS2 = 1e24


def effective_index(provider: DispersionProvider, wavelength_um, geometry_um):
    """Effective index of the guided mode; never extrapolates."""
    return _scalar(provider.n_eff(wavelength_um, geometry_um))


def group_index(provider: DispersionProvider, wavelength_um, geometry_um, step_um: float = 1e-4):
    """
    Group index n_g = n - l dn/dl from a 3-point central difference.

    Raises
    ------
    DomainError
        If the wavelength is not two steps inside the provider domain.
    """
    wavelength_um = np.asarray(wavelength_um, dtype=float)
    _check_margin(provider, wavelength_um - 2 * step_um, wavelength_um + 2 * step_um)

    n = provider.n_eff(wavelength_um, geometry_um)
    n_plus = provider.n_eff(wavelength_um + step_um, geometry_um)
    n_minus = provider.n_eff(wavelength_um - step_um, geometry_um)
    return _scalar(n - wavelength_um * (n_plus - n_minus) / (2 * step_um))


def beta2(provider: DispersionProvider, wavelength_um, geometry_um, relative_step: float = 1e-4):
    """
    Group-velocity dispersion d^2k/dw^2 in ps^2/m with a 5-point stencil in w.
    """
    wavelength_um = np.asarray(wavelength_um, dtype=float)
    omega = 2 * np.pi * c / (wavelength_um * 1e-6)
    h = relative_step * omega

    k = {}
    for j in (-2, -1, 0, 1, 2):
        omega_j = omega + j * h
        wavelength_j = 2 * np.pi * c / omega_j * 1e6
        if j in (-2, 2):
            _check_margin(provider, wavelength_j, wavelength_j)
        k[j] = provider.n_eff(wavelength_j, geometry_um) * omega_j / c

    d2k = (-k[2] + 16 * k[1] - 30 * k[0] + 16 * k[-1] - k[-2]) / (12 * h ** 2)
    return _scalar(d2k * PS2)


def propagation_constant(provider: DispersionProvider, omega, geometry_um) -> np.ndarray:
    """k = n_eff w / c in 1/m, broadcasting over frequency and geometry."""
    omega = np.asarray(omega, dtype=float)
    wavelength_um = 2 * np.pi * c / omega * 1e6
    return provider.n_eff(wavelength_um, geometry_um) * omega / c


def omega_from_nm(wavelength_nm):
    return 2 * np.pi * c / (np.asarray(wavelength_nm, dtype=float) * 1e-9)


def nm_from_omega(omega):
    return 2 * np.pi * c / np.asarray(omega, dtype=float) * 1e9


def _check_margin(provider: DispersionProvider, low_um, high_um) -> None:
    lo, hi = provider.wavelength_range_um
    if np.any(np.asarray(low_um) < lo) or np.any(np.asarray(high_um) > hi):
        raise DomainError(f'finite-difference stencil leaves the wavelength domain [{lo}, {hi}] um')


def _scalar(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value
