import numpy as np

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple
from scipy.constants import c

from taper_sfwm.dispersion.calc_dispersion import nm_from_omega, omega_from_nm
from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import DomainError
from taper_sfwm.modes.calc_overlap import ModeSizeModel
from taper_sfwm.propagation.calc_coupling import cw_terms
from taper_sfwm.pump.pump_source import ContinuousPump


@dataclass(frozen=True)
class SidebandResult:
    order: int
    omega_shift: float
    resonant: bool
    signal_nm: float
    idler_nm: float


def nonlinear_coefficient(n2: float, wavelength_um: float, area_um2: float) -> float:
    """gamma = n2 w / (c S) in 1/(W m)."""
    if not area_um2 > 0:
        raise DomainError('mode area must be positive')
    omega = 2 * np.pi * c / (wavelength_um * 1e-6)
    return n2 * omega / (c * area_um2 * 1e-12)


def mi_sidebands(beta2_ps2_per_m: float,
                 gamma_per_W_m: float,
                 power_W: float,
                 period_m: float,
                 orders: Iterable[int],
                 pump_wavelength_nm: float) -> List[SidebandResult]:
    """
    Modulation-instability sidebands of a periodically modulated waveguide,
    W_l = sqrt((2 pi l / period - 2 gamma P) / beta2).

    An order whose radicand is negative is reported as non-resonant.
    """
    if not beta2_ps2_per_m > 0:
        raise DomainError('sidebands need normal dispersion, beta2 > 0')
    if not period_m > 0:
        raise DomainError('tapering period must be positive')

    beta2 = beta2_ps2_per_m * 1e-24
    omega_p = float(omega_from_nm(pump_wavelength_nm))

    results = []
    for order in orders:
        if isinstance(order, bool) or int(order) != order or order < 0:
            raise DomainError(f'sideband order must be a non-negative integer, got {order}')
        radicand = (2 * np.pi * order / period_m - 2 * gamma_per_W_m * power_W) / beta2
        if radicand < 0:
            results.append(SidebandResult(int(order), float('nan'), False, float('nan'), float('nan')))
            continue
        shift = float(np.sqrt(radicand))
        results.append(SidebandResult(int(order), shift, True,
                                      float(nm_from_omega(omega_p + shift)),
                                      float(nm_from_omega(omega_p - shift))))
    return results


def phase_matching_period(provider: DispersionProvider,
                          pump: ContinuousPump,
                          n2: float,
                          signal_nm,
                          geometry_um: float,
                          mode_size: Optional[ModeSizeModel] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nonlinear phase mismatch at a fixed geometry and the first-order tapering
    period 2 pi / |delta_kappa| that compensates it.
    """
    omega_s = omega_from_nm(np.atleast_1d(signal_nm))
    _, _, dk = cw_terms(provider, pump, n2, omega_s, np.array([geometry_um]), mode_size)
    dk = dk[:, 0]
    with np.errstate(divide='ignore'):
        period = 2 * np.pi / np.abs(dk)
    return dk, period
