import numpy as np

from dataclasses import dataclass
from typing import List, Sequence, Union
from scipy.constants import c

from taper_sfwm.exceptions import DomainError


@dataclass(frozen=True)
class ContinuousPump:
    wavelength_um: float
    power_W: float

    def __post_init__(self) -> None:
        if not self.wavelength_um > 0:
            raise DomainError('pump wavelength must be positive')
        if not self.power_W > 0:
            raise DomainError('pump power must be positive')

    @property
    def omega(self) -> float:
        return 2 * np.pi * c / (self.wavelength_um * 1e-6)


@dataclass(frozen=True)
class PulsedPump:
    """
    Transform-limited Gaussian pulse with spectral amplitude exp(-tau^2 (w - w0)^2 / 2).

    Attributes
    ----------
    wavelength_um : float
        Central wavelength.
    energy_J : float
    tau_s : float
        Temporal width parameter; the intensity FWHM is 2 tau sqrt(ln 2).
    components : int
        Odd number of monochromatic components of the decomposition.
    span_over_tau : float
        Width of the frequency grid in units of 1/tau.
    """

    wavelength_um: float
    energy_J: float
    tau_s: float
    components: int = 129
    span_over_tau: float = 8.0

    def __post_init__(self) -> None:
        if not self.wavelength_um > 0:
            raise DomainError('pump wavelength must be positive')
        if not self.energy_J > 0:
            raise DomainError('pulse energy must be positive')
        if not self.tau_s > 0:
            raise DomainError('pulse duration must be positive')
        if int(self.components) != self.components or self.components < 1 or self.components % 2 == 0:
            raise DomainError('the component count must be a positive odd integer')
        if not self.span_over_tau > 0:
            raise DomainError('spectral span must be positive')

    @property
    def omega(self) -> float:
        return 2 * np.pi * c / (self.wavelength_um * 1e-6)

    @property
    def delta_omega(self) -> float:
        """Grid spacing; a single component gets the full span."""
        span = self.span_over_tau / self.tau_s
        return span / (self.components - 1) if self.components > 1 else span

    def grid(self) -> np.ndarray:
        """Component frequencies, symmetric about the carrier."""
        offsets = np.arange(self.components) - (self.components - 1) // 2
        return self.omega + offsets * self.delta_omega


PumpSource = Union[ContinuousPump, PulsedPump]


@dataclass(frozen=True)
class PumpComponent:
    omega: float
    intensity: float
    weight: float


def cw_intensity(power_W, area_um2):
    """I = P / S in W/m^2."""
    area_um2 = np.asarray(area_um2, dtype=float)
    if np.any(area_um2 <= 0):
        raise DomainError('pump mode area must be positive')
    return power_W / (area_um2 * 1e-12)


def spectral_weight(pulse: PulsedPump, omega):
    return np.exp(-pulse.tau_s ** 2 * (np.asarray(omega) - pulse.omega) ** 2 / 2.0)


def component_intensity(pulse: PulsedPump, omega, area_um2, delta_omega: float = None):
    """
    Intensity of the monochromatic component at omega,
    I = E tau dw^2 / (2 pi sqrt(pi) S) exp(-tau^2 (w - w0)^2).
    """
    area_um2 = np.asarray(area_um2, dtype=float)
    if np.any(area_um2 <= 0):
        raise DomainError('pump mode area must be positive')
    if delta_omega is None:
        delta_omega = pulse.delta_omega
    prefactor = pulse.energy_J * pulse.tau_s * delta_omega ** 2 / (2 * np.pi * np.sqrt(np.pi))
    return prefactor / (area_um2 * 1e-12) * spectral_weight(pulse, omega) ** 2


def decompose_pulse(pulse: PulsedPump, pump_area_um2: float) -> List[PumpComponent]:
    omegas = pulse.grid()
    intensities = component_intensity(pulse, omegas, pump_area_um2)
    weights = spectral_weight(pulse, omegas)
    return [PumpComponent(float(w), float(i), float(s)) for w, i, s in zip(omegas, intensities, weights)]


def pulse_energy(components: Sequence[PumpComponent], pump_area_um2: float, delta_omega: float) -> float:
    """Energy carried by a decomposition, sum_p I_p S_p 2 pi / dw."""
    intensities = np.array([p.intensity for p in components])
    return float(np.sum(intensities) * pump_area_um2 * 1e-12 * 2 * np.pi / delta_omega)


def pulse_envelope(pulse: PulsedPump, t) -> np.ndarray:
    """Complex envelope rebuilt from the decomposed spectrum, peak-normalised."""
    t = np.asarray(t, dtype=float)
    detuning = pulse.grid() - pulse.omega
    weights = spectral_weight(pulse, pulse.grid())
    envelope = np.exp(-1j * np.multiply.outer(t, detuning)) @ weights
    return envelope / np.sum(weights)


def temporal_fwhm(pulse: PulsedPump, samples: int = 8001) -> float:
    """Intensity FWHM of the rebuilt envelope, from interpolated half-maximum crossings."""
    t = np.linspace(-4 * pulse.tau_s, 4 * pulse.tau_s, samples)
    intensity = np.abs(pulse_envelope(pulse, t)) ** 2
    half = intensity.max() / 2.0

    above = np.nonzero(intensity >= half)[0]
    first, last = above[0], above[-1]
    if first == 0 or last == samples - 1:
        raise DomainError('pulse wider than the sampling window')

    left = np.interp(half, intensity[first - 1:first + 1], t[first - 1:first + 1])
    right = np.interp(half, intensity[last:last + 2][::-1], t[last:last + 2][::-1])
    return float(right - left)


def tau_from_fwhm(fwhm_s: float) -> float:
    if not fwhm_s > 0:
        raise DomainError('FWHM must be positive')
    return fwhm_s / (2 * np.sqrt(np.log(2)))


def pump_kappa_cw(k_p, n_p, n2, intensity, area_um2, self_overlap_um2):
    """Pump propagation constant with self-phase modulation."""
    return k_p * (1.0 + n2 * intensity * self_overlap_um2 / (n_p ** 2 * area_um2))


def pump_kappa_two(k_pu, n_pu, n2, intensity_u, intensity_v, area_u_um2, overlap_uu_um2, overlap_uv_um2):
    """Propagation constant of pump component u with SPM and XPM from component v."""
    nonlinear = intensity_u * overlap_uu_um2 + 2.0 * intensity_v * overlap_uv_um2
    return k_pu * (1.0 + n2 * nonlinear / (n_pu ** 2 * area_u_um2))


def signal_kappa(k_q, n_q, n2, intensities, area_q_um2, overlaps_um2):
    """Signal or idler propagation constant with XPM from one or two pump components."""
    nonlinear = sum(i * o for i, o in zip(intensities, overlaps_um2))
    return k_q * (1.0 + 4.0 * n2 * nonlinear / (n_q ** 2 * area_q_um2))
