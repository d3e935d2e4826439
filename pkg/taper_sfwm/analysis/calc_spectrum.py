import numpy as np

from dataclasses import dataclass
from typing import Optional

from taper_sfwm.dispersion.calc_dispersion import nm_from_omega, omega_from_nm
from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import DomainError
from taper_sfwm.modes.calc_overlap import ModeSizeModel
from taper_sfwm.propagation.calc_coupling import build_coupling, build_pulsed_coupling
from taper_sfwm.propagation.calc_transfer_matrix import propagate
from taper_sfwm.pump.pump_source import PulsedPump, PumpSource
from taper_sfwm.utils.parallel import map_chunks_concat
from taper_sfwm.waveguide.taper_profile import TaperProfile


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    Expected photon number per signal mode.

    Attributes
    ----------
    signal_nm, idler_nm : np.ndarray
    photons : np.ndarray
    reference : np.ndarray, optional
        Photon numbers of the untapered waveguide (delta = 0).
    enhancement_db : np.ndarray, optional
        10 log10(photons / reference).
    """

    signal_nm: np.ndarray
    idler_nm: np.ndarray
    photons: np.ndarray
    reference: Optional[np.ndarray] = None
    enhancement_db: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    signal_nm: np.ndarray
    idler_nm: np.ndarray
    amplitude: np.ndarray

    @property
    def jsi(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True, eq=False)
class GrowthCurve:
    z_m: np.ndarray
    photons: np.ndarray
    steps_per_period: int


def exclude_pump(signal_nm, pump_nm: float) -> np.ndarray:
    """Drops grid points that coincide with the pump wavelength."""
    signal_nm = np.asarray(signal_nm, dtype=float)
    return signal_nm[~np.isclose(signal_nm, pump_nm, rtol=1e-12, atol=0.0)]


def photon_numbers(profile: TaperProfile,
                   provider: DispersionProvider,
                   pump: PumpSource,
                   n2: float,
                   omega_s: np.ndarray,
                   omega_i: Optional[np.ndarray] = None,
                   mode_size: Optional[ModeSizeModel] = None,
                   chunk_size: int = 32,
                   threads: int = 1) -> np.ndarray:
    """<N> of every signal mode, evaluated in fixed chunks."""
    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    if omega_i is not None:
        omega_i = np.broadcast_to(np.asarray(omega_i, dtype=float), omega_s.shape)

    def evaluate(chunk: slice) -> np.ndarray:
        partner = None if omega_i is None else omega_i[chunk]
        context = build_coupling(profile, provider, pump, n2, omega_s[chunk], partner, mode_size)
        matrix, _ = propagate(context.offdiag)
        return matrix.expected_photons

    return map_chunks_concat(evaluate, omega_s.size, chunk_size, threads)


def spectrum_cw(profile: TaperProfile,
                provider: DispersionProvider,
                pump: PumpSource,
                n2: float,
                signal_nm,
                mode_size: Optional[ModeSizeModel] = None,
                normalize: bool = False,
                chunk_size: int = 32,
                threads: int = 1) -> SpectrumResult:
    """
    Photon-number spectrum over a signal grid, the idler being 2 w_p - w_s.

    A pulsed pump is paired around its carrier frequency. With normalize, the same
    grid is evaluated for the untapered waveguide and the enhancement is reported.
    """
    signal_nm = exclude_pump(signal_nm, pump.wavelength_um * 1e3)
    if signal_nm.size == 0:
        raise DomainError('the signal grid is empty once the pump wavelength is removed')

    omega_s = omega_from_nm(signal_nm)
    idler_nm = nm_from_omega(2.0 * pump.omega - omega_s)
    photons = photon_numbers(profile, provider, pump, n2, omega_s, None, mode_size, chunk_size, threads)

    if not normalize:
        return SpectrumResult(signal_nm, idler_nm, photons)

    uniform = profile.with_changes(modulation_depth=0.0)
    reference = photon_numbers(uniform, provider, pump, n2, omega_s, None, mode_size, chunk_size, threads)
    return SpectrumResult(signal_nm, idler_nm, photons, reference, decibels(photons, reference))


def decibels(photons, reference) -> np.ndarray:
    with np.errstate(divide='ignore', invalid='ignore'):
        return 10.0 * np.log10(np.asarray(photons) / np.asarray(reference))


def jsi_pulsed(profile: TaperProfile,
               provider: DispersionProvider,
               pulse: PulsedPump,
               n2: float,
               signal_nm,
               idler_nm,
               mode_size: Optional[ModeSizeModel] = None,
               chunk_size: int = 32,
               threads: int = 1) -> JointSpectralAmplitude:
    """Joint spectral amplitude T12(w_s, w_i) on a signal x idler grid."""
    signal_nm = np.asarray(signal_nm, dtype=float)
    idler_nm = np.asarray(idler_nm, dtype=float)
    omega_s, omega_i = np.meshgrid(omega_from_nm(signal_nm), omega_from_nm(idler_nm), indexing='ij')
    omega_s, omega_i = omega_s.ravel(), omega_i.ravel()

    def evaluate(chunk: slice) -> np.ndarray:
        context = build_pulsed_coupling(profile, provider, pulse, n2, omega_s[chunk], omega_i[chunk], mode_size)
        matrix, _ = propagate(context.offdiag)
        return matrix.t12

    amplitude = map_chunks_concat(evaluate, omega_s.size, chunk_size, threads)
    return JointSpectralAmplitude(signal_nm, idler_nm, amplitude.reshape(signal_nm.size, idler_nm.size))


def growth_curve(profile: TaperProfile,
                 provider: DispersionProvider,
                 pump: PumpSource,
                 n2: float,
                 target_signal_nm: float,
                 mode_size: Optional[ModeSizeModel] = None) -> GrowthCurve:
    """<N>(z) of one signal mode at every element boundary."""
    context = build_coupling(profile, provider, pump, n2, omega_from_nm(target_signal_nm), None, mode_size)
    _, path = propagate(context.offdiag, record_path=True)
    z = np.arange(profile.element_count + 1) * profile.element_length
    return GrowthCurve(z, path[0], profile.steps_per_period)


def count_peaks_per_period(curve: GrowthCurve, skip_periods: int = 2) -> float:
    """Mean number of local maxima of <N>(z) per tapering period, after a lead-in."""
    photons = curve.photons[skip_periods * curve.steps_per_period:]
    periods = (photons.size - 1) / curve.steps_per_period
    if periods < 1:
        raise DomainError('growth curve shorter than one period after the lead-in')
    inner = photons[1:-1]
    maxima = np.count_nonzero((inner > photons[:-2]) & (inner >= photons[2:]))
    return maxima / periods


def spectral_peaks(result: SpectrumResult, min_relative_height: float = 0.0) -> np.ndarray:
    """Signal wavelengths (nm) of the local maxima of a spectrum."""
    photons = result.photons
    if photons.size < 3:
        return np.array([])
    inner = photons[1:-1]
    peak = (inner > photons[:-2]) & (inner > photons[2:]) & (inner >= min_relative_height * photons.max())
    return result.signal_nm[1:-1][peak]
