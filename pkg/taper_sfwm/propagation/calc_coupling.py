import numpy as np

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple
from scipy.constants import c
from scipy.interpolate import CubicSpline

from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import EnergyConservationError
from taper_sfwm.modes.calc_overlap import ModeSizeModel, gaussian_area, gaussian_fwm, gaussian_xpm
from taper_sfwm.propagation.calc_transfer_matrix import (element_matrix_cw, element_matrix_pulsed, element_offdiag,
                                                        midpoint_phase)
from taper_sfwm.pump.pump_source import (ContinuousPump, PulsedPump, PumpComponent, PumpSource,
                                         component_intensity, cw_intensity, pump_kappa_cw,
                                         pump_kappa_two, signal_kappa, spectral_weight)
from taper_sfwm.waveguide.taper_profile import TaperProfile, element_geometries, geometry_at


# pump pairs within this fraction of the grid spacing of the centre are degenerate
DEGENERACY_TOLERANCE = 1e-6
# pairs whose relative spectral weight is below this are skipped
PAIR_CUTOFF = 1e-12


def gamma_cw(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm, n2, intensity):
    """
    Coupling of a degenerate pump, (2 n2 I / c) sqrt(w_s w_i / (n_s n_i S_s S_i)) O_fwm.

    Areas and the overlap only enter as the ratio O / sqrt(S_s S_i), so any common
    area unit works.
    """
    return 2.0 * n2 * intensity / c * _mode_factor(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm)


def gamma_pair(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm, n2, intensity_1, intensity_2):
    """Coupling of a nondegenerate pump pair, prefactor 4 n2 sqrt(I1 I2) / c."""
    prefactor = 4.0 * n2 * np.sqrt(intensity_1 * intensity_2) / c
    return prefactor * _mode_factor(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm)


def gamma_pulsed(omega_s, omega_i, p1: PumpComponent, p2: PumpComponent,
                 n_s, n_i, area_s, area_i, overlap_fwm, n2, tolerance: Optional[float] = None):
    """
    Coupling of the pump pair (p1, p2); a degenerate pair uses the CW prefactor.

    Raises
    ------
    EnergyConservationError
        If w_p1 + w_p2 differs from w_s + w_i by more than the tolerance.
    """
    if tolerance is None:
        tolerance = 1e-9 * (omega_s + omega_i)
    if abs(p1.omega + p2.omega - omega_s - omega_i) > tolerance:
        raise EnergyConservationError('pump pair frequencies do not add up to the signal and idler')
    if abs(p1.omega - p2.omega) <= tolerance:
        return gamma_cw(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm, n2, p1.intensity)
    return gamma_pair(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm, n2,
                      p1.intensity, p2.intensity)


def delta_kappa(kappa_p1, kappa_p2, kappa_s, kappa_i):
    """Phase mismatch; the signal and idler are added first so swapping them is exact."""
    return (kappa_p1 + kappa_p2) - (kappa_s + kappa_i)


def _mode_factor(omega_s, omega_i, n_s, n_i, area_s, area_i, overlap_fwm):
    return np.sqrt((omega_s * omega_i) / ((n_s * n_i) * (area_s * area_i))) * overlap_fwm


@dataclass(frozen=True)
class _Wave:
    k: np.ndarray
    n: np.ndarray
    radius: np.ndarray
    area: np.ndarray


def _wave(provider: DispersionProvider, mode_size: ModeSizeModel, omega, geometry_um) -> _Wave:
    omega = np.asarray(omega, dtype=float)
    wavelength_um = 2 * np.pi * c / omega * 1e6
    n = provider.n_eff(wavelength_um, geometry_um)
    radius = mode_size.radius(provider, wavelength_um, geometry_um)
    return _Wave(k=n * omega / c, n=n, radius=radius, area=gaussian_area(radius, mode_size.amplitude))


def cw_terms(provider: DispersionProvider,
             pump: ContinuousPump,
             n2: float,
             omega_s: np.ndarray,
             geometry_um: np.ndarray,
             mode_size: Optional[ModeSizeModel] = None,
             omega_i: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Coupling and phase mismatch of a CW pump for a batch of modes and a set of geometries.

    Returns
    -------
    omega_i : np.ndarray
        Paired idler frequencies 2 w_p - w_s, shape (batch,).
    gamma, delta_kappa : np.ndarray
        Shape (batch, geometries).
    """
    mode_size = mode_size or ModeSizeModel()
    a = mode_size.amplitude
    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    omega_i = 2.0 * pump.omega - omega_s if omega_i is None else np.atleast_1d(omega_i)
    geometry_um = np.atleast_1d(geometry_um)

    p = _wave(provider, mode_size, pump.omega, geometry_um)
    s = _wave(provider, mode_size, omega_s[:, None], geometry_um[None, :])
    i = _wave(provider, mode_size, omega_i[:, None], geometry_um[None, :])

    intensity = cw_intensity(pump.power_W, p.area)
    kappa_p = pump_kappa_cw(p.k, p.n, n2, intensity, p.area, gaussian_xpm(p.radius, p.radius, a, a))
    kappa_s = signal_kappa(s.k, s.n, n2, (intensity,), s.area, (gaussian_xpm(p.radius, s.radius, a, a),))
    kappa_i = signal_kappa(i.k, i.n, n2, (intensity,), i.area, (gaussian_xpm(p.radius, i.radius, a, a),))

    overlap = gaussian_fwm(p.radius, p.radius, s.radius, i.radius, (a, a, a, a))
    gamma = gamma_cw(omega_s[:, None], omega_i[:, None], s.n, i.n, s.area, i.area, overlap, n2, intensity)
    return omega_i, gamma, delta_kappa(kappa_p, kappa_p, kappa_s, kappa_i)


def pulsed_terms(provider: DispersionProvider,
                 pulse: PulsedPump,
                 n2: float,
                 omega_s: np.ndarray,
                 omega_i: np.ndarray,
                 geometry_um: np.ndarray,
                 mode_size: Optional[ModeSizeModel] = None,
                 cutoff: float = PAIR_CUTOFF) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Yields, for every pump component w_p1 of the grid, the modes it couples and the
    coupling and phase mismatch of the pair (w_p1, w_s + w_i - w_p1).

    Only w_p1 <= (w_s + w_i)/2 is taken so that each unordered pair appears once.
    The partner w_p2 need not lie on the grid; its intensity comes from the closed
    form of the spectrum. Each pair carries only its own SPM and XPM.

    Yields
    ------
    rows : np.ndarray
        Indices of the batch modes this pair contributes to.
    gamma, delta_kappa : np.ndarray
        Shape (len(rows), geometries).
    """
    mode_size = mode_size or ModeSizeModel()
    a = mode_size.amplitude
    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    omega_i = np.atleast_1d(np.asarray(omega_i, dtype=float))
    geometry_um = np.atleast_1d(geometry_um)

    total = omega_s + omega_i
    centre = total / 2.0
    tolerance = DEGENERACY_TOLERANCE * pulse.delta_omega

    signal = _wave(provider, mode_size, omega_s[:, None], geometry_um[None, :])
    idler = _wave(provider, mode_size, omega_i[:, None], geometry_um[None, :])

    for omega_1 in pulse.grid():
        omega_2 = total - omega_1
        weight = spectral_weight(pulse, omega_1) * spectral_weight(pulse, omega_2)
        rows = np.nonzero((omega_1 <= centre + tolerance) & (weight >= cutoff))[0]
        if rows.size == 0:
            continue

        degenerate = (np.abs(omega_1 - centre[rows]) <= tolerance)[:, None]
        s = _take(signal, rows)
        i = _take(idler, rows)
        p1 = _wave(provider, mode_size, omega_1, geometry_um)
        p2 = _wave(provider, mode_size, omega_2[rows, None], geometry_um[None, :])

        intensity_1 = component_intensity(pulse, omega_1, p1.area)
        intensity_2 = component_intensity(pulse, omega_2[rows, None], p2.area)

        o11 = gaussian_xpm(p1.radius, p1.radius, a, a)
        o22 = gaussian_xpm(p2.radius, p2.radius, a, a)
        o12 = gaussian_xpm(p1.radius, p2.radius, a, a)
        o1s, o2s = gaussian_xpm(p1.radius, s.radius, a, a), gaussian_xpm(p2.radius, s.radius, a, a)
        o1i, o2i = gaussian_xpm(p1.radius, i.radius, a, a), gaussian_xpm(p2.radius, i.radius, a, a)

        kappa_1 = pump_kappa_two(p1.k, p1.n, n2, intensity_1, intensity_2, p1.area, o11, o12)
        kappa_2 = pump_kappa_two(p2.k, p2.n, n2, intensity_2, intensity_1, p2.area, o22, o12)
        kappa_s = signal_kappa(s.k, s.n, n2, (intensity_1, intensity_2), s.area, (o1s, o2s))
        kappa_i = signal_kappa(i.k, i.n, n2, (intensity_1, intensity_2), i.area, (o1i, o2i))

        overlap = gaussian_fwm(p1.radius, p2.radius, s.radius, i.radius, (a, a, a, a))
        ws, wi = omega_s[rows, None], omega_i[rows, None]
        gamma = gamma_pair(ws, wi, s.n, i.n, s.area, i.area, overlap, n2, intensity_1, intensity_2)

        if degenerate.any():
            kappa_p = pump_kappa_cw(p1.k, p1.n, n2, intensity_1, p1.area, o11)
            kappa_1 = np.where(degenerate, kappa_p, kappa_1)
            kappa_2 = np.where(degenerate, kappa_p, kappa_2)
            kappa_s = np.where(degenerate, signal_kappa(s.k, s.n, n2, (intensity_1,), s.area, (o1s,)), kappa_s)
            kappa_i = np.where(degenerate, signal_kappa(i.k, i.n, n2, (intensity_1,), i.area, (o1i,)), kappa_i)
            gamma = np.where(degenerate,
                             gamma_cw(ws, wi, s.n, i.n, s.area, i.area, overlap, n2, intensity_1),
                             gamma)

        yield rows, gamma, delta_kappa(kappa_1, kappa_2, kappa_s, kappa_i)


def _take(wave: _Wave, rows: np.ndarray) -> _Wave:
    return _Wave(wave.k[rows], wave.n[rows], wave.radius[rows], wave.area[rows])


@dataclass(frozen=True, eq=False)
class CouplingContext:
    """
    Element couplings of a batch of independent signal/idler modes.

    Attributes
    ----------
    omega_s, omega_i : np.ndarray
        Signal and idler frequencies, shape (batch,).
    dz : float
        Element thickness.
    offdiag : np.ndarray
        Element couplings f, shape (batch, elements).
    pairs : int
        Pump pairs summed into each element (1 for a CW pump).
    """

    omega_s: np.ndarray
    omega_i: np.ndarray
    dz: float
    offdiag: np.ndarray
    pairs: int = 1

    @classmethod
    def stack(cls, contexts: Sequence['CouplingContext']) -> 'CouplingContext':
        return cls(omega_s=np.concatenate([ctx.omega_s for ctx in contexts]),
                   omega_i=np.concatenate([ctx.omega_i for ctx in contexts]),
                   dz=contexts[0].dz,
                   offdiag=np.concatenate([ctx.offdiag for ctx in contexts], axis=0),
                   pairs=max(ctx.pairs for ctx in contexts))


def _tiled_terms(profile: TaperProfile, gamma: np.ndarray, dk: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # one period of samples repeated M times
    reps = (1, profile.periods)
    return np.tile(gamma, reps), midpoint_phase(np.tile(dk, reps), profile.element_length)


def build_cw_coupling(profile: TaperProfile,
                      provider: DispersionProvider,
                      pump: ContinuousPump,
                      n2: float,
                      omega_s,
                      mode_size: Optional[ModeSizeModel] = None,
                      omega_i=None) -> CouplingContext:
    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    omega_i, gamma, dk = cw_terms(provider, pump, n2, omega_s, element_geometries(profile), mode_size, omega_i)
    element = element_matrix_cw(*_tiled_terms(profile, gamma, dk), profile.element_length)
    return CouplingContext(omega_s, omega_i, profile.element_length, element.t12)


def build_pulsed_coupling(profile: TaperProfile,
                          provider: DispersionProvider,
                          pulse: PulsedPump,
                          n2: float,
                          omega_s,
                          omega_i,
                          mode_size: Optional[ModeSizeModel] = None,
                          cutoff: float = PAIR_CUTOFF) -> CouplingContext:
    omega_s, omega_i = np.broadcast_arrays(np.atleast_1d(np.asarray(omega_s, dtype=float)),
                                           np.atleast_1d(np.asarray(omega_i, dtype=float)))
    offdiag = np.zeros((omega_s.size, profile.element_count), dtype=complex)

    pairs = 0
    for rows, gamma, dk in pulsed_terms(provider, pulse, n2, omega_s, omega_i,
                                        element_geometries(profile), mode_size, cutoff):
        offdiag[rows] += element_offdiag(*_tiled_terms(profile, gamma, dk), profile.element_length)
        pairs += 1
    return CouplingContext(omega_s.copy(), omega_i.copy(), profile.element_length, offdiag, pairs)


def build_coupling(profile: TaperProfile,
                   provider: DispersionProvider,
                   pump: PumpSource,
                   n2: float,
                   omega_s,
                   omega_i=None,
                   mode_size: Optional[ModeSizeModel] = None) -> CouplingContext:
    """CW or pulsed coupling; a pulsed pump pairs w_s with 2 w_0 - w_s unless w_i is given."""
    match pump:
        case ContinuousPump():
            return build_cw_coupling(profile, provider, pump, n2, omega_s, mode_size, omega_i)
        case PulsedPump():
            if omega_i is None:
                omega_i = 2.0 * pump.omega - np.asarray(omega_s, dtype=float)
            return build_pulsed_coupling(profile, provider, pump, n2, omega_s, omega_i, mode_size)
    raise TypeError(f'unsupported pump {type(pump).__name__}')


@dataclass(frozen=True, eq=False)
class PairCoupling:
    """
    Position-dependent coupling of one signal/idler mode.

    Both callables map z (scalar or array) to arrays with the pump pairs on axis 0.
    """

    gamma: Callable[[np.ndarray], np.ndarray]
    delta_kappa: Callable[[np.ndarray], np.ndarray]


def coupling_functions(profile: TaperProfile,
                       provider: DispersionProvider,
                       pump: PumpSource,
                       n2: float,
                       omega_s: float,
                       omega_i: Optional[float] = None,
                       mode_size: Optional[ModeSizeModel] = None,
                       samples: int = 257) -> PairCoupling:
    """
    Smooth gamma(z) and delta_kappa(z) of one mode for the ODE oracle, from cubic
    splines of their dependence on the local geometry.
    """
    lo = profile.average_um * (1.0 - profile.modulation_depth)
    hi = profile.average_um * (1.0 + profile.modulation_depth)
    geometry = np.linspace(lo, hi, samples) if hi > lo else np.array([profile.average_um])

    if isinstance(pump, ContinuousPump):
        _, gamma, dk = cw_terms(provider, pump, n2, omega_s, geometry, mode_size,
                                None if omega_i is None else np.atleast_1d(omega_i))
    else:
        if omega_i is None:
            omega_i = 2.0 * pump.omega - omega_s
        terms = list(pulsed_terms(provider, pump, n2, omega_s, omega_i, geometry, mode_size))
        gamma = np.concatenate([g for _, g, _ in terms], axis=0)
        dk = np.concatenate([d for _, _, d in terms], axis=0)

    if geometry.size == 1:
        return PairCoupling(gamma=lambda z: _constant(gamma[:, 0], z),
                            delta_kappa=lambda z: _constant(dk[:, 0], z))

    gamma_spline = CubicSpline(geometry, gamma, axis=1)
    dk_spline = CubicSpline(geometry, dk, axis=1)
    return PairCoupling(gamma=lambda z: gamma_spline(geometry_at(profile, z)),
                        delta_kappa=lambda z: dk_spline(geometry_at(profile, z)))


def _constant(values: np.ndarray, z) -> np.ndarray:
    return np.multiply.outer(values, np.ones_like(np.asarray(z, dtype=float)))


def sampled_offdiag(profile: TaperProfile, coupling: PairCoupling) -> np.ndarray:
    """Element couplings of the full structure sampled from position-dependent functions, shape (1, E)."""
    dz = profile.element_length
    z = (np.arange(profile.element_count) + 0.5) * dz
    gamma = np.atleast_2d(coupling.gamma(z))
    phase = midpoint_phase(np.atleast_2d(coupling.delta_kappa(z)), dz)
    return element_matrix_pulsed(gamma, phase, dz).t12[None, :]
