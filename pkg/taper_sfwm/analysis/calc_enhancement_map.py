import numpy as np

from dataclasses import dataclass
from typing import Optional

from taper_sfwm.analysis.calc_spectrum import decibels
from taper_sfwm.dispersion.calc_dispersion import omega_from_nm
from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import DomainError
from taper_sfwm.modes.calc_overlap import ModeSizeModel
from taper_sfwm.propagation.calc_coupling import CouplingContext, build_coupling
from taper_sfwm.propagation.calc_transfer_matrix import propagate
from taper_sfwm.pump.pump_source import PumpSource
from taper_sfwm.utils.parallel import map_chunks
from taper_sfwm.waveguide.taper_profile import TaperProfile


@dataclass(frozen=True, eq=False)
class EnhancementMap:
    """
    Photon-number enhancement over (modulation depth, tapering period).

    Arrays are indexed [delta, period]; the reference is the untapered waveguide
    of the same length M * period.
    """

    deltas: np.ndarray
    periods_m: np.ndarray
    photons: np.ndarray
    reference: np.ndarray
    enhancement_db: np.ndarray


def enhancement_map(profile: TaperProfile,
                    provider: DispersionProvider,
                    pump: PumpSource,
                    n2: float,
                    deltas,
                    periods_m,
                    target_signal_nm: float,
                    mode_size: Optional[ModeSizeModel] = None,
                    threads: int = 1) -> EnhancementMap:
    """
    Enhancement in dB of one signal mode for every (delta, period) pair, with the
    period count M of the profile held fixed.
    """
    deltas = np.asarray(deltas, dtype=float)
    periods_m = np.asarray(periods_m, dtype=float)
    if deltas.ndim != 1 or periods_m.ndim != 1 or deltas.size == 0 or periods_m.size == 0:
        raise DomainError('map axes must be non-empty one-dimensional arrays')

    omega_s = omega_from_nm(target_signal_nm)
    # the untapered row is always evaluated, appended when the axis lacks it
    rows = deltas if np.any(deltas == 0.0) else np.append(deltas, 0.0)
    reference_row = int(np.nonzero(rows == 0.0)[0][0])

    def evaluate(chunk: slice) -> np.ndarray:
        columns = []
        for period in periods_m[chunk]:
            contexts = [build_coupling(profile.with_changes(modulation_depth=float(delta), period_m=float(period)),
                                       provider, pump, n2, omega_s, None, mode_size)
                        for delta in rows]
            matrix, _ = propagate(CouplingContext.stack(contexts).offdiag)
            columns.append(matrix.expected_photons)
        return np.stack(columns, axis=1)

    photons = np.concatenate(map_chunks(evaluate, periods_m.size, 1, threads), axis=1)
    reference = photons[reference_row]
    photons = photons[:deltas.size]
    enhancement = decibels(photons, reference[None, :])
    return EnhancementMap(deltas, periods_m, photons, reference, enhancement)
