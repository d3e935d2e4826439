import warnings
import numpy as np

from dataclasses import dataclass
from typing import Optional, Tuple

from taper_sfwm.exceptions import CouplingStrengthWarning, PropagationOverflowError


COUPLING_WARNING_THRESHOLD = 0.1
OVERFLOW_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """
    Heisenberg-picture map (b_s(L), b_i^dag(L)) = T (b_s(0), b_i^dag(0)).

    Entries are complex scalars or arrays over a batch of independent modes.
    """

    t11: np.ndarray
    t12: np.ndarray
    t21: np.ndarray
    t22: np.ndarray

    @property
    def expected_photons(self):
        """<N> for an initial vacuum, |T12|^2."""
        return np.abs(self.t12) ** 2

    @property
    def bogoliubov_residual(self):
        return np.abs(self.t11) ** 2 - np.abs(self.t12) ** 2 - 1.0

    def __matmul__(self, other: 'TransferMatrix') -> 'TransferMatrix':
        return TransferMatrix(self.t11 * other.t11 + self.t12 * other.t21,
                              self.t11 * other.t12 + self.t12 * other.t22,
                              self.t21 * other.t11 + self.t22 * other.t21,
                              self.t21 * other.t12 + self.t22 * other.t22)


def accumulate_phase(delta_kappa, dz: float) -> np.ndarray:
    """
    Phase mismatch at element boundaries, sum_{m' < m} dk_m' dz along the last axis.

    The result has one more entry than the input and starts at zero.
    """
    delta_kappa = np.asarray(delta_kappa, dtype=float)
    steps = np.cumsum(delta_kappa * dz, axis=-1)
    zero = np.zeros(delta_kappa.shape[:-1] + (1,))
    return np.concatenate([zero, steps], axis=-1)


def midpoint_phase(delta_kappa, dz: float) -> np.ndarray:
    """Accumulated phase at element midpoints."""
    delta_kappa = np.asarray(delta_kappa, dtype=float)
    return accumulate_phase(delta_kappa, dz)[..., :-1] + delta_kappa * dz / 2.0


def element_offdiag(gamma, phase, dz: float):
    """f = j gamma dz exp(j phase)."""
    return 1j * np.asarray(gamma) * dz * np.exp(1j * np.asarray(phase))


def element_matrix_cw(gamma, phase, dz: float) -> TransferMatrix:
    return _element_matrix(element_offdiag(gamma, phase, dz))


def element_matrix_pulsed(pair_gammas, pair_phases, dz: float) -> TransferMatrix:
    """Element matrix whose coupling sums the contributions of every pump pair (axis 0)."""
    f = np.sum(element_offdiag(pair_gammas, pair_phases, dz), axis=0)
    return _element_matrix(f)


def _element_matrix(f) -> TransferMatrix:
    _warn_strong_coupling(f)
    one = np.ones_like(f)
    return TransferMatrix(one, f, np.conj(f), one)


def _warn_strong_coupling(f) -> None:
    peak = np.max(np.abs(f)) if np.size(f) else 0.0
    if peak >= COUPLING_WARNING_THRESHOLD:
        warnings.warn(f'element coupling |f| = {peak:.3g} reaches {COUPLING_WARNING_THRESHOLD}; '
                      'increase steps_per_period', CouplingStrengthWarning, stacklevel=3)


def propagate(offdiag: np.ndarray,
              record_path: bool = False) -> Tuple[TransferMatrix, Optional[np.ndarray]]:
    """
    Multiplies the element matrices in descending order, T = T_E ... T_1.

    Parameters
    ----------
    offdiag : np.ndarray
        Element couplings f of shape (batch, elements).
    record_path : bool
        Also return |T12|^2 at every element boundary, shape (batch, elements + 1).

    Raises
    ------
    PropagationOverflowError
        If |T11| exceeds 1e12 for any mode.
    """
    offdiag = np.atleast_2d(np.asarray(offdiag, dtype=complex))
    _warn_strong_coupling(offdiag)

    batch, elements = offdiag.shape
    by_element = np.ascontiguousarray(offdiag.T)
    conj = np.conj(by_element)

    ones = np.ones(batch, dtype=complex)
    total = TransferMatrix(ones, np.zeros(batch, dtype=complex), np.zeros(batch, dtype=complex), ones)

    path = None
    if record_path:
        path = np.zeros((batch, elements + 1))

    for m in range(elements):
        total = TransferMatrix(ones, by_element[m], conj[m], ones) @ total
        if record_path:
            path[:, m + 1] = total.expected_photons
        if m % 1024 == 1023:
            _check_overflow(total.t11)

    _check_overflow(total.t11)
    return total, path


def _check_overflow(t11: np.ndarray) -> None:
    if not np.all(np.isfinite(t11)) or np.max(np.abs(t11)) > OVERFLOW_LIMIT:
        raise PropagationOverflowError('|T11| exceeded 1e12; the gain is unphysically large')


def uniform_matrix(gamma: float, length: float) -> TransferMatrix:
    """Closed-form phase-matched solution of a uniform waveguide."""
    g = gamma * length
    return TransferMatrix(np.cosh(g), 1j * np.sinh(g), -1j * np.sinh(g), np.cosh(g))
