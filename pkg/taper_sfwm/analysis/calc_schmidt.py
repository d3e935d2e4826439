import numpy as np

from dataclasses import dataclass
from typing import Union

from taper_sfwm.analysis.calc_spectrum import JointSpectralAmplitude
from taper_sfwm.exceptions import DomainError


@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """
    Attributes
    ----------
    coefficients : np.ndarray
        Schmidt weights in descending order, summing to one.
    purity : float
        sum of squared weights, in (0, 1].
    schmidt_number : float
        1 / purity.
    """

    coefficients: np.ndarray
    purity: float
    schmidt_number: float


def schmidt_purity(jsa: Union[JointSpectralAmplitude, np.ndarray]) -> SchmidtResult:
    """Heralded single-photon purity from the singular values of the JSA."""
    matrix = jsa.amplitude if isinstance(jsa, JointSpectralAmplitude) else np.asarray(jsa)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DomainError('the joint spectral amplitude must be a non-empty matrix')
    if not np.all(np.isfinite(matrix)):
        raise DomainError('the joint spectral amplitude contains non-finite values')

    singular = np.linalg.svd(matrix, compute_uv=False)
    weights = singular ** 2
    total = weights.sum()
    if total == 0.0:
        raise DomainError('the joint spectral amplitude is identically zero')

    coefficients = weights / total
    purity = float(np.sum(coefficients ** 2))
    return SchmidtResult(coefficients, purity, 1.0 / purity)
