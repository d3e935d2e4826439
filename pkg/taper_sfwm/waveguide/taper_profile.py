import numpy as np

from dataclasses import dataclass, field, replace
from typing import Dict, List

from taper_sfwm.exceptions import DomainError


@dataclass(frozen=True)
class TaperProfile:
    """
    Sinusoidally tapered waveguide g(z) = g_av [1 - delta cos(2 pi z / period)].

    Attributes
    ----------
    average_um : float
        Average geometry parameter g_av (fibre pitch or planar width).
    modulation_depth : float
        Relative modulation depth delta, 0 <= delta < 1.
    period_m : float
        Tapering period.
    periods : int
        Number of periods M; the length is M * period_m.
    steps_per_period : int
        Elements per period.
    kind : str
        'fibre' or 'planar', descriptive.
    """

    average_um: float
    modulation_depth: float
    period_m: float
    periods: int
    steps_per_period: int = 200
    kind: str = 'fibre'
    metadata: Dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.average_um > 0:
            raise DomainError('average geometry must be positive')
        if not 0.0 <= self.modulation_depth < 1.0:
            raise DomainError(f'modulation depth {self.modulation_depth} outside [0, 1)')
        if not self.period_m > 0:
            raise DomainError('tapering period must be positive')
        if int(self.periods) != self.periods or self.periods < 1:
            raise DomainError('period count must be a positive integer')
        if int(self.steps_per_period) != self.steps_per_period or self.steps_per_period < 1:
            raise DomainError('steps per period must be a positive integer')
        if self.kind not in ('fibre', 'planar'):
            raise DomainError(f'unknown waveguide kind {self.kind!r}')

    @property
    def length(self) -> float:
        return self.periods * self.period_m

    @property
    def element_length(self) -> float:
        return self.period_m / self.steps_per_period

    @property
    def element_count(self) -> int:
        return self.periods * self.steps_per_period

    def with_changes(self, **fields) -> 'TaperProfile':
        return replace(self, **fields)


@dataclass(frozen=True)
class Element:
    z_m: float
    thickness_m: float
    geometry_um: float


def geometry_at(profile: TaperProfile, z):
    """Geometry parameter (um) at position(s) z in [0, L]."""
    z = np.asarray(z, dtype=float)
    slack = 1e-12 * profile.length
    if np.any(z < -slack) or np.any(z > profile.length + slack):
        raise DomainError(f'position outside [0, {profile.length}] m')

    g = profile.average_um * (1.0 - profile.modulation_depth * np.cos(2 * np.pi * z / profile.period_m))
    return g.item() if g.ndim == 0 else g


def element_geometries(profile: TaperProfile) -> np.ndarray:
    """Midpoint geometries of the elements of one period."""
    midpoints = (np.arange(profile.steps_per_period) + 0.5) * profile.element_length
    return np.atleast_1d(geometry_at(profile, midpoints))


def discretize(profile: TaperProfile) -> List[Element]:
    """Splits [0, L] into M * steps_per_period elements of equal thickness."""
    dz = profile.element_length
    samples = element_geometries(profile)
    return [Element(z_m=m * dz, thickness_m=dz, geometry_um=float(samples[m % profile.steps_per_period]))
            for m in range(profile.element_count)]
