import csv
import numpy as np

from dataclasses import dataclass, field
from typing import Dict, Optional
from scipy.interpolate import RegularGridInterpolator

from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.exceptions import ConfigError, DomainError
from taper_sfwm.modes.calc_overlap import radius_from_area


@dataclass(frozen=True, eq=False)
class DispersionTable:
    """
    Tabulated effective index (and optionally mode area) of a guided mode.

    Attributes
    ----------
    geometry_um : np.ndarray
        Strictly increasing geometry axis (pitch or width).
    wavelength_um : np.ndarray
        Strictly increasing wavelength axis.
    n_eff : np.ndarray
        Grid of shape (len(geometry_um), len(wavelength_um)).
    area_um2 : np.ndarray, optional
        Mode-area grid with the same shape as n_eff.
    metadata : dict
        Free-form description, e.g. the planar core thickness.
    """

    geometry_um: np.ndarray
    wavelength_um: np.ndarray
    n_eff: np.ndarray
    area_um2: Optional[np.ndarray] = None
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ('geometry_um', 'wavelength_um', 'n_eff', 'area_um2'):
            value = getattr(self, name)
            if value is None:
                continue
            value = np.array(value, dtype=float)
            value.setflags(write=False)
            object.__setattr__(self, name, value)

        shape = (self.geometry_um.size, self.wavelength_um.size)
        if self.geometry_um.ndim != 1 or self.wavelength_um.ndim != 1:
            raise DomainError('table axes must be one-dimensional')
        if min(shape) < 2:
            raise DomainError('table axes need at least two nodes each')
        if np.any(np.diff(self.geometry_um) <= 0) or np.any(np.diff(self.wavelength_um) <= 0):
            raise DomainError('table axes must be strictly increasing')
        if self.n_eff.shape != shape:
            raise DomainError(f'n_eff grid has shape {self.n_eff.shape}, expected {shape}')
        if np.any(self.n_eff <= 0):
            raise DomainError('n_eff must be strictly positive')
        if self.area_um2 is not None:
            if self.area_um2.shape != shape:
                raise DomainError(f'area grid has shape {self.area_um2.shape}, expected {shape}')
            if np.any(self.area_um2 <= 0):
                raise DomainError('mode areas must be strictly positive')


class TableProvider(DispersionProvider):
    """Bilinear interpolation of a DispersionTable, without extrapolation."""

    def __init__(self, table: DispersionTable) -> None:
        self.table = table
        self.wavelength_range_um = (float(table.wavelength_um[0]), float(table.wavelength_um[-1]))
        self.geometry_range_um = (float(table.geometry_um[0]), float(table.geometry_um[-1]))

        axes = (table.geometry_um, table.wavelength_um)
        self._index = RegularGridInterpolator(axes, table.n_eff, method='linear', bounds_error=True)
        self._area = None
        if table.area_um2 is not None:
            self._area = RegularGridInterpolator(axes, table.area_um2, method='linear', bounds_error=True)

    def _n_eff(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        points = np.stack([geometry_um, wavelength_um], axis=-1)
        return self._index(points)

    def _mode_radius(self, wavelength_um: np.ndarray, geometry_um: np.ndarray) -> np.ndarray:
        if self._area is None:
            return super()._mode_radius(wavelength_um, geometry_um)
        points = np.stack([geometry_um, wavelength_um], axis=-1)
        return radius_from_area(self._area(points))


def load_dispersion_table(path: str) -> DispersionTable:
    """
    Reads a CSV table with the header geometry_um,wavelength_um,n_eff[,area_um2].

    Rows may come in any order; they are sorted into a rectangular grid. Lines
    starting with '#' hold metadata as key=value pairs.
    """
    metadata = {}
    lines = []
    with open(path, 'r', newline='') as fp:
        for line in fp:
            stripped = line.strip()
            if stripped.startswith('#'):
                key, sep, value = stripped.lstrip('#').partition('=')
                if sep:
                    metadata[key.strip()] = value.strip()
            elif stripped:
                lines.append(stripped)

    reader = csv.DictReader(lines, skipinitialspace=True)
    required = {'geometry_um', 'wavelength_um', 'n_eff'}
    if reader.fieldnames is None or not required.issubset(reader.fieldnames):
        raise ConfigError(f'{path}: header must contain {sorted(required)}')
    with_area = 'area_um2' in reader.fieldnames

    try:
        rows = [(float(r['geometry_um']), float(r['wavelength_um']), float(r['n_eff']),
                 float(r['area_um2']) if with_area else np.nan) for r in reader]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f'{path}: non-numeric entry ({exc})') from exc

    data = np.array(rows, dtype=float).reshape(-1, 4)
    geometry = np.unique(data[:, 0])
    wavelength = np.unique(data[:, 1])
    if len(data) != geometry.size * wavelength.size:
        raise ConfigError(f'{path}: rows do not form a rectangular grid')

    gi = np.searchsorted(geometry, data[:, 0])
    wi = np.searchsorted(wavelength, data[:, 1])
    filled = np.zeros((geometry.size, wavelength.size), dtype=bool)
    filled[gi, wi] = True
    if not filled.all():
        raise ConfigError(f'{path}: duplicated grid nodes')

    n_eff = np.empty(filled.shape)
    n_eff[gi, wi] = data[:, 2]
    area = None
    if with_area:
        area = np.empty(filled.shape)
        area[gi, wi] = data[:, 3]

    try:
        return DispersionTable(geometry, wavelength, n_eff, area, metadata)
    except DomainError as exc:
        raise ConfigError(f'{path}: {exc}') from exc
