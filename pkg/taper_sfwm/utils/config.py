import os
import json
import copy
import hashlib
import dataclasses
import numpy as np

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from taper_sfwm.dispersion.dispersion_table import TableProvider, load_dispersion_table
from taper_sfwm.dispersion.fibre_model import FibreEmpiricalProvider, load_fibre_coefficients
from taper_sfwm.dispersion.provider import DispersionProvider
from taper_sfwm.dispersion.sellmeier import SellmeierProvider, load_sellmeier
from taper_sfwm.exceptions import ConfigError, DomainError
from taper_sfwm.modes.calc_overlap import ModeSizeModel
from taper_sfwm.pump.pump_source import ContinuousPump, PulsedPump, PumpSource, tau_from_fwhm
from taper_sfwm.waveguide.taper_profile import TaperProfile


PROVIDERS = ('fibre_empirical', 'table', 'sellmeier')
FORMATS = ('csv', 'json', 'h5')


def _positive_int(name: str, value) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f'{name} must be a positive integer, got {value!r}')


def _positive_number(name: str, value) -> None:
    if not _number(value) or value <= 0:
        raise ConfigError(f'{name} must be a positive number, got {value!r}')


def _check_axis(name: str, start, stop, points) -> None:
    """A linspace axis must be strictly increasing; a single point may have start == stop."""
    _positive_int(f'{name}_points', points)
    for bound in (start, stop):
        if not _number(bound):
            raise ConfigError(f'{name} bounds must be finite numbers, got {bound!r}')
    if not (start < stop or (points == 1 and start == stop)):
        raise ConfigError(f'{name} axis must satisfy start < stop, got {start!r} and {stop!r}')


@dataclass(frozen=True)
class WaveguideConfig:
    average_um: float
    modulation_depth: float
    period_m: float
    periods: int
    steps_per_period: int = 200
    kind: str = 'fibre'
    hole_ratio: float = 0.5
    thickness_nm: Optional[float] = None
    outer_diameter_um: Optional[float] = None


@dataclass(frozen=True)
class DispersionConfig:
    n2_m2_per_W: float
    provider: str = 'fibre_empirical'
    sellmeier_file: Optional[str] = None
    coefficients_file: Optional[str] = None
    table_file: Optional[str] = None
    mode_radius_um: Optional[float] = None
    mode_amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not _number(self.n2_m2_per_W) or self.n2_m2_per_W <= 0:
            raise ConfigError('dispersion.n2_m2_per_W must be a positive number')
        if self.provider not in PROVIDERS:
            raise ConfigError(f'dispersion.provider must be one of {PROVIDERS}')
        needed = {'fibre_empirical': ('sellmeier_file', 'coefficients_file'),
                  'table': ('table_file',),
                  'sellmeier': ('sellmeier_file',)}[self.provider]
        for name in needed:
            if getattr(self, name) is None:
                raise ConfigError(f'dispersion.{name} is required by the {self.provider} provider')


@dataclass(frozen=True)
class PumpConfig:
    lambda_pump_nm: float
    kind: str = 'cw'
    power_W: Optional[float] = None
    energy_nJ: Optional[float] = None
    tau_ps: Optional[float] = None
    fwhm_ps: Optional[float] = None
    components: int = 129
    span_over_tau: float = 8.0

    def __post_init__(self) -> None:
        if self.kind not in ('cw', 'pulse'):
            raise ConfigError("pump.kind must be 'cw' or 'pulse'")
        if self.kind == 'cw' and self.power_W is None:
            raise ConfigError('pump.power_W is required for a cw pump')
        if self.kind == 'pulse':
            if self.energy_nJ is None:
                raise ConfigError('pump.energy_nJ is required for a pulsed pump')
            if self.tau_ps is None and self.fwhm_ps is None:
                raise ConfigError('pump.tau_ps or pump.fwhm_ps is required for a pulsed pump')


@dataclass(frozen=True)
class GridConfig:
    signal_start_nm: float
    signal_stop_nm: float
    signal_points: int = 201
    idler_start_nm: Optional[float] = None
    idler_stop_nm: Optional[float] = None
    idler_points: int = 101
    target_signal_nm: Optional[float] = None
    normalize: bool = False

    def __post_init__(self) -> None:
        _check_axis('grid.signal', self.signal_start_nm, self.signal_stop_nm, self.signal_points)
        _positive_int('grid.idler_points', self.idler_points)
        if self.idler_start_nm is not None or self.idler_stop_nm is not None:
            _check_axis('grid.idler', self.idler_start_nm, self.idler_stop_nm, self.idler_points)
        if self.target_signal_nm is not None:
            _positive_number('grid.target_signal_nm', self.target_signal_nm)
        if not isinstance(self.normalize, bool):
            raise ConfigError('grid.normalize must be true or false')

    def signal_nm(self) -> np.ndarray:
        return np.linspace(self.signal_start_nm, self.signal_stop_nm, self.signal_points)

    def idler_nm(self) -> np.ndarray:
        if self.idler_start_nm is None or self.idler_stop_nm is None:
            raise ConfigError('grid.idler_start_nm and grid.idler_stop_nm are required')
        return np.linspace(self.idler_start_nm, self.idler_stop_nm, self.idler_points)

    def target(self) -> float:
        if self.target_signal_nm is None:
            raise ConfigError('grid.target_signal_nm is required')
        return self.target_signal_nm


@dataclass(frozen=True)
class MapConfig:
    delta_start: float
    delta_stop: float
    delta_points: int
    period_start_m: float
    period_stop_m: float
    period_points: int

    def __post_init__(self) -> None:
        _check_axis('map.delta', self.delta_start, self.delta_stop, self.delta_points)
        _check_axis('map.period', self.period_start_m, self.period_stop_m, self.period_points)
        if self.delta_start < 0:
            raise ConfigError('map.delta_start must not be negative')
        _positive_number('map.period_start_m', self.period_start_m)

    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_start, self.delta_stop, self.delta_points)

    def periods(self) -> np.ndarray:
        return np.linspace(self.period_start_m, self.period_stop_m, self.period_points)


@dataclass(frozen=True)
class SweepConfig:
    axes: Dict[str, List[Any]]
    observable: str = 'photons'
    chunk_size: int = 8

    def __post_init__(self) -> None:
        if not isinstance(self.axes, dict) or not self.axes:
            raise ConfigError('sweep.axes must map configuration paths to value lists')
        if self.observable not in ('photons', 'purity'):
            raise ConfigError("sweep.observable must be 'photons' or 'purity'")
        _positive_int('sweep.chunk_size', self.chunk_size)


@dataclass(frozen=True)
class CheckConfig:
    fine_steps: int = 1000
    tolerance: float = 0.005
    signal_nm: Optional[List[float]] = None

    def __post_init__(self) -> None:
        _positive_int('check.fine_steps', self.fine_steps)
        _positive_number('check.tolerance', self.tolerance)
        if self.signal_nm is not None:
            if not isinstance(self.signal_nm, list) or not self.signal_nm:
                raise ConfigError('check.signal_nm must be a non-empty list of wavelengths')
            for value in self.signal_nm:
                _positive_number('check.signal_nm', value)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = 'res'
    formats: List[str] = field(default_factory=lambda: ['csv', 'json'])

    def __post_init__(self) -> None:
        if not isinstance(self.directory, str) or not self.directory:
            raise ConfigError('output.directory must be a non-empty path')
        if not isinstance(self.formats, list) or not all(isinstance(f, str) for f in self.formats):
            raise ConfigError('output.formats must be a list of format names')
        unknown = set(self.formats) - set(FORMATS)
        if unknown:
            raise ConfigError(f'output.formats holds unknown formats {sorted(unknown)}; allowed {FORMATS}')


@dataclass(frozen=True)
class RunConfig:
    """
    Effective run configuration.

    Attributes
    ----------
    raw : dict
        The configuration after overrides, the input of the configuration hash.
    base_dir : str
        Directory relative data-file paths are resolved against.
    """

    waveguide: WaveguideConfig
    dispersion: DispersionConfig
    pump: PumpConfig
    grid: Optional[GridConfig] = None
    map: Optional[MapConfig] = None
    sweep: Optional[SweepConfig] = None
    check: CheckConfig = field(default_factory=CheckConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    threads: int = 1
    chunk_size: int = 32
    raw: Dict[str, Any] = field(default_factory=dict, compare=False)
    base_dir: str = '.'

    def require(self, section: str):
        value = getattr(self, section)
        if value is None:
            raise ConfigError(f'the {section!r} section is required for this command')
        return value


SECTIONS = {'waveguide': WaveguideConfig, 'dispersion': DispersionConfig, 'pump': PumpConfig,
            'grid': GridConfig, 'map': MapConfig, 'sweep': SweepConfig, 'check': CheckConfig,
            'output': OutputConfig}
REQUIRED = ('waveguide', 'dispersion', 'pump')
SCALARS = ('threads', 'chunk_size')


def parse_override(text: str) -> Tuple[str, Any]:
    """Splits 'section.key=value'; the value is decoded as JSON when possible."""
    path, sep, value = text.partition('=')
    if not sep or not path.strip():
        raise ConfigError(f'override {text!r} is not of the form key=value')
    try:
        decoded = json.loads(value)
    except json.JSONDecodeError:
        decoded = value
    return path.strip(), decoded


def apply_overrides(data: Dict[str, Any], overrides) -> Dict[str, Any]:
    """Returns a copy of data with every (dotted path, value) override applied."""
    data = copy.deepcopy(data)
    for path, value in overrides:
        keys = path.split('.')
        node = data
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f'override path {path!r} crosses a non-section value')
        node[keys[-1]] = value
    return data


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(',', ':'))


def config_hash(data: Dict[str, Any]) -> str:
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def parse_config(data: Dict[str, Any], base_dir: str = '.') -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError('the configuration must be a JSON object')

    unknown = set(data) - set(SECTIONS) - set(SCALARS)
    if unknown:
        raise ConfigError(f'unknown configuration keys {sorted(unknown)}')
    for name in REQUIRED:
        if name not in data:
            raise ConfigError(f'missing configuration section {name!r}')

    sections = {name: _section(cls, data[name], name) for name, cls in SECTIONS.items() if name in data}
    scalars = {}
    for name in SCALARS:
        if name in data:
            value = data[name]
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f'{name} must be a positive integer')
            scalars[name] = value

    return RunConfig(**sections, **scalars, raw=copy.deepcopy(data), base_dir=base_dir)


def _section(cls, values, name):
    if not isinstance(values, dict):
        raise ConfigError(f'section {name!r} must be a JSON object')
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f'unknown keys in {name!r}: {sorted(unknown)}')
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f'section {name!r}: {exc}') from exc


def load_config(path: str, overrides=()) -> RunConfig:
    """Reads a JSON configuration file and applies 'section.key=value' overrides."""
    try:
        with open(path, 'r') as fp:
            data = json.load(fp)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'{path} is not valid JSON: {exc}') from exc
    data = apply_overrides(data, [parse_override(o) if isinstance(o, str) else o for o in overrides])
    return parse_config(data, os.path.dirname(os.path.abspath(path)))


def resolve_path(config: RunConfig, path: str) -> str:
    """Relative paths are tried against the configuration directory, then the working directory."""
    if os.path.isabs(path):
        candidates = [path]
    else:
        candidates = [os.path.join(config.base_dir, path), os.path.abspath(path)]
    for candidate in candidates:
        if os.path.isfile(candidate):
            return candidate
    raise ConfigError(f'data file {path!r} not found')


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and np.isfinite(value)


def build_profile(config: RunConfig) -> TaperProfile:
    w = config.waveguide
    metadata = {}
    if w.thickness_nm is not None:
        metadata['thickness_nm'] = str(w.thickness_nm)
    if w.outer_diameter_um is not None:
        metadata['outer_diameter_um'] = str(w.outer_diameter_um)
    try:
        return TaperProfile(average_um=w.average_um,
                            modulation_depth=w.modulation_depth,
                            period_m=w.period_m,
                            periods=w.periods,
                            steps_per_period=w.steps_per_period,
                            kind=w.kind,
                            metadata=metadata)
    except (DomainError, TypeError) as exc:
        raise ConfigError(f'waveguide: {exc}') from exc


def build_provider(config: RunConfig) -> DispersionProvider:
    d = config.dispersion
    match d.provider:
        case 'sellmeier':
            return SellmeierProvider(load_sellmeier(resolve_path(config, d.sellmeier_file)))
        case 'table':
            return TableProvider(load_dispersion_table(resolve_path(config, d.table_file)))
        case 'fibre_empirical':
            core = load_sellmeier(resolve_path(config, d.sellmeier_file))
            coefficients = load_fibre_coefficients(resolve_path(config, d.coefficients_file))
            try:
                return FibreEmpiricalProvider(coefficients, core, config.waveguide.hole_ratio)
            except (DomainError, TypeError, ValueError) as exc:
                raise ConfigError(f'dispersion: {exc}') from exc


def build_mode_size(config: RunConfig) -> ModeSizeModel:
    try:
        return ModeSizeModel(config.dispersion.mode_radius_um, config.dispersion.mode_amplitude)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f'dispersion: {exc}') from exc


def resolve_tau_ps(pump: PumpConfig) -> Tuple[float, Optional[str]]:
    """
    Pulse tau in ps. When both tau and FWHM are given tau wins and the mismatch is
    returned as a notice for the run log.
    """
    if pump.tau_ps is None:
        return tau_from_fwhm(pump.fwhm_ps * 1e-12) * 1e12, None
    notice = None
    if pump.fwhm_ps is not None:
        implied = tau_from_fwhm(pump.fwhm_ps * 1e-12) * 1e12
        if not np.isclose(implied, pump.tau_ps, rtol=1e-3):
            notice = f'tau_ps={pump.tau_ps} overrides fwhm_ps={pump.fwhm_ps} (implies tau_ps={implied:.6g})'
    return pump.tau_ps, notice


def build_pump(config: RunConfig) -> PumpSource:
    p = config.pump
    try:
        if p.kind == 'cw':
            return ContinuousPump(p.lambda_pump_nm * 1e-3, p.power_W)
        tau_ps, _ = resolve_tau_ps(p)
        return PulsedPump(wavelength_um=p.lambda_pump_nm * 1e-3,
                          energy_J=p.energy_nJ * 1e-9,
                          tau_s=tau_ps * 1e-12,
                          components=p.components,
                          span_over_tau=p.span_over_tau)
    except (DomainError, TypeError) as exc:
        raise ConfigError(f'pump: {exc}') from exc
