import os
import json
import itertools
import numpy as np

from time import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

from taper_sfwm.analysis.calc_schmidt import schmidt_purity
from taper_sfwm.analysis.calc_spectrum import decibels, jsi_pulsed, photon_numbers
from taper_sfwm.dispersion.calc_dispersion import omega_from_nm
from taper_sfwm.exceptions import ConfigError, SfwmError
from taper_sfwm.pump.pump_source import PulsedPump
from taper_sfwm.utils.config import (apply_overrides, build_mode_size, build_profile, build_provider,
                                     build_pump, canonical_json, config_hash, parse_config)
from taper_sfwm.utils.write_results import append_log, write_csv


CHECKPOINT_NAME = 'sweep_checkpoint.jsonl'
RESULT_NAME = 'sweep.csv'
# failures of a single point; anything else aborts the sweep
POINT_ERRORS = (SfwmError, ValueError, TypeError, ArithmeticError)


@dataclass(frozen=True)
class SweepRecord:
    index: int
    key: str
    parameters: Dict[str, Any]
    N_expected: Optional[float] = None
    enhancement_dB: Optional[float] = None
    purity: Optional[float] = None
    status: str = 'ok'
    error: str = ''

    def to_json(self) -> Dict[str, Any]:
        return {'index': self.index, 'key': self.key, 'parameters': self.parameters,
                'N_expected': self.N_expected, 'enhancement_dB': self.enhancement_dB,
                'purity': self.purity, 'status': self.status, 'error': self.error}


@dataclass(frozen=True)
class SweepPlan:
    """
    Cartesian scan of configuration values.

    Attributes
    ----------
    axes : tuple of (path, values)
        Dotted configuration paths and their values; the last axis varies fastest.
    config : dict
        Base configuration snapshot the points are applied to.
    output_dir : str
    chunk_size : int
        Points evaluated between two checkpoint flushes.
    observable : str
        'photons' or 'purity'.
    base_dir : str
        Directory data files of the base configuration are resolved against.
    """

    axes: Tuple[Tuple[str, Tuple[Any, ...]], ...]
    config: Dict[str, Any] = field(compare=False)
    output_dir: str
    chunk_size: int = 8
    observable: str = 'photons'
    base_dir: str = '.'

    def __post_init__(self) -> None:
        axes = []
        for path, values in (self.axes.items() if isinstance(self.axes, dict) else self.axes):
            unique = []
            for value in values:
                if not _finite(value):
                    raise ConfigError(f'sweep axis {path!r} holds a non-finite value {value!r}')
                if value not in unique:
                    unique.append(value)
            if not unique:
                raise ConfigError(f'sweep axis {path!r} is empty')
            axes.append((path, tuple(unique)))
        if not axes:
            raise ConfigError('a sweep needs at least one axis')
        if self.chunk_size < 1:
            raise ConfigError('sweep chunk_size must be positive')
        if self.observable not in ('photons', 'purity'):
            raise ConfigError("sweep observable must be 'photons' or 'purity'")
        object.__setattr__(self, 'axes', tuple(axes))

    @property
    def size(self) -> int:
        return int(np.prod([len(values) for _, values in self.axes]))

    def points(self) -> Iterator[Tuple[int, Dict[str, Any]]]:
        names = [path for path, _ in self.axes]
        for index, values in enumerate(itertools.product(*(values for _, values in self.axes))):
            yield index, dict(zip(names, values))


def _finite(value) -> bool:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return isinstance(value, str)
    return bool(np.isfinite(value))


def point_key(config: Dict[str, Any], point: Dict[str, Any]) -> str:
    return config_hash({'config': config, 'point': point})


def load_checkpoint(path: str) -> Dict[str, Dict[str, Any]]:
    """Completed records by key; a truncated trailing line is ignored."""
    records = {}
    if not os.path.isfile(path):
        return records
    with open(path, 'r') as fp:
        for line in fp:
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                continue
            if isinstance(record, dict) and 'key' in record:
                records[record['key']] = record
    return records


def evaluate_point(config: Dict[str, Any], point: Dict[str, Any], observable: str,
                   base_dir: str = '.') -> Dict[str, Optional[float]]:
    """
    Observable of one grid point: <N> and its enhancement at the target signal, or
    the heralded purity of the pulsed JSA on the configured grid.
    """
    run = parse_config(apply_overrides(config, point.items()), base_dir)
    profile = build_profile(run)
    provider = build_provider(run)
    pump = build_pump(run)
    mode_size = build_mode_size(run)
    n2 = run.dispersion.n2_m2_per_W
    grid = run.require('grid')

    if observable == 'purity':
        if not isinstance(pump, PulsedPump):
            raise ConfigError('the purity observable needs a pulsed pump')
        jsa = jsi_pulsed(profile, provider, pump, n2, grid.signal_nm(), grid.idler_nm(), mode_size, run.chunk_size)
        return {'N_expected': None, 'enhancement_dB': None, 'purity': schmidt_purity(jsa).purity}

    omega_s = omega_from_nm(np.array([grid.target()]))
    photons = photon_numbers(profile, provider, pump, n2, omega_s, None, mode_size)
    reference = photon_numbers(profile.with_changes(modulation_depth=0.0), provider, pump, n2, omega_s, None, mode_size)
    return {'N_expected': float(photons[0]),
            'enhancement_dB': float(decibels(photons, reference)[0]),
            'purity': None}


def _evaluate_safely(evaluate, plan: SweepPlan, index: int, key: str, point: Dict[str, Any]) -> SweepRecord:
    try:
        values = evaluate(plan.config, point, plan.observable, plan.base_dir)
    except POINT_ERRORS as exc:
        return SweepRecord(index, key, point, status='failed', error=f'{type(exc).__name__}: {exc}')
    return SweepRecord(index, key, point, status='ok', **values)


def _terminate_last_line(path: str) -> None:
    # a record cut off mid-line must not swallow the next one
    if not os.path.isfile(path) or os.path.getsize(path) == 0:
        return
    with open(path, 'rb+') as fp:
        fp.seek(-1, os.SEEK_END)
        if fp.read(1) != b'\n':
            fp.write(b'\n')


def _append(fp, record: SweepRecord) -> None:
    fp.write(canonical_json(record.to_json()) + '\n')
    fp.flush()
    os.fsync(fp.fileno())


def run_sweep(plan: SweepPlan,
              threads: int = 1,
              evaluate: Callable[..., Dict[str, Optional[float]]] = evaluate_point) -> List[SweepRecord]:
    """
    Evaluates every point of the plan not already present in the checkpoint.

    Records are appended to the checkpoint one line at a time, and the sorted
    result table is rewritten atomically once all points are done.
    """
    os.makedirs(plan.output_dir, exist_ok=True)
    checkpoint = os.path.join(plan.output_dir, CHECKPOINT_NAME)
    done = load_checkpoint(checkpoint)
    _terminate_last_line(checkpoint)

    points = [(index, point_key(plan.config, point), point) for index, point in plan.points()]
    pending = [p for p in points if p[1] not in done]
    print(f'Sweep: {len(points)} points, {len(points) - len(pending)} already in the checkpoint')

    t0 = time()
    with open(checkpoint, 'a') as fp:
        for start in range(0, len(pending), plan.chunk_size):
            chunk = pending[start:start + plan.chunk_size]
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as executor:
                    records = list(executor.map(lambda p: _evaluate_safely(evaluate, plan, *p), chunk))
            else:
                records = [_evaluate_safely(evaluate, plan, *p) for p in chunk]
            for record in records:
                _append(fp, record)
                done[record.key] = record.to_json()
            print(f'Sweep: {start + len(chunk)}/{len(pending)} points evaluated')

    append_log(plan.output_dir, {'stage': 'sweep', 'points': len(points),
                                 'evaluated': len(pending), 'seconds': time() - t0})

    records = [_record(index, key, point, done[key]) for index, key, point in points]
    _write_table(plan, records)
    return records


def _record(index: int, key: str, point: Dict[str, Any], stored: Dict[str, Any]) -> SweepRecord:
    return SweepRecord(index=index, key=key, parameters=point,
                       N_expected=stored.get('N_expected'),
                       enhancement_dB=stored.get('enhancement_dB'),
                       purity=stored.get('purity'),
                       status=stored.get('status', 'ok'),
                       error=stored.get('error', ''))


def _write_table(plan: SweepPlan, records: List[SweepRecord]) -> None:
    names = [path for path, _ in plan.axes]
    columns = ['index', 'key'] + names + ['N_expected', 'enhancement_dB', 'purity', 'status', 'error']
    rows = [[r.index, r.key] + [r.parameters[name] for name in names]
            + [r.N_expected, r.enhancement_dB, r.purity, r.status, r.error]
            for r in records]
    write_csv(os.path.join(plan.output_dir, RESULT_NAME), config_hash(plan.config), columns, rows)
