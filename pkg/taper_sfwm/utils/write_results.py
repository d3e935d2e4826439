import io
import os
import csv
import json
import itertools
import h5py
import numpy as np

from typing import Any, Dict, Iterable, Sequence, Tuple

from taper_sfwm import __version__
from taper_sfwm.exceptions import ConfigError


def metadata(config_sha256: str) -> Dict[str, str]:
    return {'program': 'taper-sfwm', 'version': __version__, 'config_sha256': config_sha256}


def header_line(config_sha256: str) -> str:
    return f'# taper-sfwm {__version__} config_sha256={config_sha256}\n'


def format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.12e}'
    if value is None:
        return ''
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    tmp = f'{path}.tmp'
    with open(tmp, 'w', newline='') as fp:
        fp.write(text)
    os.replace(tmp, path)


def _csv_text(config_sha256: str, rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    buffer.write(header_line(config_sha256))
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerows([format_value(v) for v in row] for row in rows)
    return buffer.getvalue()


def write_csv(path: str, config_sha256: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    _atomic_write(path, _csv_text(config_sha256, itertools.chain([columns], rows)))


def write_matrix_csv(path: str, config_sha256: str, row_axis: np.ndarray, column_axis: np.ndarray,
                     matrix: np.ndarray, corner: str = 'signal_nm\\idler_nm') -> None:
    """First row holds the column axis, first column the row axis."""
    rows = [[corner] + list(column_axis)]
    rows.extend([value] + list(row) for value, row in zip(row_axis, matrix))
    _atomic_write(path, _csv_text(config_sha256, rows))


def write_json(path: str, config_sha256: str, payload: Dict[str, Any]) -> None:
    document = {'metadata': metadata(config_sha256), **payload}
    _atomic_write(path, json.dumps(document, indent=2, sort_keys=True) + '\n')


def write_jsa_json(path: str, config_sha256: str, signal_nm, idler_nm, amplitude: np.ndarray) -> None:
    write_json(path, config_sha256, {
        'signal_nm': [float(v) for v in signal_nm],
        'idler_nm': [float(v) for v in idler_nm],
        'jsa': [[[float(z.real), float(z.imag)] for z in row] for row in amplitude],
    })


def write_jsa_h5(path: str, config_sha256: str, signal_nm, idler_nm, amplitude: np.ndarray) -> None:
    tmp = f'{path}.tmp'
    with h5py.File(tmp, 'w') as f:
        f.attrs['program'] = 'taper-sfwm'
        f.attrs['version'] = __version__
        f.attrs['config_sha256'] = config_sha256
        f.create_dataset('signal_nm', data=np.asarray(signal_nm, dtype=float), track_times=False)
        f.create_dataset('idler_nm', data=np.asarray(idler_nm, dtype=float), track_times=False)
        f.create_dataset('jsa', data=np.asarray(amplitude, dtype=complex), track_times=False)
    os.replace(tmp, path)


def read_jsa(path: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reads jsa.json or jsa.h5 and returns (signal_nm, idler_nm, complex amplitude)."""
    if path.endswith(('.h5', '.hdf5')):
        with h5py.File(path, 'r') as f:
            return np.array(f['signal_nm']), np.array(f['idler_nm']), np.array(f['jsa'])

    with open(path, 'r') as fp:
        try:
            document = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ConfigError(f'{path} is not valid JSON: {exc}') from exc
    try:
        pairs = np.asarray(document['jsa'], dtype=float)
        signal_nm = np.asarray(document.get('signal_nm', np.arange(pairs.shape[0])), dtype=float)
        idler_nm = np.asarray(document.get('idler_nm', np.arange(pairs.shape[1])), dtype=float)
    except (KeyError, ValueError, IndexError) as exc:
        raise ConfigError(f'{path} does not hold a joint spectral amplitude: {exc}') from exc
    if pairs.ndim != 3 or pairs.shape[-1] != 2:
        raise ConfigError(f'{path}: jsa must be a matrix of [re, im] pairs')
    return signal_nm, idler_nm, pairs[..., 0] + 1j * pairs[..., 1]


def append_log(output_dir: str, stats: Dict[str, Any]) -> None:
    """One JSON line per run stage in <output_dir>/log.txt."""
    with open(os.path.join(output_dir, 'log.txt'), 'a') as f:
        f.write(json.dumps(stats) + '\n')
