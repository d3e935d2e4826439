import os
import sys
import json
import argparse
import warnings
import numpy as np

from time import time

from taper_sfwm import __version__
from taper_sfwm.analysis.calc_enhancement_map import enhancement_map
from taper_sfwm.analysis.calc_schmidt import schmidt_purity
from taper_sfwm.analysis.calc_sidebands import mi_sidebands, nonlinear_coefficient, phase_matching_period
from taper_sfwm.analysis.calc_spectrum import (growth_curve, jsi_pulsed, spectral_peaks, spectrum_cw,
                                               count_peaks_per_period)
from taper_sfwm.dispersion.calc_dispersion import beta2, omega_from_nm
from taper_sfwm.exceptions import (ConfigError, CouplingStrengthWarning, DomainError, EnergyConservationError,
                                   OracleAccuracyError, PropagationOverflowError)
from taper_sfwm.modes.calc_overlap import gaussian_area
from taper_sfwm.propagation.calc_coupling import build_cw_coupling, coupling_functions
from taper_sfwm.propagation.calc_transfer_matrix import propagate
from taper_sfwm.propagation.ode_oracle import ode_oracle
from taper_sfwm.pump.pump_source import ContinuousPump, PulsedPump
from taper_sfwm.sweep.run_sweep import SweepPlan, run_sweep
from taper_sfwm.utils.config import (RunConfig, build_mode_size, build_profile, build_provider, build_pump,
                                     config_hash, load_config, resolve_tau_ps)
from taper_sfwm.utils.write_results import (append_log, read_jsa, write_csv, write_jsa_h5, write_jsa_json,
                                            write_json, write_matrix_csv)


COMMANDS = ('spectrum', 'jsi', 'purity', 'map', 'sweep', 'check', 'growth', 'sidebands')
NUMERICAL_ERRORS = (DomainError, EnergyConservationError, PropagationOverflowError, OracleAccuracyError)


class Run:
    """
    Models and output settings shared by every command.

    Attributes
    ----------
    config : RunConfig
    digest : str
        SHA-256 of the effective configuration.
    output_dir : str
    threads : int
    """

    def __init__(self, config: RunConfig, output_dir: str, threads: int) -> None:
        self.config = config
        self.digest = config_hash(config.raw)
        self.output_dir = output_dir
        self.threads = threads
        self.profile = build_profile(config)
        self.provider = build_provider(config)
        self.pump = build_pump(config)
        self.mode_size = build_mode_size(config)
        self.n2 = config.dispersion.n2_m2_per_W

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def wants(self, fmt: str) -> bool:
        return fmt in self.config.output.formats


def run_spectrum(run: Run) -> str:
    grid = run.config.require('grid')
    result = spectrum_cw(run.profile, run.provider, run.pump, run.n2, grid.signal_nm(), run.mode_size,
                         normalize=grid.normalize, chunk_size=run.config.chunk_size, threads=run.threads)

    columns = ['wavelength_nm', 'idler_nm', 'N_expected']
    rows = [result.signal_nm, result.idler_nm, result.photons]
    if result.enhancement_db is not None:
        columns.append('enhancement_dB')
        rows.append(result.enhancement_db)
    write_csv(run.path('spectrum.csv'), run.digest, columns, zip(*rows))

    peak = int(np.argmax(result.photons))
    return f'peak_N={result.photons[peak]:.6e} peak_wavelength_nm={result.signal_nm[peak]:.4f}'


def run_jsi(run: Run) -> str:
    grid = run.config.require('grid')
    if not isinstance(run.pump, PulsedPump):
        raise ConfigError('the jsi command needs a pulsed pump')
    jsa = jsi_pulsed(run.profile, run.provider, run.pump, run.n2, grid.signal_nm(), grid.idler_nm(),
                     run.mode_size, run.config.chunk_size, run.threads)

    write_matrix_csv(run.path('jsi.csv'), run.digest, jsa.signal_nm, jsa.idler_nm, jsa.jsi)
    if run.wants('json'):
        write_jsa_json(run.path('jsa.json'), run.digest, jsa.signal_nm, jsa.idler_nm, jsa.amplitude)
    if run.wants('h5'):
        write_jsa_h5(run.path('jsa.h5'), run.digest, jsa.signal_nm, jsa.idler_nm, jsa.amplitude)

    result = schmidt_purity(jsa)
    write_json(run.path('purity.json'), run.digest, _purity_payload(result))
    return f'purity={result.purity:.6f}'


def _purity_payload(result) -> dict:
    return {'coefficients': [float(v) for v in result.coefficients],
            'purity': result.purity,
            'schmidt_number': result.schmidt_number}


def run_purity(jsa_path: str, output_dir: str, digest: str) -> str:
    _, _, amplitude = read_jsa(jsa_path)
    result = schmidt_purity(amplitude)
    write_json(os.path.join(output_dir, 'purity.json'), digest, _purity_payload(result))
    return f'{result.purity:.6f}'


def run_map(run: Run) -> str:
    settings = run.config.require('map')
    target = run.config.require('grid').target()
    result = enhancement_map(run.profile, run.provider, run.pump, run.n2, settings.deltas(), settings.periods(),
                             target, run.mode_size, run.threads)

    rows = [(d, p, result.enhancement_db[i, j], result.photons[i, j])
            for i, d in enumerate(result.deltas) for j, p in enumerate(result.periods_m)]
    write_csv(run.path('map.csv'), run.digest, ['Delta', 'Lambda_T_m', 'enhancement_dB', 'N_expected'], rows)

    finite = np.where(np.isfinite(result.enhancement_db), result.enhancement_db, -np.inf)
    i, j = np.unravel_index(int(np.argmax(finite)), finite.shape)
    return (f'max_enhancement_dB={result.enhancement_db[i, j]:.3f} '
            f'Delta={result.deltas[i]:.4f} Lambda_T_m={result.periods_m[j]:.6e}')


def run_sweep_command(run: Run) -> str:
    settings = run.config.require('sweep')
    # the axes themselves are not part of the base configuration of each point
    base = {k: v for k, v in run.config.raw.items() if k != 'sweep'}
    plan = SweepPlan(axes=settings.axes, config=base, output_dir=run.output_dir,
                     chunk_size=settings.chunk_size, observable=settings.observable,
                     base_dir=run.config.base_dir)
    records = run_sweep(plan, run.threads)
    failed = sum(r.status == 'failed' for r in records)
    return f'points={len(records)} failed={failed}'


def run_check(run: Run) -> str:
    if not isinstance(run.pump, ContinuousPump):
        raise ConfigError('the check command needs a cw pump')
    settings = run.config.check
    signals = settings.signal_nm or [run.config.require('grid').target()]

    points = []
    for signal_nm in signals:
        omega_s = float(omega_from_nm(signal_nm))
        context = build_cw_coupling(run.profile, run.provider, run.pump, run.n2, omega_s, run.mode_size)
        engine, _ = propagate(context.offdiag)
        functions = coupling_functions(run.profile, run.provider, run.pump, run.n2, omega_s,
                                       mode_size=run.mode_size)
        oracle = ode_oracle(run.profile, functions, settings.fine_steps)

        n_engine = float(engine.expected_photons[0])
        n_oracle = float(oracle.expected_photons)
        points.append({'signal_nm': float(signal_nm),
                       'N_engine': n_engine,
                       'N_oracle': n_oracle,
                       'relative_deviation': abs(n_engine - n_oracle) / n_oracle,
                       'bogoliubov_residual_engine': float(engine.bogoliubov_residual[0]),
                       'bogoliubov_residual_oracle': float(oracle.bogoliubov_residual)})

    worst = max(p['relative_deviation'] for p in points)
    passed = worst <= settings.tolerance
    write_json(run.path('check.json'), run.digest, {'points': points, 'max_relative_deviation': worst,
                                                    'tolerance': settings.tolerance, 'passed': passed})
    if not passed:
        raise OracleAccuracyError(f'engine and oracle differ by {worst:.3%} (tolerance {settings.tolerance:.3%})')
    return f'max_relative_deviation={worst:.3e}'


def run_growth(run: Run) -> str:
    target = run.config.require('grid').target()
    curve = growth_curve(run.profile, run.provider, run.pump, run.n2, target, run.mode_size)
    write_csv(run.path('growth.csv'), run.digest, ['z_m', 'N_expected'], zip(curve.z_m, curve.photons))
    peaks = count_peaks_per_period(curve) if run.profile.periods > 2 else float('nan')
    return f'final_N={curve.photons[-1]:.6e} peaks_per_period={peaks:.2f}'


def run_sidebands(run: Run) -> str:
    if not isinstance(run.pump, ContinuousPump):
        raise ConfigError('the sidebands command needs a cw pump')
    grid = run.config.require('grid')
    pump_um = run.pump.wavelength_um
    geometry = run.profile.average_um

    b2 = beta2(run.provider, pump_um, geometry)
    radius = run.mode_size.radius(run.provider, pump_um, geometry)
    gamma = nonlinear_coefficient(run.n2, pump_um, float(gaussian_area(radius)))
    sidebands = mi_sidebands(b2, gamma, run.pump.power_W, run.profile.period_m, range(1, 4), pump_um * 1e3)

    spectrum = spectrum_cw(run.profile, run.provider, run.pump, run.n2, grid.signal_nm(), run.mode_size,
                           chunk_size=run.config.chunk_size, threads=run.threads)
    peaks = spectral_peaks(spectrum, min_relative_height=1e-3)
    _, periods = phase_matching_period(run.provider, run.pump, run.n2, spectrum.signal_nm, geometry, run.mode_size)

    rows = []
    for s in sidebands:
        nearest = peaks[np.argmin(np.abs(peaks - s.signal_nm))] if s.resonant and peaks.size else None
        rows.append((s.order, s.omega_shift, s.resonant, s.signal_nm, s.idler_nm, nearest))
    write_csv(run.path('sidebands.csv'), run.digest,
              ['order', 'omega_shift_rad_per_s', 'resonant', 'signal_nm', 'idler_nm', 'nearest_peak_nm'], rows)
    write_csv(run.path('phase_matching.csv'), run.digest, ['wavelength_nm', 'Lambda_T_m'],
              zip(spectrum.signal_nm, periods))
    return f'beta2_ps2_per_m={b2:.6e} gamma_per_W_m={gamma:.6e} resonant_orders={sum(s.resonant for s in sidebands)}'


def run(args) -> str:
    """Executes one command and returns its one-line summary."""
    if args.command == 'purity':
        if not args.jsa:
            raise ConfigError('the purity command needs --jsa')
        output_dir = args.out or os.path.dirname(os.path.abspath(args.jsa))
        os.makedirs(output_dir, exist_ok=True)
        digest = load_config(args.config, args.set).raw if args.config else {'jsa': os.path.basename(args.jsa)}
        return run_purity(args.jsa, output_dir, config_hash(digest))

    if not args.config:
        raise ConfigError(f'the {args.command} command needs --config')
    config = load_config(args.config, args.set)
    output_dir = args.out or os.path.join(config.base_dir, config.output.directory)
    os.makedirs(output_dir, exist_ok=True)
    threads = args.threads or config.threads

    append_log(output_dir, {'command': args.command, 'version': __version__, 'threads': threads,
                            'config_sha256': config_hash(config.raw), 'config': config.raw})
    if config.pump.kind == 'pulse':
        _, notice = resolve_tau_ps(config.pump)
        if notice:
            append_log(output_dir, {'notice': notice})

    runner = Run(config, output_dir, threads)
    commands = {'spectrum': run_spectrum, 'jsi': run_jsi, 'map': run_map, 'sweep': run_sweep_command,
                'check': run_check, 'growth': run_growth, 'sidebands': run_sidebands}

    t0 = time()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', CouplingStrengthWarning)
        summary = commands[args.command](runner)
    notices = sorted({str(w.message) for w in caught if issubclass(w.category, CouplingStrengthWarning)})
    append_log(output_dir, {'stage': args.command, 'seconds': time() - t0, 'warnings': notices})
    return summary


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return 2
    if isinstance(exc, NUMERICAL_ERRORS):
        return 3
    if isinstance(exc, OSError):
        return 4
    raise exc


def get_args_parser():
    parser = argparse.ArgumentParser(description='Photon pairs from SFWM in periodically tapered waveguides')
    parser.add_argument('command', type=str, choices=COMMANDS, help='Computation to run')
    parser.add_argument('--config', type=str, help='Path to the JSON run configuration')
    parser.add_argument('--set', type=str, action='append', default=[], help='Override as section.key=value')
    parser.add_argument('--out', type=str, help='Path to output directory')
    parser.add_argument('--threads', type=int, default=None, help='Worker threads')
    parser.add_argument('--jsa', type=str, help='Path to jsa.json or jsa.h5 (purity)')
    return parser


def main(args) -> int:
    """
    Runs a command, prints its summary and maps library errors to exit codes.

    Args:
        args: command-line arguments.
    """
    try:
        summary = run(args)
    except (ConfigError, DomainError, EnergyConservationError, PropagationOverflowError,
            OracleAccuracyError, OSError) as exc:
        code = exit_code(exc)
        print(json.dumps({'error': type(exc).__name__, 'message': str(exc), 'exit_code': code}), file=sys.stderr)
        return code
    print(summary)
    return 0


if __name__ == '__main__':
    parser = get_args_parser()
    args = parser.parse_args()
    sys.exit(main(args))
