import io
import os
import json
import argparse
import tempfile
import unittest
import numpy as np

from contextlib import redirect_stderr, redirect_stdout

from main import get_args_parser, main
from taper_sfwm.utils.config import apply_overrides
from taper_sfwm.utils.plot import plot
from tests.synthetic import DATA_DIR, small_config


def write_config(directory, data, name='config.json'):
    path = os.path.join(directory, name)
    with open(path, 'w') as fp:
        json.dump(data, fp)
    return path


def invoke(argv):
    """Runs the CLI and returns (exit code, stdout, stderr)."""
    args = get_args_parser().parse_args(argv)
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(args)
    return code, out.getvalue().strip(), err.getvalue().strip()


def read(path):
    with open(path, 'rb') as fp:
        return fp.read()


class TestCommands(unittest.TestCase):

    def test_spectrum(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, small_config())
            code, summary, _ = invoke(['spectrum', '--config', config, '--out', tmp])
            self.assertEqual(code, 0, 'Spectrum command must succeed')
            self.assertTrue(summary.startswith('peak_N='), 'Summary line is missing')
            with open(os.path.join(tmp, 'spectrum.csv')) as fp:
                header, columns = fp.readline(), fp.readline().strip()
            self.assertTrue(header.startswith('# taper-sfwm 1.0 config_sha256='), 'Provenance line is missing')
            self.assertEqual(columns, 'wavelength_nm,idler_nm,N_expected,enhancement_dB', 'Column names are wrong')
            with open(os.path.join(tmp, 'log.txt')) as fp:
                first = json.loads(fp.readline())
            self.assertEqual(first['command'], 'spectrum', 'Run must be logged')

    def test_thread_invariance(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, small_config())
            tables = []
            for threads in ('1', '4'):
                out = os.path.join(tmp, threads)
                code, _, _ = invoke(['spectrum', '--config', config, '--out', out, '--threads', threads])
                self.assertEqual(code, 0, 'Spectrum command must succeed')
                tables.append(read(os.path.join(out, 'spectrum.csv')))
            self.assertEqual(tables[0], tables[1], 'Thread count must not change the output bytes')

    def test_override_changes_hash(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, small_config())
            invoke(['growth', '--config', config, '--out', os.path.join(tmp, 'a')])
            invoke(['growth', '--config', config, '--out', os.path.join(tmp, 'b'), '--set', 'pump.power_W=2.0'])
            with open(os.path.join(tmp, 'a', 'growth.csv')) as fa, open(os.path.join(tmp, 'b', 'growth.csv')) as fb:
                self.assertNotEqual(fa.readline(), fb.readline(), 'An override must change the configuration hash')

    def test_check(self):
        with tempfile.TemporaryDirectory() as tmp:
            data = apply_overrides(small_config(), [('waveguide.steps_per_period', 100)])
            config = write_config(tmp, data)
            code, summary, err = invoke(['check', '--config', config, '--out', tmp])
            self.assertEqual(code, 0, f'Engine and oracle must agree: {err}')
            with open(os.path.join(tmp, 'check.json')) as fp:
                report = json.load(fp)
            self.assertTrue(report['passed'], 'Check report must pass')
            self.assertIn('config_sha256', report['metadata'], 'Check report must carry metadata')

    def test_map(self):
        with tempfile.TemporaryDirectory() as tmp:
            data = dict(small_config(), map={'delta_start': 0.0, 'delta_stop': 0.1, 'delta_points': 2,
                                             'period_start_m': 0.008, 'period_stop_m': 0.012, 'period_points': 2})
            code, _, _ = invoke(['map', '--config', write_config(tmp, data), '--out', tmp])
            self.assertEqual(code, 0, 'Map command must succeed')
            table = np.genfromtxt(os.path.join(tmp, 'map.csv'), delimiter=',', names=True, skip_header=1)
            np.testing.assert_array_equal(table['enhancement_dB'][table['Delta'] == 0.0], [0.0, 0.0],
                                          'The untapered row must be 0 dB')


class TestPurity(unittest.TestCase):

    def test_rank_one(self):
        with tempfile.TemporaryDirectory() as tmp:
            amplitude = np.outer([1.0, 2.0, 0.5], [0.3, 1.0])
            path = os.path.join(tmp, 'jsa.json')
            with open(path, 'w') as fp:
                json.dump({'jsa': [[[v, 0.0] for v in row] for row in amplitude]}, fp)
            code, summary, _ = invoke(['purity', '--jsa', path])
            self.assertEqual(code, 0, 'Purity command must succeed')
            self.assertEqual(summary, '1.000000', 'A rank-one JSA must have unit purity')
            self.assertTrue(os.path.isfile(os.path.join(tmp, 'purity.json')), 'purity.json must be written')

    def test_missing_jsa(self):
        code, _, err = invoke(['purity'])
        self.assertEqual(code, 2, 'Missing --jsa is a configuration error')
        self.assertEqual(json.loads(err)['error'], 'ConfigError', 'Error must be reported as JSON on stderr')


class TestExitCodes(unittest.TestCase):

    def test_unknown_key(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = write_config(tmp, dict(small_config(), colour='blue'))
            code, _, err = invoke(['spectrum', '--config', config, '--out', tmp])
            self.assertEqual(code, 2, 'Schema violations must exit with 2')
            self.assertEqual(json.loads(err)['exit_code'], 2, 'Exit code must be reported on stderr')

    def test_domain_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            data = apply_overrides(small_config(), [('grid.signal_start_nm', 150.0), ('grid.signal_stop_nm', 160.0),
                                                    ('grid.signal_points', 2), ('grid.normalize', False)])
            code, _, err = invoke(['spectrum', '--config', write_config(tmp, data), '--out', tmp])
            self.assertEqual(code, 3, 'Queries outside the dispersion domain must exit with 3')
            self.assertEqual(json.loads(err)['error'], 'DomainError', 'The error class must be reported')

    def _run_with(self, overrides, base=None, command='spectrum'):
        with tempfile.TemporaryDirectory() as tmp:
            data = apply_overrides(base or small_config(), overrides)
            code, _, err = invoke([command, '--config', write_config(tmp, data), '--out', tmp])
        return code, err

    def test_schema_violations(self):
        cases = {'negative points': [('grid.signal_points', -5)],
                 'fractional points': [('grid.signal_points', 2.5)],
                 'reversed grid': [('grid.signal_start_nm', 779.0), ('grid.signal_stop_nm', 740.0)],
                 'non-numeric bound': [('grid.signal_stop_nm', 'far')],
                 'non-numeric radius': [('dispersion.mode_radius_um', 'abc')],
                 'zero fine steps': [('check.fine_steps', 0)],
                 'zero tolerance': [('check.tolerance', 0.0)],
                 'unknown format': [('output.formats', ['csv', 'xml'])]}
        for name, overrides in cases.items():
            code, err = self._run_with(overrides)
            self.assertEqual(code, 2, f'{name} must exit with 2')
            self.assertEqual(json.loads(err)['error'], 'ConfigError', f'{name} must be a ConfigError')

    def test_reversed_map_axis(self):
        data = dict(small_config(), map={'delta_start': 0.1, 'delta_stop': 0.0, 'delta_points': 2,
                                         'period_start_m': 0.008, 'period_stop_m': 0.012, 'period_points': 2})
        code, _ = self._run_with([], base=data, command='map')
        self.assertEqual(code, 2, 'A decreasing map axis must exit with 2')

    def test_non_numeric_hole_ratio(self):
        data = apply_overrides(small_config(), [
            ('dispersion.provider', 'fibre_empirical'),
            ('dispersion.coefficients_file', os.path.join(DATA_DIR, 'pcf_empirical_coefficients.json')),
            ('waveguide.hole_ratio', 'abc')])
        code, err = self._run_with([], base=data)
        self.assertEqual(code, 2, 'A non-numeric hole ratio must exit with 2')
        self.assertEqual(json.loads(err)['error'], 'ConfigError', 'The error class must be reported')

    def test_missing_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            code, _, _ = invoke(['spectrum', '--config', os.path.join(tmp, 'absent.json'), '--out', tmp])
            self.assertEqual(code, 4, 'I/O failures must exit with 4')


class TestPlot(unittest.TestCase):

    def test_spectrum_plot(self):
        with tempfile.TemporaryDirectory() as tmp:
            invoke(['spectrum', '--config', write_config(tmp, small_config()), '--out', tmp])
            args = argparse.Namespace(spectrum=os.path.join(tmp, 'spectrum.csv'), jsi=None, map=None, growth=None,
                                      output_dir=os.path.join(tmp, 'figures'))
            written = plot(args)
            self.assertEqual(len(written), 1, 'One figure per table')
            self.assertTrue(os.path.isfile(written[0]), 'spectrum.png must be written')


if __name__ == '__main__':
    unittest.main()
