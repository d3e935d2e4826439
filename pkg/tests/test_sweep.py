import os
import csv
import json
import tempfile
import unittest
import numpy as np

from taper_sfwm.analysis.calc_spectrum import decibels, photon_numbers
from taper_sfwm.dispersion.calc_dispersion import omega_from_nm
from taper_sfwm.exceptions import ConfigError, DomainError
from taper_sfwm.sweep.run_sweep import (CHECKPOINT_NAME, RESULT_NAME, SweepPlan, evaluate_point, load_checkpoint,
                                        run_sweep)
from taper_sfwm.utils.config import build_mode_size, build_profile, build_provider, build_pump, parse_config
from tests.synthetic import small_config


AXES = {'waveguide.modulation_depth': [0.0, 0.05, 0.1], 'pump.power_W': [0.5, 1.0]}


class Counter:
    """Deterministic stand-in for the point evaluation that counts its calls."""

    def __init__(self, fail_on=None, interrupt_after=None):
        self.calls = 0
        self.fail_on = fail_on
        self.interrupt_after = interrupt_after

    def __call__(self, config, point, observable, base_dir='.'):
        if self.interrupt_after is not None and self.calls >= self.interrupt_after:
            raise KeyboardInterrupt
        self.calls += 1
        if point == self.fail_on:
            raise DomainError('point outside the dispersion domain')
        value = point['waveguide.modulation_depth'] * 10 + point['pump.power_W']
        return {'N_expected': value, 'enhancement_dB': -value, 'purity': None}


def read(path):
    with open(path, 'rb') as fp:
        return fp.read()


class TestSweepPlan(unittest.TestCase):

    def test_points_order(self):
        plan = SweepPlan(axes=AXES, config=small_config(), output_dir='.')
        points = [point for _, point in plan.points()]
        self.assertEqual(plan.size, 6, 'Plan size is the product of the axis lengths')
        self.assertEqual(points[1], {'waveguide.modulation_depth': 0.0, 'pump.power_W': 1.0},
                         'The last axis must vary fastest')

    def test_duplicates_removed(self):
        plan = SweepPlan(axes={'pump.power_W': [1.0, 1.0, 2.0]}, config=small_config(), output_dir='.')
        self.assertEqual(plan.size, 2, 'Duplicate axis values must be evaluated once')

    def test_non_finite_value(self):
        with self.assertRaises(ConfigError, msg='A NaN axis value must be rejected'):
            SweepPlan(axes={'pump.power_W': [1.0, float('nan')]}, config=small_config(), output_dir='.')

    def test_unknown_observable(self):
        with self.assertRaises(ConfigError, msg='Unknown observables must be rejected'):
            SweepPlan(axes=AXES, config=small_config(), output_dir='.', observable='rate')


class TestRunSweep(unittest.TestCase):

    def test_resume_without_recomputation(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = SweepPlan(axes=AXES, config=small_config(), output_dir=tmp, chunk_size=2)
            first = Counter()
            run_sweep(plan, evaluate=first)
            table = read(os.path.join(tmp, RESULT_NAME))

            second = Counter()
            records = run_sweep(plan, evaluate=second)
            self.assertEqual(first.calls, 6, 'Every point must be evaluated once')
            self.assertEqual(second.calls, 0, 'A finished sweep must not recompute any point')
            self.assertEqual(len(records), 6, 'Records of every point must be returned')
            self.assertEqual(read(os.path.join(tmp, RESULT_NAME)), table, 'Resumed table must be identical')

    def test_interrupted_sweep(self):
        with tempfile.TemporaryDirectory() as tmp:
            fresh_dir = os.path.join(tmp, 'fresh')
            resumed_dir = os.path.join(tmp, 'resumed')
            run_sweep(SweepPlan(axes=AXES, config=small_config(), output_dir=fresh_dir, chunk_size=2),
                      evaluate=Counter())

            plan = SweepPlan(axes=AXES, config=small_config(), output_dir=resumed_dir, chunk_size=2)
            with self.assertRaises(KeyboardInterrupt):
                run_sweep(plan, evaluate=Counter(interrupt_after=3))
            with open(os.path.join(resumed_dir, CHECKPOINT_NAME), 'a') as fp:
                fp.write('{"key": "trunc')
            self.assertEqual(len(load_checkpoint(os.path.join(resumed_dir, CHECKPOINT_NAME))), 2,
                             'Only completed chunks and no truncated line must be kept')

            counter = Counter()
            run_sweep(plan, evaluate=counter)
            self.assertEqual(counter.calls, 4, 'Only the missing points must be evaluated')
            self.assertEqual(read(os.path.join(resumed_dir, RESULT_NAME)), read(os.path.join(fresh_dir, RESULT_NAME)),
                             'Resumed and uninterrupted sweeps must write the same table')

    def test_failed_point(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = SweepPlan(axes=AXES, config=small_config(), output_dir=tmp)
            bad = {'waveguide.modulation_depth': 0.05, 'pump.power_W': 0.5}
            records = run_sweep(plan, evaluate=Counter(fail_on=bad))
            failed = [r for r in records if r.status == 'failed']
            self.assertEqual(len(failed), 1, 'Exactly one point must fail')
            self.assertEqual(failed[0].parameters, bad, 'The failing point must be recorded')
            self.assertIn('DomainError', failed[0].error, 'The error class must be recorded')
            self.assertTrue(all(r.N_expected is not None for r in records if r.status == 'ok'),
                            'Other points must still be evaluated')

    def test_malformed_value_isolated(self):
        with tempfile.TemporaryDirectory() as tmp:
            plan = SweepPlan(axes={'grid.target_signal_nm': [750.0, 'abc', 760.0]}, config=small_config(),
                             output_dir=tmp)
            records = run_sweep(plan)
            self.assertEqual([r.status for r in records], ['ok', 'failed', 'ok'],
                             'Only the malformed point must fail')
            self.assertIn('ConfigError', records[1].error, 'The schema error must be recorded')
            self.assertTrue(all(r.N_expected > 0 for r in records if r.status == 'ok'),
                            'Valid points must still be evaluated')
            with open(os.path.join(tmp, RESULT_NAME), newline='') as fp:
                rows = list(csv.reader(fp))
            self.assertEqual(len(rows), 5, 'Provenance, header and one row per point')
            self.assertEqual(len({len(row) for row in rows[1:]}), 1, 'Every row must have as many fields as the header')

    def test_evaluator_value_error(self):
        def broken(config, point, observable, base_dir='.'):
            if point['pump.power_W'] == 1.0:
                raise ValueError('could not convert string to float')
            return {'N_expected': 1.0, 'enhancement_dB': 0.0, 'purity': None}

        with tempfile.TemporaryDirectory() as tmp:
            records = run_sweep(SweepPlan(axes=AXES, config=small_config(), output_dir=tmp), evaluate=broken)
            self.assertEqual(sum(r.status == 'failed' for r in records), 3, 'Each failing point is recorded')
            self.assertEqual(sum(r.status == 'ok' for r in records), 3, 'The other points must complete')

    def test_thread_invariance(self):
        with tempfile.TemporaryDirectory() as tmp:
            tables = []
            for threads in (1, 3):
                out = os.path.join(tmp, str(threads))
                run_sweep(SweepPlan(axes=AXES, config=small_config(), output_dir=out, chunk_size=4),
                          threads=threads, evaluate=Counter())
                tables.append(read(os.path.join(out, RESULT_NAME)))
            self.assertEqual(tables[0], tables[1], 'Threads must not change the sweep table')

    def test_log_written(self):
        with tempfile.TemporaryDirectory() as tmp:
            run_sweep(SweepPlan(axes=AXES, config=small_config(), output_dir=tmp), evaluate=Counter())
            with open(os.path.join(tmp, 'log.txt')) as fp:
                entry = json.loads(fp.readlines()[-1])
            self.assertEqual(entry['points'], 6, 'The sweep stage must be logged')


class TestEvaluatePoint(unittest.TestCase):

    def test_single_point_matches_direct(self):
        config = small_config()
        with tempfile.TemporaryDirectory() as tmp:
            plan = SweepPlan(axes={'waveguide.modulation_depth': [0.1]}, config=config, output_dir=tmp)
            record = run_sweep(plan)[0]

        run = parse_config(config)
        profile, provider, pump = build_profile(run), build_provider(run), build_pump(run)
        omega_s = omega_from_nm(np.array([750.0]))
        photons = photon_numbers(profile, provider, pump, run.dispersion.n2_m2_per_W, omega_s, None,
                                 build_mode_size(run))
        reference = photon_numbers(profile.with_changes(modulation_depth=0.0), provider, pump,
                                   run.dispersion.n2_m2_per_W, omega_s, None, build_mode_size(run))
        self.assertEqual(record.status, 'ok', 'The point must evaluate')
        self.assertEqual(record.N_expected, float(photons[0]), 'Sweep point must equal the direct calculation')
        self.assertEqual(record.enhancement_dB, float(decibels(photons, reference)[0]),
                         'Sweep enhancement must equal the direct calculation')

    def test_purity_needs_pulse(self):
        with self.assertRaises(ConfigError, msg='The purity observable must reject a cw pump'):
            evaluate_point(small_config(), {'pump.power_W': 1.0}, 'purity')


if __name__ == '__main__':
    unittest.main()
