import json
import tempfile
from io import StringIO
from pathlib import Path

from numpy.testing import assert_allclose
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from mra import persistence
from mra.models import ExperimentRun
from mra.rng import make_rng
from mra.signal_core import square_wave


class CommandTestCase(TestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.out = Path(tmp.name)

    def call(self, name, *args):
        stdout = StringIO()
        call_command(name, *args, '--out', str(self.out), stdout=stdout)
        return stdout.getvalue()

    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(name, *args)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class GenerateReconstructTests(CommandTestCase):
    def setUp(self):
        super().setUp()
        self.call('generate', '--tau', '0', '--n', '40', '--length', '12', '--width', '5', '--seed', '3')

    def test_generate_writes_inputs(self):
        assert_allclose(persistence.read_signal(self.out / 'signal.csv'), square_wave(12, 5))
        X = persistence.read_sample_set(self.out / 'samples.csv')
        self.assertEqual((X.n_samples, X.length, X.tau), (40, 12, 0.0))
        self.assertEqual(persistence.read_integers(self.out / 'shifts.csv').size, 40)

    def test_oracle_reconstruction(self):
        output = self.call('reconstruct', '--samples', str(self.out / 'samples.csv'), '--method', 'oracle',
                           '--truth', str(self.out / 'signal.csv'), '--shifts', str(self.out / 'shifts.csv'))
        self.assertIn('oracle', output)
        report = json.loads((self.out / 'reconstruction.json').read_text())
        self.assertLessEqual(report['nrmse'], 1e-12)
        self.assertTrue(report['converged'])
        self.assertEqual(persistence.read_signal(self.out / 'reconstruction.csv').size, 12)

    def test_oracle_needs_shifts(self):
        self.assertExitCode(2, 'reconstruct', '--samples', str(self.out / 'samples.csv'), '--method', 'oracle')

    def test_bad_noise_level(self):
        self.assertExitCode(2, 'generate', '--tau', '-1')


class BenchmarkCommandTests(CommandTestCase):
    args = ('--method', 'oracle', '--taus', '0,0.5', '--n', '100', '--runs', '2',
            '--length', '12', '--width', '5', '--no-timing')

    def test_writes_tables(self):
        self.call('benchmark', *self.args)
        runs = persistence.read_table(self.out / 'runs.csv')
        self.assertEqual(len(runs), 4)
        self.assertTrue(all(row['wall_s'] == '0' for row in runs))
        self.assertEqual(len(persistence.read_table(self.out / 'summary.csv')), 2)

    def test_store_in_database(self):
        output = self.call('benchmark', *self.args, '--store', '--name', 'sweep')
        experiment = ExperimentRun.objects.get(name='sweep')
        self.assertIn(f'experiment {experiment.id}', output)
        self.assertEqual(experiment.status, 'COMPLETED')
        self.assertEqual(experiment.records.count(), 4)

    def test_config_file_and_flags_merge(self):
        config = self.out / 'config.json'
        config.write_text(json.dumps({'method': 'template', 'runs': 1, 'tau_list': [0.25],
                                      'signal': {'kind': 'square', 'length': 8, 'width': 3}}))
        self.call('benchmark', '--config', str(config), '--n', '50', '--no-timing')
        runs = persistence.read_table(self.out / 'runs.csv')
        self.assertEqual([(r['method'], r['N']) for r in runs], [('template', '50')])

    def test_invalid_configuration(self):
        self.assertExitCode(2, 'benchmark', *self.args, '--runs', '0')
        self.assertExitCode(2, 'benchmark', '--width', '20', '--length', '10')

    def test_unreadable_config_file(self):
        self.assertExitCode(2, 'benchmark', '--config', str(self.out / 'missing.json'))


class EfficiencyCommandTests(CommandTestCase):
    def test_oracle_efficiency(self):
        output = self.call('efficiency', '--method', 'oracle', '--taus', '0.5,1', '--eps', '0.1', '--n-max', '2000',
                           '--replicates', '3', '--length', '12', '--width', '5')
        self.assertIn('0 censored', output)
        rows = persistence.read_table(self.out / 'efficiency.csv')
        self.assertEqual([float(r['tau']) for r in rows], [0.5, 1.0])
        self.assertEqual(len(persistence.read_table(self.out / 'efficiency_slopes.csv')), 3)

    def test_rejects_nonpositive_targets(self):
        self.assertExitCode(2, 'efficiency', '--eps', '0.1,-1')


class VerifyCommandTests(CommandTestCase):
    def test_passing_subset(self):
        output = self.call('verify', '--profile', 'quick', '--checks', 'gaussian_max,dihedral')
        self.assertIn('PASS gaussian_max', output)
        report = json.loads((self.out / 'verify.json').read_text())
        self.assertTrue(report['passed'])
        self.assertEqual(len(report['checks']), 2)

    def test_unknown_check(self):
        self.assertExitCode(2, 'verify', '--checks', 'everything')


class LandscapeCommandTests(CommandTestCase):
    def test_grid_then_census(self):
        self.call('landscape', 'grid', '--n', '200', '--resolution', '8', '--smoothing', '0')
        self.assertEqual(len(persistence.read_table(self.out / 'grid.csv')), 64)
        first = json.loads((self.out / 'census.json').read_text())
        self.call('landscape', 'census', '--grid', str(self.out / 'grid.csv'), '--smoothing', '0')
        second = json.loads((self.out / 'census.json').read_text())
        self.assertEqual(first, second)

    def test_grid_needs_two_frequencies(self):
        path = persistence.write_signals(self.out / 'x.csv', make_rng(1).standard_normal(7))
        error = self.assertExitCode(2, 'landscape', 'grid', '--signal', str(path), '--resolution', '8')
        self.assertIn('grid requires 2-torus', str(error))

    def test_verify_candidates(self):
        self.call('landscape', 'verify', '--mc', '100000', '--tau', '0.5')
        report = json.loads((self.out / 'critical.json').read_text())
        self.assertEqual(len(report['candidates']), 4)
        self.assertTrue(all(c['passed'] for c in report['candidates']))
