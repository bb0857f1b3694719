from mra.baselines import METHODS
from mra.harness import run_benchmark
from mra.models import ExperimentRun

from ._base import MRACommand, float_list


class Command(MRACommand):
    help = 'Sweep noise levels, reconstruct repeatedly and write runs.csv and summary.csv'

    def add_command_arguments(self, parser):
        self.add_signal_arguments(parser)
        parser.add_argument('--method', choices=METHODS, default=None)
        parser.add_argument('--taus', type=float_list, default=None, help='Comma-separated noise levels')
        parser.add_argument('--n', type=int, default=None, help='Samples per run')
        parser.add_argument('--runs', type=int, default=None, help='Runs per noise level')
        parser.add_argument('--max-iter', type=int, default=None)
        parser.add_argument('--no-timing', action='store_true', help='Write wall_s = 0 for reproducible files')
        parser.add_argument('--track-loss', action='store_true')
        parser.add_argument('--store', action='store_true', help='Also store the sweep in the database')
        parser.add_argument('--name', default='', help='Experiment name when storing')

    def run(self, **options):
        cfg = self.build_config(
            options,
            method=options['method'],
            tau_list=options['taus'],
            n_samples=options['n'],
            runs=options['runs'],
            max_iter=options['max_iter'],
            timing=False if options['no_timing'] else None,
            track_loss=True if options['track_loss'] else None,
        )
        if options['store']:
            experiment = ExperimentRun.objects.create(name=options['name'], method=cfg.method, config=cfg.as_dict())
            records = experiment.execute(cfg)
            self.stdout.write(f'Stored as experiment {experiment.id}')
        else:
            records = run_benchmark(cfg)

        failures = sum(r.failed for r in records)
        self.stdout.write(self.style.SUCCESS(
            f'{cfg.method}: {len(records)} runs, {failures} failed, written to {cfg.output_dir}'
        ))
