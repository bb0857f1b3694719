from django.conf import settings

from mra import persistence
from mra.baselines import METHODS, reconstruct
from mra.mca import INIT_MODES
from mra.signal_core import nrmse

from ._base import MRACommand


class Command(MRACommand):
    help = 'Reconstruct a signal from a sample-set CSV'

    def add_command_arguments(self, parser):
        parser.add_argument('--samples', required=True, help='Sample-set CSV written by generate')
        parser.add_argument('--method', choices=METHODS, default='mca')
        parser.add_argument('--truth', default=None, help='Signal CSV used to score the result')
        parser.add_argument('--template', default=None, help='Template signal CSV (template method)')
        parser.add_argument('--shifts', default=None, help='True shifts CSV (oracle method)')
        parser.add_argument('--max-iter', type=int, default=None)
        parser.add_argument('--init-mode', choices=INIT_MODES, default='sample')

    def run(self, **options):
        X = persistence.read_sample_set(options['samples'])
        truth = persistence.read_signal(options['truth']) if options['truth'] else None
        template = persistence.read_signal(options['template']) if options['template'] else truth
        shifts = persistence.read_integers(options['shifts']) if options['shifts'] else None
        if options['method'] == 'template' and template is None:
            self.bad_config('The template method needs --template or --truth')
        if options['method'] == 'oracle' and shifts is None:
            self.bad_config('The oracle method needs --shifts')

        result = reconstruct(
            options['method'],
            X,
            tol=self.tol(options),
            max_iter=options['max_iter'] or settings.MRA['MAX_ITER'],
            seed=self.seed(options),
            template=template,
            true_shifts=shifts,
            noise_bias=settings.MRA['NOISE_BIAS'],
            init_mode=options['init_mode'],
        )
        out = self.out_dir(options)
        persistence.write_signals(out / 'reconstruction.csv', result.signal)
        report = {
            'method': result.method,
            'iterations': result.iterations,
            'converged': result.converged,
            'warnings': list(result.warnings),
            'wall_time_seconds': result.wall_time_seconds,
            'loss_trace': result.loss_trace,
            'log_likelihood_trace': result.log_likelihood_trace,
        }
        if truth is not None:
            report['nrmse'] = nrmse(result.signal, truth)
        persistence.write_json(out / 'reconstruction.json', report)

        line = f'{result.method}: {result.iterations} iterations, converged={result.converged}'
        if truth is not None:
            line += f", nrmse={report['nrmse']:.6g}"
        self.stdout.write(self.style.SUCCESS(line))
        for warning in result.warnings:
            self.stdout.write(self.style.WARNING(warning))
