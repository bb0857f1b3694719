from mra.baselines import METHODS
from mra.harness import sample_efficiency

from ._base import MRACommand, float_list


class Command(MRACommand):
    help = 'Find the sample count needed to reach each target NRMSE, per noise level'

    def add_command_arguments(self, parser):
        self.add_signal_arguments(parser)
        parser.add_argument('--method', choices=METHODS, default=None)
        parser.add_argument('--taus', type=float_list, default=None)
        parser.add_argument('--eps', type=float_list, default=[0.1], help='Comma-separated target errors')
        parser.add_argument('--n-max', type=int, default=100_000)
        parser.add_argument('--replicates', type=int, default=5)
        parser.add_argument('--max-iter', type=int, default=None)

    def run(self, **options):
        if not options['eps'] or any(e <= 0 for e in options['eps']):
            self.bad_config('--eps needs positive values')
        if options['replicates'] < 1:
            self.bad_config('--replicates must be at least 1')
        cfg = self.build_config(
            options,
            method=options['method'],
            tau_list=options['taus'],
            max_iter=options['max_iter'],
        )
        report = sample_efficiency(cfg, options['eps'], options['n_max'], options['replicates'])
        censored = sum(row['censored'] for row in report.rows)
        self.stdout.write(self.style.SUCCESS(
            f'{cfg.method}: {len(report.rows)} rows ({censored} censored), written to {cfg.output_dir}'
        ))
        for slope in report.slopes:
            self.stdout.write(f"eps={slope['eps']:g} {slope['window']}: slope={slope['slope']:.3f} "
                              f"over {slope['points']} points")
