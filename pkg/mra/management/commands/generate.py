from mra import persistence
from mra.sampling import generate_samples

from ._base import MRACommand


class Command(MRACommand):
    help = 'Draw a shifted, noisy sample set from a test signal'

    def add_command_arguments(self, parser):
        self.add_signal_arguments(parser)
        parser.add_argument('--tau', type=float, required=True, help='Noise standard deviation')
        parser.add_argument('--n', type=int, default=10_000, help='Number of samples')

    def run(self, **options):
        if options['tau'] < 0 or options['n'] < 1:
            self.bad_config('--tau must be nonnegative and --n at least 1')
        x = self.build_signal(options)
        X, shifts = generate_samples(x, options['tau'], options['n'], self.seed(options))
        out = self.out_dir(options)
        persistence.write_signals(out / 'signal.csv', x)
        persistence.write_sample_set(out / 'samples.csv', X)
        persistence.write_integers(out / 'shifts.csv', shifts)
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {X.n_samples} samples of length {X.length} at tau={X.tau:g} to {out}'
        ))
