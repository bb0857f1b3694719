from django.core.management.base import CommandError

from mra import persistence
from mra.harness import TORUS_EXAMPLE
from mra.landscape import (
    classify_critical,
    critical_bound,
    enumerate_sign_criticals,
    morse_census_report,
    torus_loss_grid,
    verify_critical,
)
from mra.rng import derive_seed
from mra.signal_core import as_signal

from ._base import EXIT_CHECK_FAILED, MRACommand


class Command(MRACommand):
    help = 'Loss landscape tools: torus grid, Morse census, critical-point verification'

    def add_command_arguments(self, parser):
        parser.add_argument('action', choices=['grid', 'census', 'verify'])
        parser.add_argument('--signal', default=None,
                            help='Signal CSV (default: the L=5 two-frequency example)')
        parser.add_argument('--tau', type=float, default=1.0)
        parser.add_argument('--n', type=int, default=100_000, help='Samples for the grid')
        parser.add_argument('--resolution', type=int, default=256)
        parser.add_argument('--grid', default=None, help='Existing grid CSV for census')
        parser.add_argument('--smoothing', type=int, default=3)
        parser.add_argument('--neighborhood', type=int, choices=[6, 8], default=6,
                            help='Census ring: 6 (triangulated, default) or 8 neighbours')
        parser.add_argument('--mc', type=int, default=1_000_000, help='Monte Carlo draws per critical point')
        parser.add_argument('--classify', action='store_true', help='Also classify each critical point')

    def run(self, **options):
        if options['tau'] < 0:
            self.bad_config('--tau must be nonnegative')
        x = persistence.read_signal(options['signal']) if options['signal'] else as_signal(TORUS_EXAMPLE)
        out = self.out_dir(options)
        seed = self.seed(options)
        getattr(self, f"_{options['action']}")(x, out, seed, options)

    def _grid(self, x, out, seed, options):
        grid = torus_loss_grid(x, options['tau'], options['n'], options['resolution'], seed,
                               threads=options['threads'])
        persistence.write_grid(out / 'grid.csv', grid)
        report = morse_census_report(grid, options['smoothing'], options['neighborhood'])
        persistence.write_json(out / 'census.json', report)
        self.stdout.write(self.style.SUCCESS(f"Grid {grid.resolution}x{grid.resolution} written, "
                                             f"census {report['smoothed']}"))

    def _census(self, x, out, seed, options):
        if options['grid']:
            losses = persistence.read_grid_losses(options['grid'])
        else:
            losses = torus_loss_grid(x, options['tau'], options['n'], options['resolution'], seed,
                                     threads=options['threads'])
        report = morse_census_report(losses, options['smoothing'], options['neighborhood'])
        persistence.write_json(out / 'census.json', report)
        self.stdout.write(self.style.SUCCESS(f"Census {report['smoothed']}"))

    def _verify(self, x, out, seed, options):
        tau, M = options['tau'], options['mc']
        bound = critical_bound(tau, x.size, M)
        rows = []
        for i, candidate in enumerate(enumerate_sign_criticals(x)):
            value = verify_critical(candidate, x, tau, M, derive_seed(seed, 'critical', i))
            if options['classify']:
                candidate.classification = classify_critical(candidate, x, tau, M, derive_seed(seed, 'classify', i))
            rows.append({
                'sign_mask': list(candidate.sign_mask),
                'tangent_grad_norm': value,
                'classification': candidate.classification,
                'passed': value <= bound,
            })
            self.stdout.write(f"{list(candidate.sign_mask)}: {value:.3e} "
                              f"({'ok' if value <= bound else 'above bound'}) {candidate.classification}")
        path = persistence.write_json(out / 'critical.json', {'tau': tau, 'M': M, 'bound': bound, 'candidates': rows})
        if not all(row['passed'] for row in rows):
            raise CommandError(f'Critical-point check failed, see {path}', returncode=EXIT_CHECK_FAILED)
        self.stdout.write(self.style.SUCCESS(f'All {len(rows)} candidates within {bound:.3e}'))
