from django.core.management.base import CommandError

from mra import persistence
from mra.harness import CHECKS, PROFILES, verify_suite

from ._base import EXIT_CHECK_FAILED, MRACommand


class Command(MRACommand):
    help = 'Run the numerical verification battery and write verify.json'

    def add_command_arguments(self, parser):
        parser.add_argument('--profile', choices=PROFILES, default='full')
        parser.add_argument('--checks', default=None,
                            help=f"Comma-separated subset of: {', '.join(CHECKS)}")

    def run(self, **options):
        checks = [c for c in options['checks'].split(',') if c] if options['checks'] else None
        report = verify_suite(options['profile'], checks, self.seed(options))
        path = persistence.write_json(self.out_dir(options) / 'verify.json', report.as_dict())
        for check in report.checks:
            label = 'PASS' if check.passed else ('FAIL' if check.hard else 'WARN')
            style = self.style.SUCCESS if check.passed else self.style.ERROR
            self.stdout.write(style(f'{label} {check.name} ({check.seconds:.1f}s)'))
        if not report.passed:
            raise CommandError(f'Verification failed, see {path}', returncode=EXIT_CHECK_FAILED)
        self.stdout.write(self.style.SUCCESS(f'All hard checks passed, report in {path}'))
