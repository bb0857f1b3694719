import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from mra.exceptions import MRAError
from mra.harness import SIGNAL_KINDS
from mra.serializers import ExperimentConfigSerializer, SignalSpecSerializer

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2

SIGNAL_OPTIONS = ('kind', 'length', 'width', 'height', 'k', 'c', 'path')


def float_list(text):
    return [float(v) for v in text.split(',') if v.strip()]


class MRACommand(BaseCommand):
    """Shared flags (--seed, --out, --threads, --tol, --config) and exit codes.

    Toolkit errors and invalid configuration exit with 2, failed checks with 1.
    """

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=None, help='Master seed (default: MRA_SEED)')
        parser.add_argument('--out', default=None, help='Output directory (default: MRA_OUTPUT_DIR)')
        parser.add_argument('--threads', type=int, default=None, help='Worker threads')
        parser.add_argument('--tol', type=float, default=None, help='Convergence tolerance')
        parser.add_argument('--config', default=None, help='JSON file with experiment fields')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def add_signal_arguments(self, parser):
        parser.add_argument('--signal-kind', dest='kind', choices=SIGNAL_KINDS, default=None)
        parser.add_argument('--length', type=int, default=None)
        parser.add_argument('--width', type=int, default=None)
        parser.add_argument('--height', type=float, default=None)
        parser.add_argument('--k', type=int, default=None)
        parser.add_argument('--c', type=float, default=None)
        parser.add_argument('--signal-path', dest='path', default=None)

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except MRAError as e:
            raise CommandError(str(e), returncode=EXIT_BAD_CONFIG)

    def run(self, **options):
        raise NotImplementedError

    def bad_config(self, message):
        raise CommandError(message, returncode=EXIT_BAD_CONFIG)

    def seed(self, options):
        return options['seed'] if options['seed'] is not None else settings.MRA['DEFAULT_SEED']

    def tol(self, options):
        return options['tol'] if options['tol'] is not None else settings.MRA['TOLERANCE']

    def out_dir(self, options):
        path = Path(options['out'] if options['out'] else settings.MRA['OUTPUT_DIR'])
        path.mkdir(parents=True, exist_ok=True)
        return path

    def load_config_file(self, options):
        if not options.get('config'):
            return {}
        try:
            with open(options['config']) as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            self.bad_config(f"Cannot read config {options['config']}: {e}")
        if not isinstance(data, dict):
            self.bad_config('Config file must hold a JSON object')
        return data

    def signal_data(self, options, base=None):
        data = dict(base or {})
        data.update({k: options[k] for k in SIGNAL_OPTIONS if options.get(k) is not None})
        return data

    def build_signal(self, options):
        serializer = SignalSpecSerializer(data=self.signal_data(options))
        if not serializer.is_valid():
            self.bad_config(f'Invalid signal: {serializer.errors}')
        return serializer.save().build()

    def build_config(self, options, **overrides):
        """Merge the config file, the global flags and command overrides, then validate."""
        data = self.load_config_file(options)
        data['signal'] = self.signal_data(options, data.get('signal'))
        flags = {'seed': options['seed'], 'output_dir': options['out'],
                 'threads': options['threads'], 'tol': options['tol']}
        data.update({k: v for k, v in flags.items() if v is not None})
        data.update({k: v for k, v in overrides.items() if v is not None})
        serializer = ExperimentConfigSerializer(data=data)
        if not serializer.is_valid():
            self.bad_config(f'Invalid configuration: {serializer.errors}')
        try:
            cfg = serializer.save()
        except ValidationError as e:
            self.bad_config(f"Invalid configuration: {e.detail}")
        logger.info(f'Configuration: {cfg.as_dict()}')
        return cfg
