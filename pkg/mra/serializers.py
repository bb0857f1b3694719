import logging
from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from .baselines import METHODS
from .exceptions import ConfigurationError
from .harness import DEFAULT_TAUS, SIGNAL_KINDS, ExperimentConfig, SignalSpec
from .models import ExperimentRun, RunRecord
from .signal_core import NOISE_BIAS_CHOICES

logger = logging.getLogger(__name__)


def mra_setting(name):
    return settings.MRA[name]


class SignalSpecSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=SIGNAL_KINDS, default='square')
    length = serializers.IntegerField(min_value=1, default=41)
    width = serializers.IntegerField(min_value=0, default=21)
    height = serializers.FloatField(default=1.0)
    k = serializers.IntegerField(min_value=0, default=1)
    c = serializers.FloatField(default=1.0)
    path = serializers.CharField(allow_blank=True, default='')

    def validate(self, data):
        if data['kind'] == 'square' and data['width'] > data['length']:
            raise serializers.ValidationError({'width': 'Width cannot exceed the signal length'})
        if data['kind'] == 'custom':
            if not data['path']:
                raise serializers.ValidationError({'path': 'A custom signal needs a CSV path'})
            if not Path(data['path']).is_file():
                raise serializers.ValidationError({'path': f"No such file: {data['path']}"})
        return data

    def create(self, validated_data):
        return SignalSpec(**validated_data)


class ExperimentConfigSerializer(serializers.Serializer):
    """Validates experiment JSON and builds an ExperimentConfig.

    Fields left out fall back to the ``MRA`` settings, then to the harness defaults.
    """
    signal = SignalSpecSerializer(required=False)
    method = serializers.ChoiceField(choices=METHODS, default='mca')
    tau_list = serializers.ListField(
        child=serializers.FloatField(min_value=0.0),
        allow_empty=False,
        required=False
    )
    n_samples = serializers.IntegerField(min_value=1, default=10_000)
    runs = serializers.IntegerField(min_value=1, default=40)
    tol = serializers.FloatField(required=False)
    seed = serializers.IntegerField(min_value=0, required=False)
    output_dir = serializers.CharField(required=False)
    threads = serializers.IntegerField(min_value=1, required=False)
    max_iter = serializers.IntegerField(min_value=1, required=False)
    timing = serializers.BooleanField(default=True)
    track_loss = serializers.BooleanField(default=False)
    noise_bias = serializers.ChoiceField(choices=NOISE_BIAS_CHOICES, required=False)
    warm_start_iters = serializers.IntegerField(min_value=0, default=3000)
    warm_start_batch = serializers.IntegerField(min_value=1, default=1000)

    def validate_tol(self, value):
        if not value > 0:
            raise serializers.ValidationError('Tolerance must be positive')
        return value

    def create(self, validated_data):
        data = dict(validated_data)
        signal = data.pop('signal', None)
        data['signal'] = SignalSpec(**signal) if signal else SignalSpec()
        data.setdefault('tau_list', DEFAULT_TAUS)
        data.setdefault('tol', mra_setting('TOLERANCE'))
        data.setdefault('seed', mra_setting('DEFAULT_SEED'))
        data.setdefault('output_dir', str(mra_setting('OUTPUT_DIR')))
        data.setdefault('threads', mra_setting('THREADS'))
        data.setdefault('max_iter', mra_setting('MAX_ITER'))
        data.setdefault('noise_bias', mra_setting('NOISE_BIAS'))
        try:
            return ExperimentConfig(**data)
        except ConfigurationError as e:
            raise serializers.ValidationError(str(e))


class RunRecordSerializer(serializers.ModelSerializer):
    class Meta:
        model = RunRecord
        fields = [
            'id', 'experiment', 'run_index', 'method', 'tau', 'n_samples', 'seed',
            'nrmse', 'iterations', 'wall_time_seconds', 'converged', 'error'
        ]
        read_only_fields = fields


class ExperimentRunSerializer(serializers.ModelSerializer):
    record_count = serializers.IntegerField(source='records.count', read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'name', 'method', 'config', 'status', 'output_dir', 'error_message',
            'record_count', 'started_at', 'finished_at', 'created_at', 'updated_at'
        ]
        read_only_fields = [
            'id', 'method', 'status', 'output_dir', 'error_message', 'record_count',
            'started_at', 'finished_at', 'created_at', 'updated_at'
        ]


class ReconstructRequestSerializer(serializers.Serializer):
    method = serializers.ChoiceField(choices=METHODS, default='mca')
    samples = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), allow_empty=False),
        allow_empty=False
    )
    tau = serializers.FloatField(min_value=0.0, default=0.0)
    truth = serializers.ListField(child=serializers.FloatField(), required=False)
    template = serializers.ListField(child=serializers.FloatField(), required=False)
    true_shifts = serializers.ListField(child=serializers.IntegerField(), required=False)
    tol = serializers.FloatField(required=False)
    max_iter = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, required=False)

    def validate(self, data):
        length = len(data['samples'][0])
        if any(len(row) != length for row in data['samples']):
            raise serializers.ValidationError({'samples': 'All samples must have the same length'})
        for name in ('truth', 'template'):
            if name in data and len(data[name]) != length:
                raise serializers.ValidationError({name: f'Expected {length} values'})
        if data['method'] == 'template' and 'template' not in data and 'truth' not in data:
            raise serializers.ValidationError({'template': 'The template method needs a template or the truth'})
        if data['method'] == 'oracle':
            if 'true_shifts' not in data:
                raise serializers.ValidationError({'true_shifts': 'The oracle method needs the true shifts'})
            if len(data['true_shifts']) != len(data['samples']):
                raise serializers.ValidationError({'true_shifts': 'Expected one shift per sample'})
        if 'tol' in data and not data['tol'] > 0:
            raise serializers.ValidationError({'tol': 'Tolerance must be positive'})
        return data
