import logging
import math

import numpy as np
from rest_framework import mixins, status, viewsets
from rest_framework.decorators import action, api_view
from rest_framework.response import Response

from .baselines import reconstruct
from .exceptions import MRAError
from .models import ExperimentRun, RunRecord
from .serializers import (
    ExperimentConfigSerializer,
    ExperimentRunSerializer,
    ReconstructRequestSerializer,
    RunRecordSerializer,
    mra_setting,
)
from .signal_core import SampleSet, nrmse

logger = logging.getLogger(__name__)


def _json_safe(row):
    """Strict JSON has no NaN; missing statistics go out as null."""
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in row.items()}


class ExperimentRunViewSet(mixins.CreateModelMixin,
                           mixins.ListModelMixin,
                           mixins.RetrieveModelMixin,
                           mixins.DestroyModelMixin,
                           viewsets.GenericViewSet):
    queryset = ExperimentRun.objects.all()
    serializer_class = ExperimentRunSerializer

    def get_queryset(self):
        queryset = super().get_queryset()
        method = self.request.query_params.get('method')
        if method:
            queryset = queryset.filter(method=method)
        run_status = self.request.query_params.get('status')
        if run_status:
            queryset = queryset.filter(status=run_status.upper())
        return queryset

    def create(self, request, *args, **kwargs):
        """Validate the config, run the sweep synchronously and store its rows."""
        config_serializer = ExperimentConfigSerializer(data=request.data.get('config', {}))
        config_serializer.is_valid(raise_exception=True)
        cfg = config_serializer.save()

        experiment = ExperimentRun.objects.create(
            name=request.data.get('name', ''),
            method=cfg.method,
            config=cfg.as_dict(),
        )
        logger.info(f"Experiment {experiment.id}: {cfg.method} over {len(cfg.tau_list)} noise levels")
        try:
            experiment.execute(cfg)
        except Exception as e:
            logger.exception(f"Error running experiment {experiment.id}: {str(e)}")
            return Response(
                {'error': str(e), 'id': experiment.id},
                status=status.HTTP_500_INTERNAL_SERVER_ERROR
            )
        return Response(self.get_serializer(experiment).data, status=status.HTTP_201_CREATED)

    @action(detail=True, methods=['get'])
    def summary(self, request, pk=None):
        experiment = self.get_object()
        try:
            rows = [_json_safe(row) for row in experiment.summary()]
            return Response({'experiment': experiment.id, 'rows': rows})
        except Exception as e:
            logger.exception(f"Error summarizing experiment {pk}: {str(e)}")
            return Response({'error': str(e)}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)


class RunRecordViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = RunRecord.objects.all().select_related('experiment')
    serializer_class = RunRecordSerializer

    def get_queryset(self):
        queryset = super().get_queryset()
        params = self.request.query_params
        if params.get('experiment'):
            queryset = queryset.filter(experiment_id=params['experiment'])
        if params.get('method'):
            queryset = queryset.filter(method=params['method'])
        if params.get('tau'):
            try:
                tau = float(params['tau'])
            except ValueError:
                return queryset.none()
            # tau values are stored as computed, so match within a relative tolerance
            queryset = queryset.filter(tau__gte=tau * (1 - 1e-9), tau__lte=tau * (1 + 1e-9))
        return queryset


@api_view(['POST'])
def reconstruct_view(request):
    serializer = ReconstructRequestSerializer(data=request.data)
    serializer.is_valid(raise_exception=True)
    data = serializer.validated_data

    try:
        X = SampleSet(np.array(data['samples']), data['tau'])
        template = data.get('template', data.get('truth'))
        result = reconstruct(
            data['method'],
            X,
            tol=data.get('tol', mra_setting('TOLERANCE')),
            max_iter=data.get('max_iter', mra_setting('MAX_ITER')),
            seed=data.get('seed', mra_setting('DEFAULT_SEED')),
            template=np.array(template) if template is not None else None,
            true_shifts=data.get('true_shifts'),
            noise_bias=mra_setting('NOISE_BIAS'),
        )
        payload = {
            'method': result.method,
            'signal': result.signal.tolist(),
            'iterations': result.iterations,
            'converged': result.converged,
            'warnings': list(result.warnings),
            'wall_time_seconds': result.wall_time_seconds,
        }
        if 'truth' in data:
            payload['nrmse'] = nrmse(result.signal, np.array(data['truth']))
        return Response(payload)
    except MRAError as e:
        logger.warning(f"Reconstruction rejected: {str(e)}")
        return Response({'error': str(e)}, status=status.HTTP_400_BAD_REQUEST)
    except Exception as e:
        logger.exception(f"Error in reconstruction: {str(e)}")
        return Response({'error': str(e)}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
