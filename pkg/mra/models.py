import logging
import math

from django.core.exceptions import ValidationError
from django.db import models, transaction
from django.utils import timezone

from . import harness
from .baselines import METHODS

logger = logging.getLogger(__name__)


class ExperimentRun(models.Model):
    METHOD_CHOICES = [(m, m.capitalize()) for m in METHODS]

    STATUS_CHOICES = [
        ('PENDING', 'Pending'),
        ('RUNNING', 'Running'),
        ('COMPLETED', 'Completed'),
        ('FAILED', 'Failed'),
    ]

    name = models.CharField(max_length=255, blank=True)
    method = models.CharField(max_length=20, choices=METHOD_CHOICES)
    config = models.JSONField(help_text="ExperimentConfig as submitted, tau_list included")
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='PENDING')
    output_dir = models.CharField(max_length=500, blank=True)
    error_message = models.TextField(blank=True)
    started_at = models.DateTimeField(null=True, blank=True)
    finished_at = models.DateTimeField(null=True, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.name or self.method} ({self.status})"

    def clean(self):
        super().clean()
        if not isinstance(self.config, dict):
            raise ValidationError('Config must be a JSON object')
        if self.config.get('method', self.method) != self.method:
            raise ValidationError('Config method does not match the experiment method')
        if self.finished_at and self.started_at and self.finished_at < self.started_at:
            raise ValidationError('Finish time must not precede start time')

    def save(self, *args, **kwargs):
        self.clean()
        super().save(*args, **kwargs)

    def store_records(self, records):
        """Replace this experiment's rows with harness RunRecords, keeping their order."""
        with transaction.atomic():
            self.records.all().delete()
            rows = []
            for index, record in enumerate(records):
                row = RunRecord(
                    experiment=self,
                    run_index=index,
                    method=record.method,
                    tau=record.tau,
                    n_samples=record.n_samples,
                    seed=record.seed,
                    nrmse=record.nrmse if math.isfinite(record.nrmse) else None,
                    iterations=record.iterations,
                    wall_time_seconds=record.wall_time_seconds,
                    converged=record.converged,
                    error=record.error,
                )
                row.clean()
                rows.append(row)
            RunRecord.objects.bulk_create(rows)
        logger.info(f"Stored {len(rows)} run records for experiment {self.pk}")
        return len(rows)

    def execute(self, cfg):
        """Run the sweep described by cfg and store its rows; status follows the outcome."""
        self.status = 'RUNNING'
        self.started_at = timezone.now()
        self.output_dir = cfg.output_dir
        self.save()
        try:
            records = harness.run_benchmark(cfg)
        except Exception as e:
            logger.exception(f"Experiment {self.pk} failed")
            self.status = 'FAILED'
            self.error_message = str(e)
            self.finished_at = timezone.now()
            self.save()
            raise
        self.store_records(records)
        self.status = 'COMPLETED'
        self.finished_at = timezone.now()
        self.save()
        return records

    def summary(self):
        return harness.summarize([r.to_record() for r in self.records.all()])


class RunRecord(models.Model):
    experiment = models.ForeignKey(
        ExperimentRun,
        on_delete=models.CASCADE,
        related_name='records'
    )
    run_index = models.PositiveIntegerField()
    method = models.CharField(max_length=20, choices=ExperimentRun.METHOD_CHOICES)
    tau = models.FloatField()
    n_samples = models.PositiveIntegerField()
    seed = models.BigIntegerField(help_text="Data-stream seed of this run")
    nrmse = models.FloatField(null=True, blank=True)
    iterations = models.PositiveIntegerField(default=0)
    wall_time_seconds = models.FloatField(default=0.0)
    converged = models.BooleanField(default=False)
    error = models.TextField(blank=True)

    class Meta:
        ordering = ['experiment', 'run_index']
        unique_together = ['experiment', 'run_index']

    def __str__(self):
        return f"{self.method} tau={self.tau:g} #{self.run_index}"

    def clean(self):
        super().clean()
        if self.tau < 0:
            raise ValidationError('Noise level must be nonnegative')
        if self.nrmse is not None and self.nrmse < 0:
            raise ValidationError('NRMSE must be nonnegative')
        if self.wall_time_seconds < 0:
            raise ValidationError('Wall time must be nonnegative')
        if self.error and self.nrmse is not None:
            raise ValidationError('A failed run has no NRMSE')

    def to_record(self):
        return harness.RunRecord(
            method=self.method,
            tau=self.tau,
            n_samples=self.n_samples,
            seed=self.seed,
            nrmse=math.nan if self.nrmse is None else self.nrmse,
            iterations=self.iterations,
            wall_time_seconds=self.wall_time_seconds,
            converged=self.converged,
            error=self.error,
        )

    def save(self, *args, **kwargs):
        self.clean()
        super().save(*args, **kwargs)
