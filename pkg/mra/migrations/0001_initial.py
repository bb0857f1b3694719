# Generated by Django 4.2.10 on 2026-10-17 09:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=255)),
                ('method', models.CharField(choices=[('mca', 'Mca'), ('em', 'Em'), ('bispectrum', 'Bispectrum'), ('template', 'Template'), ('oracle', 'Oracle')], max_length=20)),
                ('config', models.JSONField(help_text='ExperimentConfig as submitted, tau_list included')),
                ('status', models.CharField(choices=[('PENDING', 'Pending'), ('RUNNING', 'Running'), ('COMPLETED', 'Completed'), ('FAILED', 'Failed')], default='PENDING', max_length=20)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('error_message', models.TextField(blank=True)),
                ('started_at', models.DateTimeField(blank=True, null=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_index', models.PositiveIntegerField()),
                ('method', models.CharField(choices=[('mca', 'Mca'), ('em', 'Em'), ('bispectrum', 'Bispectrum'), ('template', 'Template'), ('oracle', 'Oracle')], max_length=20)),
                ('tau', models.FloatField()),
                ('n_samples', models.PositiveIntegerField()),
                ('seed', models.BigIntegerField(help_text='Data-stream seed of this run')),
                ('nrmse', models.FloatField(blank=True, null=True)),
                ('iterations', models.PositiveIntegerField(default=0)),
                ('wall_time_seconds', models.FloatField(default=0.0)),
                ('converged', models.BooleanField(default=False)),
                ('error', models.TextField(blank=True)),
                ('experiment', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='records', to='mra.experimentrun')),
            ],
            options={
                'ordering': ['experiment', 'run_index'],
                'unique_together': {('experiment', 'run_index')},
            },
        ),
    ]
