from django.contrib import admin

from .models import ExperimentRun, RunRecord


class RunRecordInline(admin.TabularInline):
    model = RunRecord
    extra = 0
    can_delete = False
    fields = ('run_index', 'tau', 'n_samples', 'nrmse', 'iterations', 'wall_time_seconds', 'converged', 'error')
    readonly_fields = fields


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'name', 'method', 'status', 'started_at', 'finished_at', 'created_at')
    list_filter = ('method', 'status')
    search_fields = ('name', 'error_message')
    ordering = ('-created_at',)
    readonly_fields = ('started_at', 'finished_at', 'created_at', 'updated_at')
    inlines = [RunRecordInline]
    fieldsets = (
        (None, {
            'fields': ('name', 'method', 'status', 'output_dir')
        }),
        ('Configuration', {
            'fields': ('config',),
            'classes': ('collapse',),
        }),
        ('Outcome', {
            'fields': ('error_message', 'started_at', 'finished_at', 'created_at', 'updated_at'),
        }),
    )


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    list_display = ('experiment', 'run_index', 'method', 'tau', 'n_samples', 'nrmse', 'converged')
    list_filter = ('method', 'converged', 'experiment')
    search_fields = ('error',)
    ordering = ('experiment', 'run_index')


admin.site.site_title = "MRA toolkit"
admin.site.site_header = "Multireference alignment experiments"
admin.site.index_title = "Experiments and runs"
