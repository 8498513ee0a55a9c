from django.contrib import admin

from .models import PlanRun, ScenarioReport


@admin.register(PlanRun)
class PlanRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'status', 'created_by', 'created_at', 'completed_at']
    list_filter = ['status']
    readonly_fields = ['result']


@admin.register(ScenarioReport)
class ScenarioReportAdmin(admin.ModelAdmin):
    list_display = ['id', 'name', 'status', 'created_at']
    list_filter = ['name', 'status']
