from celery import shared_task
from celery.utils.log import get_task_logger
from django.utils import timezone

from .conf import planner_settings
from .exceptions import PlanningError
from .maps import load_map
from .models import PlanRun, ScenarioReport
from .pipeline import PlanOptions, run_plan
from .scenarios import run_scenario

logger = get_task_logger(__name__)


@shared_task
def run_plan_task(run_id):
    run = PlanRun.objects.get(id=run_id)
    run.status = 'running'
    run.save(update_fields=['status'])

    try:
        grid = load_map(run.map_document)
        outcome = run_plan(grid, PlanOptions.from_settings(**run.options))
    except PlanningError as exc:
        logger.warning('plan run %s failed: %s', run_id, exc)
        run.status = 'failed'
        run.error_message = str(exc)
    else:
        run.status = outcome.status
        run.result = outcome.document
        run.error_message = outcome.document.get('error', '')
        logger.info('plan run %s finished with status %s', run_id, outcome.status)

    run.completed_at = timezone.now()
    run.save()
    return {'run_id': str(run.id), 'status': run.status}


@shared_task
def run_scenario_task(report_id):
    record = ScenarioReport.objects.get(id=report_id)
    record.status = 'running'
    record.save(update_fields=['status'])

    output_dir = planner_settings().output_dir / str(record.id)
    try:
        report = run_scenario(record.name, output_dir, PlanOptions.from_settings())
    except PlanningError as exc:
        logger.warning('scenario %s failed: %s', record.name, exc)
        record.status = 'failed'
        record.error_message = str(exc)
    else:
        record.status = 'passed' if report.passed else 'failed_checks'
        record.checks = report.checks
        record.report = report.to_document()
        record.output_dir = str(output_dir)

    record.completed_at = timezone.now()
    record.save()
    return {'report_id': str(record.id), 'status': record.status}
