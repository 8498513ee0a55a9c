from django.core.cache import cache
from django.http import HttpResponse
from django.shortcuts import get_object_or_404
from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response

from .costs import load_cost_table
from .exceptions import InvalidMap, ParseError, PlanningError
from .maps import load_map
from .models import PlanRun, ScenarioReport
from .pipeline import precomputed_table
from .primitives import builtin_catalog
from .rendering import render_document, render_svg
from .scenarios import SCENARIOS
from .serializers import PlanRequestSerializer
from .tasks import run_plan_task, run_scenario_task


def _error_response(exc):
    if isinstance(exc, InvalidMap):
        fields = exc.fields
    elif isinstance(exc, ParseError) and exc.field:
        fields = {exc.field: [str(exc)]}
    else:
        fields = {}
    return Response({'error': str(exc), 'fields': fields}, status=status.HTTP_400_BAD_REQUEST)


@api_view(['POST'])
def create_plan(request):
    serializer = PlanRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response({'error': 'invalid request', 'fields': serializer.errors}, status=status.HTTP_400_BAD_REQUEST)
    try:
        load_map(serializer.validated_data['map'])
    except PlanningError as exc:
        return _error_response(exc)

    run = PlanRun.objects.create(
        map_document=serializer.validated_data['map'],
        options=dict(serializer.validated_data.get('options', {})),
        created_by=request.user if request.user.is_authenticated else None,
    )
    run_plan_task.delay(str(run.id))
    run.refresh_from_db()
    return Response({'id': str(run.id), 'status': run.status}, status=status.HTTP_202_ACCEPTED)


@api_view(['GET'])
def get_plan(request, run_id):
    run = get_object_or_404(PlanRun, id=run_id, created_by=request.user)
    return Response({
        'id': str(run.id),
        'status': run.status,
        'error': run.error_message or None,
        'result': run.result,
        'created_at': run.created_at,
        'completed_at': run.completed_at,
    })


@api_view(['GET'])
def render_plan(request, run_id):
    run = get_object_or_404(PlanRun, id=run_id, created_by=request.user)
    orientation = request.query_params.get('orientation', 'pointy')
    labels = request.query_params.get('labels') in ('1', 'true')
    if orientation not in ('pointy', 'flat'):
        return Response({'error': 'orientation must be pointy or flat', 'fields': {}},
                        status=status.HTTP_400_BAD_REQUEST)
    if run.result:
        svg = render_document(run.result, orientation, labels)
    else:
        svg = render_svg(load_map(run.map_document), orientation=orientation, labels=labels)
    return HttpResponse(svg, content_type='image/svg+xml')


@api_view(['GET'])
def get_cost_table(request, variant):
    cache_key = f"hexpath:cost-table:{variant}"
    document = cache.get(cache_key)
    if document is None:
        try:
            if variant == 'precomputed':
                table = precomputed_table(builtin_catalog())
            else:
                table = load_cost_table(variant)
        except PlanningError as exc:
            return _error_response(exc)
        document = table.to_document()
        cache.set(cache_key, document, timeout=3600)
    return Response(document)


@api_view(['POST'])
def create_scenario(request, name):
    if name not in SCENARIOS:
        return Response(
            {'error': f"unknown scenario {name!r}", 'fields': {'name': [f"choose one of {', '.join(SCENARIOS)}"]}},
            status=status.HTTP_400_BAD_REQUEST,
        )
    record = ScenarioReport.objects.create(
        name=name,
        created_by=request.user if request.user.is_authenticated else None,
    )
    run_scenario_task.delay(str(record.id))
    record.refresh_from_db()
    return Response({'id': str(record.id), 'status': record.status}, status=status.HTTP_202_ACCEPTED)


@api_view(['GET'])
def get_scenario(request, report_id):
    record = get_object_or_404(ScenarioReport, id=report_id, created_by=request.user)
    return Response({
        'id': str(record.id),
        'name': record.name,
        'status': record.status,
        'checks': record.checks,
        'report': record.report,
        'error': record.error_message or None,
    })
