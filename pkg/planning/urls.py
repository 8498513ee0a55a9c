from django.urls import path
from . import views

urlpatterns = [
    # Plan runs
    path('plans/', views.create_plan, name='plan-create'),
    path('plans/<uuid:run_id>/', views.get_plan, name='plan-detail'),
    path('plans/<uuid:run_id>/render/', views.render_plan, name='plan-render'),

    # Cost tables
    path('cost-tables/<str:variant>/', views.get_cost_table, name='cost-table'),

    # Scenarios
    path('scenarios/<uuid:report_id>/', views.get_scenario, name='scenario-detail'),
    path('scenarios/<str:name>/', views.create_scenario, name='scenario-create'),
]
