from dataclasses import dataclass
from pathlib import Path

from django.conf import settings

DEFAULTS = {
    'W_N': 1.0,
    'W_KAPPA': 5.0,
    'COST_TABLE': 'curvature_penalty',
    'MODE': 'optimal',
    'KAPPA_ACCUMULATION': 'accumulated',
    'DEAD_CELLS': True,
    'SMOOTHING_MAX_ITERATIONS': 40,
    'SMOOTHING_TOLERANCE': 1e-6,
    'OUTPUT_DIR': 'runs',
}


@dataclass(frozen=True)
class PlannerSettings:
    w_n: float
    w_kappa: float
    cost_table: str
    mode: str
    kappa_accumulation: str
    dead_cells: bool
    smoothing_max_iterations: int
    smoothing_tolerance: float
    output_dir: Path


def planner_settings():
    values = {**DEFAULTS, **getattr(settings, 'PLANNER', {})}
    return PlannerSettings(
        w_n=float(values['W_N']),
        w_kappa=float(values['W_KAPPA']),
        cost_table=values['COST_TABLE'],
        mode=values['MODE'],
        kappa_accumulation=values['KAPPA_ACCUMULATION'],
        dead_cells=bool(values['DEAD_CELLS']),
        smoothing_max_iterations=int(values['SMOOTHING_MAX_ITERATIONS']),
        smoothing_tolerance=float(values['SMOOTHING_TOLERANCE']),
        output_dir=Path(values['OUTPUT_DIR']),
    )
