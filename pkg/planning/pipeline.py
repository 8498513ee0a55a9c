"""
Two-stage pipeline: grid search, then ribbon smoothing of the whole grid path.

``run_plan`` never raises for NoPath or Infeasible; it returns a RunOutcome
whose ``status`` says what happened and whose document is still complete
enough to write out.
"""
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from django.core.cache import cache

from .conf import planner_settings
from .costs import CostTable, Weights, load_cost_table
from .exceptions import Infeasible, NoPath
from .hexgrid import GridSpec
from .maps import serialize_map
from .metrics import emit_metrics
from .primitives import load_catalog, path_moves
from .search import SearchConfig, TerminationMode, plan
from .smoothing import SmoothingConfig, corridors_for_path, precompute_primitive_costs, smooth, start_pose_for

logger = logging.getLogger(__name__)

STATUS_OK = 'ok'
STATUS_NO_PATH = 'no_path'
STATUS_INFEASIBLE = 'infeasible'

EXIT_CODES = {STATUS_OK: 0, STATUS_NO_PATH: 2, STATUS_INFEASIBLE: 3}


@dataclass(frozen=True)
class PlanOptions:
    cost_table: object = 'curvature_penalty'
    w_n: float = 1.0
    w_kappa: float = 5.0
    mode: str = 'optimal'
    kappa_accumulation: str = 'accumulated'
    prune_dead_cells: bool = True
    initial_heading: Optional[int] = None
    trace: bool = False
    catalog: object = None
    smoothing_max_iterations: int = 40
    smoothing_tolerance: float = 1e-6

    @classmethod
    def from_settings(cls, **overrides):
        conf = planner_settings()
        values = {
            'cost_table': conf.cost_table,
            'w_n': conf.w_n,
            'w_kappa': conf.w_kappa,
            'mode': conf.mode,
            'kappa_accumulation': conf.kappa_accumulation,
            'prune_dead_cells': conf.dead_cells,
            'smoothing_max_iterations': conf.smoothing_max_iterations,
            'smoothing_tolerance': conf.smoothing_tolerance,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def weights(self):
        return Weights(self.w_n, self.w_kappa)

    def search_config(self):
        return SearchConfig(
            mode=self.mode,
            kappa_accumulation=self.kappa_accumulation,
            prune_dead_cells=self.prune_dead_cells,
            initial_heading=self.initial_heading,
            trace=self.trace,
        )

    def smoothing_config(self, spec):
        return SmoothingConfig.for_spec(
            spec, max_iterations=self.smoothing_max_iterations, tolerance=self.smoothing_tolerance,
        )

    def as_dict(self):
        table = self.cost_table.variant if isinstance(self.cost_table, CostTable) else self.cost_table
        return {
            'cost_table': table,
            'w_n': self.w_n,
            'w_kappa': self.w_kappa,
            'mode': TerminationMode(self.mode).value,
            'kappa_accumulation': self.kappa_accumulation,
            'prune_dead_cells': self.prune_dead_cells,
            'initial_heading': self.initial_heading,
        }


@dataclass
class RunOutcome:
    status: str
    document: dict
    plan: object = None
    path: object = None
    corridors: list = field(default_factory=list)

    @property
    def exit_code(self):
        return EXIT_CODES[self.status]


def precomputed_table(catalog, spec=None):
    """Smoothed primitive costs, computed once per catalog and cached."""
    ratio = spec.ratio if spec else 3.329
    key = f"hexpath:precomputed:{catalog.name}:{ratio:.6f}"
    costs = cache.get(key)
    if costs is None:
        table = precompute_primitive_costs(catalog, GridSpec(1.0, ratio))
        cache.set(key, list(table.c_kappa), timeout=None)
        return table
    return CostTable('precomputed', tuple(costs))


def resolve_cost_table(source, catalog):
    if source == 'precomputed':
        return precomputed_table(catalog)
    return load_cost_table(source, expected_ids=len(catalog.ids))


def run_plan(grid, options=None):
    options = options or PlanOptions()
    catalog = load_catalog(options.catalog)
    table = resolve_cost_table(options.cost_table, catalog)
    started = time.perf_counter()

    document = {
        'map': serialize_map(grid),
        'options': options.as_dict(),
        'catalog': catalog.name,
        'cost_table': table.to_document(),
    }

    try:
        result = plan(grid, catalog, table, options.weights, options.search_config())
    except NoPath as exc:
        logger.info('no path from %s to %s', grid.start.label, grid.target.label)
        stats = dict(exc.statistics)
        document.update({
            'status': STATUS_NO_PATH,
            'error': str(exc),
            'statistics': stats,
            'wall_time': {'total': time.perf_counter() - started},
        })
        return RunOutcome(STATUS_NO_PATH, document)

    grid_path = result.to_document()
    search_time = grid_path['statistics'].pop('elapsed', None)
    document['grid_path'] = grid_path
    document['trace'] = result.trace.to_document() if result.trace is not None else None

    heading = options.initial_heading if len(result.cells) == 1 else path_moves(result.cells[:2])[0]
    corridors = corridors_for_path(result.cells, grid.spec, heading)
    smoothed_at = time.perf_counter()
    try:
        path = smooth(corridors, start_pose_for(result.cells, grid.spec, heading), options.smoothing_config(grid.spec))
    except Infeasible as exc:
        logger.warning('smoothing failed: %s', exc)
        document.update({
            'status': STATUS_INFEASIBLE,
            'error': str(exc),
            'smoothing': {
                'min_clearance': exc.min_clearance,
                'max_curvature_ratio': exc.max_curvature_ratio,
            },
            'wall_time': {'search': search_time, 'total': time.perf_counter() - started},
        })
        return RunOutcome(STATUS_INFEASIBLE, document, plan=result, corridors=corridors)

    document['status'] = STATUS_OK
    document['smoothed'] = path.to_document()
    document['wall_time'] = {
        'search': search_time,
        'smoothing': time.perf_counter() - smoothed_at,
        'total': time.perf_counter() - started,
    }
    document['metrics'] = emit_metrics(document).as_dict()
    return RunOutcome(STATUS_OK, document, plan=result, path=path, corridors=corridors)


def strip_wall_time(document):
    if isinstance(document, dict):
        return {k: strip_wall_time(v) for k, v in document.items() if k != 'wall_time'}
    if isinstance(document, list):
        return [strip_wall_time(v) for v in document]
    return document


def dump_document(document):
    return json.dumps(document, indent=2, sort_keys=True) + '\n'


def write_document(document, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_document(document))
    return path
