"""
Scenario suite: straight lines at many angles, escaping a narrow pocket,
detouring around a blocked wall, and one map planned under every cost table.

Each scenario writes one result document and SVG per run plus a consolidated
``report.csv`` / ``report.json`` with the scenario's property checks.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import pandas as pd

from .costs import BUILTIN_VARIANTS
from .exceptions import ParseError
from .hexgrid import Bounds, GridSpec, HexCell, MapGrid, from_cartesian, to_cartesian
from .maps import shipped_map
from .pipeline import STATUS_OK, PlanOptions, run_plan, write_document
from .rendering import render_document

logger = logging.getLogger(__name__)

SCENARIOS = ('e1_open_angles', 'e2_narrow_escape', 'e2_blocked_detour', 'e3_cost_comparison')

DEFAULT_SPEC = GridSpec(1.0, 3.329)
LENGTH_RATIO_LIMIT = 1.05
CURVATURE_SLACK = 1e-9

REPORT_COLUMNS = [
    'scenario', 'label', 'status', 'grid_cells', 'arc_length', 'max_curvature_ratio',
    'median_curvature', 'direction_changes', 'min_clearance', 'iterations', 'expansions', 'peak_open',
]


@dataclass(frozen=True)
class ScenarioRun:
    label: str
    grid: MapGrid
    options: PlanOptions


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    runs: tuple
    expected: tuple


@dataclass
class ScenarioReport:
    name: str
    outcomes: dict
    checks: dict
    frame: pd.DataFrame = field(repr=False)

    @property
    def passed(self):
        return all(self.checks.values())

    def to_document(self):
        return {
            'scenario': self.name,
            'passed': self.passed,
            'checks': self.checks,
            'runs': json.loads(self.frame.to_json(orient='records')),
        }


def open_map(target, radius, spec=DEFAULT_SPEC):
    return MapGrid(spec=spec, bounds=Bounds(-radius, radius, -radius, radius), start=HexCell(0, 0), target=target)


def e1_targets(distance=20, count=24, spec=DEFAULT_SPEC):
    """Target cells at ``distance`` cell spacings from the origin, one per angle step."""
    targets = []
    for i in range(count):
        angle = 2.0 * math.pi * i / count
        reach = distance * spec.spacing
        targets.append((round(math.degrees(angle), 6), from_cartesian(reach * math.cos(angle), reach * math.sin(angle), spec)))
    return targets


def open_radius(cells, margin=2):
    """Half-width of a square axial map holding every cell in ``cells`` with ``margin`` to spare."""
    return max(max(abs(cell.q), abs(cell.r)) for cell in cells) + margin


def build_scenario(name, options=None, angles=None):
    options = options or PlanOptions()
    if name == 'e1_open_angles':
        targets = e1_targets()
        radius = open_radius(cell for _, cell in targets)
        if angles is not None:
            targets = [t for t in targets if t[0] in set(angles)]
        runs = tuple(ScenarioRun(f"angle_{deg:05.1f}", open_map(cell, radius), options) for deg, cell in targets)
        return ScenarioSpec(name, runs, ('all_ok', 'length_ratio', 'curvature_bound'))
    if name == 'e2_narrow_escape':
        run = ScenarioRun('narrow_pocket', shipped_map('narrow_pocket'), replace(options, initial_heading=0))
        return ScenarioSpec(name, (run,), ('all_ok', 'revisits_cell', 'curvature_bound', 'contained'))
    if name == 'e2_blocked_detour':
        grid = shipped_map('wall_detour')
        runs = (
            ScenarioRun('pruned', grid, replace(options, prune_dead_cells=True)),
            ScenarioRun('unpruned', grid, replace(options, prune_dead_cells=False)),
        )
        return ScenarioSpec(name, runs, ('all_ok', 'pruning_saves_expansions'))
    if name == 'e3_cost_comparison':
        grid = shipped_map('e3_obstacles')
        runs = tuple(
            ScenarioRun(variant, grid, replace(options, cost_table=variant, w_n=1.0, w_kappa=5.0))
            for variant in BUILTIN_VARIANTS
        )
        return ScenarioSpec(name, runs, ('all_ok', 'median_ordering', 'penalty_path_longer'))
    raise ParseError(f"unknown scenario {name!r}; choose one of {', '.join(SCENARIOS)}", field='name')


def _row(name, label, outcome):
    metrics = outcome.document.get('metrics', {})
    row = {'scenario': name, 'label': label, 'status': outcome.status}
    for column in REPORT_COLUMNS[3:]:
        row[column] = metrics.get(column)
    return row


def _length_ratio(grid, metrics):
    ax, ay = to_cartesian(grid.start, grid.spec)
    bx, by = to_cartesian(grid.target, grid.spec)
    return metrics['arc_length'] / math.hypot(bx - ax, by - ay)


def evaluate_checks(spec, outcomes):
    grids = {run.label: run.grid for run in spec.runs}
    ok = {label: o for label, o in outcomes.items() if o.status == STATUS_OK}
    checks = {'all_ok': len(ok) == len(outcomes)}
    metrics = {label: o.document['metrics'] for label, o in ok.items()}
    if 'curvature_bound' in spec.expected:
        checks['curvature_bound'] = all(m['max_curvature_ratio'] <= 1.0 + CURVATURE_SLACK for m in metrics.values())
    if 'length_ratio' in spec.expected:
        checks['length_ratio'] = all(
            _length_ratio(grids[label], m) <= LENGTH_RATIO_LIMIT for label, m in metrics.items()
        )
    if 'revisits_cell' in spec.expected:
        checks['revisits_cell'] = any(
            len({tuple(c) for c in o.document['grid_path']['cells']}) < len(o.document['grid_path']['cells'])
            for o in outcomes.values() if 'grid_path' in o.document
        )
    if 'contained' in spec.expected:
        checks['contained'] = bool(metrics) and all(
            m['min_clearance'] >= -1e-6 * grids[label].spec.cell_inner_radius for label, m in metrics.items()
        )
    if 'pruning_saves_expansions' in spec.expected:
        def expansions(label):
            return outcomes[label].document.get('grid_path', {}).get('statistics', {}).get('expansions')

        pruned, unpruned = expansions('pruned'), expansions('unpruned')
        checks['pruning_saves_expansions'] = pruned is not None and unpruned is not None and unpruned > pruned
    if 'median_ordering' in spec.expected:
        if checks['all_ok']:
            penalty, adapted, ribbon = (metrics[v]['median_curvature']
                                        for v in ('curvature_penalty', 'adapted_ribbon', 'ribbon'))
            checks['median_ordering'] = penalty <= adapted + CURVATURE_SLACK and adapted <= ribbon + CURVATURE_SLACK
            checks['penalty_path_longer'] = metrics['curvature_penalty']['grid_cells'] >= metrics['ribbon']['grid_cells']
        else:
            checks['median_ordering'] = checks['penalty_path_longer'] = False
    return checks


def run_scenario(name, output_dir=None, options=None, angles=None):
    spec = build_scenario(name, options, angles)
    output_dir = Path(output_dir) if output_dir else None
    outcomes, rows = {}, []
    for run in spec.runs:
        outcome = run_plan(run.grid, run.options)
        outcomes[run.label] = outcome
        rows.append(_row(name, run.label, outcome))
        logger.info('%s/%s: %s', name, run.label, outcome.status)
        if output_dir is not None:
            write_document(outcome.document, output_dir / name / f"{run.label}.json")
            (output_dir / name / f"{run.label}.svg").write_text(render_document(outcome.document))

    frame = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    report = ScenarioReport(name, outcomes, evaluate_checks(spec, outcomes), frame)
    if output_dir is not None:
        frame.to_csv(output_dir / name / 'report.csv', index=False)
        write_document(report.to_document(), output_dir / name / 'report.json')
    level = logging.INFO if report.passed else logging.WARNING
    logger.log(level, 'scenario %s: %s', name, ', '.join(f"{k}={v}" for k, v in report.checks.items()))
    return report
