import json
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd
from django.core.cache import cache
from django.test import SimpleTestCase

from planning.costs import CostTable
from planning.exceptions import InvalidMap, ParseError
from planning.hexgrid import Bounds, GridSpec, HexCell, MapGrid
from planning.maps import load_map, load_map_file, serialize_map, shipped_map
from planning.metrics import direction_changes
from planning.pipeline import (
    EXIT_CODES, STATUS_NO_PATH, STATUS_OK, PlanOptions, dump_document, resolve_cost_table, run_plan,
    strip_wall_time,
)
from planning.primitives import builtin_catalog
from planning.rendering import ARROW_COLORS, CELL_COLORS, render_catalog_svg, render_document, render_svg
from planning.scenarios import SCENARIOS, build_scenario, e1_targets, run_scenario

SPEC = GridSpec(1.0, 3.329)
SVG = '{http://www.w3.org/2000/svg}'

MINIMAL_MAP = {
    'cell_inner_radius': 1.0,
    'min_turn_radius': 3.329,
    'bounds': {'q_min': 0, 'q_max': 5, 'r_min': 0, 'r_max': 5},
    'start': [0, 0],
    'target': [5, 0],
    'occupied': [[2, 2]],
}


def zigzag_map():
    free = {(0, 0), (1, 0), (2, -1), (3, -1), (4, -2), (5, -2)}
    bounds = Bounds(0, 5, -2, 0)
    occupied = {c for c in bounds.cells() if tuple(c) not in free}
    return MapGrid(SPEC, bounds, occupied=occupied, start=(0, 0), target=(5, -2))


def enclosed_map():
    ring = {(3, 2), (4, 2), (4, 3), (3, 4), (2, 4), (2, 3)}
    return MapGrid(SPEC, Bounds(0, 6, 0, 6), occupied=ring, start=(0, 0), target=(3, 3))


class MapDocumentTests(SimpleTestCase):
    def test_load_minimal_map(self):
        grid = load_map(MINIMAL_MAP)
        self.assertEqual(grid.start, HexCell(0, 0))
        self.assertEqual(grid.occupied, frozenset({HexCell(2, 2)}))
        self.assertEqual(grid.spec, SPEC)

    def test_occupied_defaults_to_empty(self):
        document = {k: v for k, v in MINIMAL_MAP.items() if k != 'occupied'}
        self.assertEqual(load_map(document).occupied, frozenset())

    def test_missing_field_names_the_field(self):
        document = {k: v for k, v in MINIMAL_MAP.items() if k != 'min_turn_radius'}
        with self.assertRaises(ParseError) as ctx:
            load_map(document)
        self.assertEqual(ctx.exception.field, 'min_turn_radius')

    def test_malformed_cell(self):
        with self.assertRaises(ParseError) as ctx:
            load_map({**MINIMAL_MAP, 'start': [0, 0, 0]})
        self.assertEqual(ctx.exception.field, 'start')

    def test_nested_bounds_error(self):
        with self.assertRaises(ParseError) as ctx:
            load_map({**MINIMAL_MAP, 'bounds': {'q_min': 'west', 'q_max': 5, 'r_min': 0, 'r_max': 5}})
        self.assertEqual(ctx.exception.field, 'bounds.q_min')

    def test_not_an_object(self):
        with self.assertRaises(ParseError):
            load_map([1, 2, 3])

    def test_semantic_errors_come_from_the_grid(self):
        with self.assertRaises(InvalidMap) as ctx:
            load_map({**MINIMAL_MAP, 'start': [2, 2]})
        self.assertIn('start', ctx.exception.fields)

    def test_unreadable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'map.json'
            path.write_text('{"bounds": ')
            with self.assertRaises(ParseError):
                load_map_file(path)
        with self.assertRaises(ParseError):
            load_map_file('/nonexistent/map.json')

    def test_serialize_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            bounds = Bounds(-3, int(rng.integers(2, 9)), -2, int(rng.integers(2, 9)))
            cells = bounds.cells()
            occupied = {cells[i] for i in rng.choice(len(cells), size=len(cells) // 4, replace=False)}
            free = [c for c in cells if c not in occupied]
            grid = MapGrid(SPEC, bounds, occupied=occupied, start=free[0], target=free[-1])
            document = json.loads(json.dumps(serialize_map(grid)))
            self.assertEqual(load_map(document), grid)

    def test_shipped_maps_load(self):
        for name in ('straight_corridor', 'narrow_pocket', 'wall_detour', 'e3_obstacles'):
            grid = shipped_map(name)
            self.assertTrue(grid.is_free(grid.start))
            self.assertTrue(grid.is_free(grid.target))


class PipelineTests(SimpleTestCase):
    def test_straight_corridor(self):
        outcome = run_plan(shipped_map('straight_corridor'))
        self.assertEqual(outcome.status, STATUS_OK)
        self.assertEqual(outcome.exit_code, 0)
        document = outcome.document
        self.assertEqual(len(document['smoothed']['segments']), 1)
        self.assertEqual(document['smoothed']['segments'][0]['kind'], 'line')
        metrics = document['metrics']
        self.assertEqual(metrics['grid_cells'], 8)
        self.assertEqual(metrics['direction_changes'], 0)
        self.assertEqual(metrics['max_curvature_ratio'], 0.0)
        self.assertEqual(metrics['median_curvature'], 0.0)
        self.assertAlmostEqual(metrics['arc_length'], 14.0, delta=1e-9)
        self.assertGreaterEqual(metrics['min_clearance'], -1e-6)

    def test_no_path(self):
        outcome = run_plan(enclosed_map())
        self.assertEqual(outcome.status, STATUS_NO_PATH)
        self.assertEqual(outcome.exit_code, EXIT_CODES[STATUS_NO_PATH])
        self.assertEqual(outcome.exit_code, 2)
        self.assertIn('error', outcome.document)
        self.assertNotIn('smoothed', outcome.document)

    def test_documents_are_deterministic_without_wall_time(self):
        grid = shipped_map('e3_obstacles')
        first = run_plan(grid, PlanOptions(trace=True)).document
        second = run_plan(grid, PlanOptions(trace=True)).document
        self.assertNotEqual(first['wall_time'], {})
        self.assertEqual(dump_document(strip_wall_time(first)), dump_document(strip_wall_time(second)))
        self.assertNotIn('wall_time', json.dumps(strip_wall_time(first)))

    def test_zigzag_counts_every_turn(self):
        outcome = run_plan(zigzag_map())
        self.assertEqual(outcome.status, STATUS_OK)
        metrics = outcome.document['metrics']
        self.assertEqual(metrics['grid_cells'], 6)
        self.assertEqual(metrics['direction_changes'], 4)
        self.assertLessEqual(metrics['max_curvature_ratio'], 1.0 + 1e-9)

    def test_narrow_pocket_escape_revisits_a_cell(self):
        outcome = run_plan(shipped_map('narrow_pocket'), PlanOptions(initial_heading=0))
        self.assertEqual(outcome.status, STATUS_OK)
        cells = [tuple(c) for c in outcome.document['grid_path']['cells']]
        self.assertLess(len(set(cells)), len(cells))
        self.assertEqual(cells[1], (-2, 0))
        metrics = outcome.document['metrics']
        self.assertLessEqual(metrics['max_curvature_ratio'], 1.0 + 1e-9)
        self.assertGreaterEqual(metrics['min_clearance'], -1e-6)
        self.assertTrue(outcome.document['smoothed']['splits'])

    def test_options_from_settings(self):
        with self.settings(PLANNER={'W_KAPPA': 2.0, 'COST_TABLE': 'ribbon'}):
            options = PlanOptions.from_settings(w_n=3.0, initial_heading=None)
        self.assertEqual(options.w_kappa, 2.0)
        self.assertEqual(options.w_n, 3.0)
        self.assertEqual(options.cost_table, 'ribbon')

    def test_direction_changes(self):
        cells = [HexCell(0, 0), HexCell(1, 0), HexCell(2, 0), HexCell(3, -1), HexCell(4, -1)]
        self.assertEqual(direction_changes(cells), 2)

    def test_precomputed_table_is_computed_once(self):
        cache.clear()
        self.addCleanup(cache.clear)
        catalog = builtin_catalog()
        computed = CostTable('precomputed', (0.0, 0.1, 0.1, 0.1, 0.3, 0.05, 0.3, 0.2, 0.6))
        with patch('planning.pipeline.precompute_primitive_costs', return_value=computed) as precompute:
            first = resolve_cost_table('precomputed', catalog)
            second = resolve_cost_table('precomputed', catalog)
        precompute.assert_called_once()
        self.assertEqual(first.c_kappa, computed.c_kappa)
        self.assertEqual(second.c_kappa, computed.c_kappa)
        self.assertEqual(second.variant, 'precomputed')


class RenderingTests(SimpleTestCase):
    def fills(self, svg):
        root = ET.fromstring(svg)
        return [p.get('fill') for p in root.iter(f"{SVG}polygon")]

    def test_empty_map_palette(self):
        grid = load_map(MINIMAL_MAP)
        fills = self.fills(render_svg(grid))
        self.assertEqual(len(fills), 36)
        self.assertTrue(set(fills) <= set(CELL_COLORS.values()))
        self.assertEqual(fills.count(CELL_COLORS['start']), 1)
        self.assertEqual(fills.count(CELL_COLORS['target']), 1)
        self.assertEqual(fills.count(CELL_COLORS['occupied']), 1)

    def test_trace_overlay_marks_dead_ends(self):
        outcome = run_plan(shipped_map('wall_detour'), PlanOptions(trace=True))
        root = ET.fromstring(render_document(outcome.document))
        strokes = [line.get('stroke') for line in root.iter(f"{SVG}line")]
        self.assertIn(ARROW_COLORS['dead'], strokes)
        self.assertIn(ARROW_COLORS['single'], strokes)
        fills = [p.get('fill') for p in root.iter(f"{SVG}polygon")]
        self.assertIn(CELL_COLORS['closed'], fills)

    def test_result_overlay(self):
        outcome = run_plan(shipped_map('straight_corridor'))
        root = ET.fromstring(render_document(outcome.document, orientation='flat', labels=True))
        paths = [p for p in root.iter(f"{SVG}path") if p.get('class') == 'smoothed']
        self.assertEqual(len(paths), 1)
        self.assertTrue(paths[0].get('d').startswith('M '))
        self.assertEqual(len([p for p in root.iter(f"{SVG}polyline")]), 1)
        self.assertTrue(any(t.text == '1:1' for t in root.iter(f"{SVG}text")))

    def test_bad_orientation(self):
        with self.assertRaises(ValueError):
            render_svg(load_map(MINIMAL_MAP), orientation='diagonal')

    def test_catalog_sheet(self):
        root = ET.fromstring(render_catalog_svg(builtin_catalog(), SPEC))
        groups = [g for g in root.iter(f"{SVG}g") if 'primitive' in (g.get('class') or '')]
        self.assertEqual(len(groups), 9)
        self.assertEqual(len(list(root.iter(f"{SVG}polygon"))), 45)


class ScenarioTests(SimpleTestCase):
    def test_unknown_scenario(self):
        with self.assertRaises(ParseError) as ctx:
            build_scenario('e9')
        self.assertEqual(ctx.exception.field, 'name')

    def test_scenario_catalogue(self):
        self.assertEqual(len(e1_targets()), 24)
        self.assertEqual(len(build_scenario('e1_open_angles').runs), 24)
        self.assertEqual(build_scenario('e1_open_angles', angles=[0.0, 90.0]).runs[1].label, 'angle_090.0')
        e3 = build_scenario('e3_cost_comparison')
        self.assertEqual([run.options.cost_table for run in e3.runs],
                         ['ribbon', 'adapted_ribbon', 'curvature_penalty'])
        self.assertEqual(len({run.grid for run in e3.runs}), 1)
        for name in SCENARIOS:
            self.assertTrue(build_scenario(name).runs)

    def test_open_map_holds_every_angle(self):
        for run in build_scenario('e1_open_angles').runs:
            with self.subTest(run=run.label):
                self.assertIn(run.grid.target, run.grid.bounds)

    def test_open_angles(self):
        report = run_scenario('e1_open_angles')
        self.assertEqual(len(report.outcomes), 24)
        self.assertTrue(report.checks['all_ok'])
        self.assertTrue(report.checks['curvature_bound'])
        self.assertTrue(report.checks['length_ratio'])

    def test_cost_comparison_trades_length_for_curvature(self):
        report = run_scenario('e3_cost_comparison')
        self.assertTrue(report.checks['all_ok'])
        self.assertTrue(report.checks['median_ordering'])
        self.assertTrue(report.checks['penalty_path_longer'])
        cells = {label: o.document['metrics']['grid_cells'] for label, o in report.outcomes.items()}
        self.assertEqual(cells, {'ribbon': 14, 'adapted_ribbon': 15, 'curvature_penalty': 15})

    def test_scenarios_are_deterministic(self):
        for name, angles in (('e1_open_angles', [0.0, 45.0, 105.0]), ('e2_narrow_escape', None),
                             ('e2_blocked_detour', None), ('e3_cost_comparison', None)):
            first = run_scenario(name, angles=angles)
            second = run_scenario(name, angles=angles)
            with self.subTest(scenario=name):
                self.assertEqual(first.checks, second.checks)
                for label, outcome in first.outcomes.items():
                    self.assertEqual(dump_document(strip_wall_time(outcome.document)),
                                     dump_document(strip_wall_time(second.outcomes[label].document)))

    def test_blocked_detour_writes_a_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            report = run_scenario('e2_blocked_detour', output_dir=tmp)
            folder = Path(tmp) / 'e2_blocked_detour'
            for name in ('pruned.json', 'pruned.svg', 'unpruned.json', 'unpruned.svg', 'report.json'):
                self.assertTrue((folder / name).exists(), name)
            frame = pd.read_csv(folder / 'report.csv')
            self.assertEqual(list(frame['label']), ['pruned', 'unpruned'])
            saved = json.loads((folder / 'report.json').read_text())
        self.assertTrue(report.checks['pruning_saves_expansions'])
        self.assertEqual(saved['checks'], report.checks)
