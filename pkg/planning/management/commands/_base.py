import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ...costs import BUILTIN_VARIANTS
from ...exceptions import Infeasible, NoPath, PlanningError
from ...pipeline import PlanOptions, dump_document
from ...search import MODE_CHOICES

EXIT_INVALID = 1
EXIT_NO_PATH = 2
EXIT_INFEASIBLE = 3


def cost_table_argument(value):
    if value in BUILTIN_VARIANTS or value == 'precomputed' or value.startswith('file:'):
        return value
    raise CommandError(
        f"invalid cost table {value!r}; use {', '.join(BUILTIN_VARIANTS)}, precomputed or file:PATH",
        returncode=EXIT_INVALID,
    )


class PlannerCommand(BaseCommand):
    """Base for commands sharing the planner flags and the exit-code convention."""

    def add_planner_arguments(self, parser):
        parser.add_argument('--cost-table', help='ribbon, adapted_ribbon, curvature_penalty, precomputed or file:PATH')
        parser.add_argument('--w-n', type=float)
        parser.add_argument('--w-kappa', type=float)
        parser.add_argument('--mode', choices=MODE_CHOICES)
        parser.add_argument('--kappa-accumulation', choices=['accumulated', 'literal'])
        parser.add_argument('--no-dead-cells', action='store_true', help='Disable dead-cell pruning')
        parser.add_argument('--initial-heading', type=int, choices=range(6), help='Pin the first move direction')
        parser.add_argument('--trace', action='store_true', help='Record the search trace')

    def add_output_arguments(self, parser):
        parser.add_argument('--out', help='Write the JSON document here instead of stdout')
        parser.add_argument('--svg', help='Also write an SVG rendering here')
        parser.add_argument('--orientation', choices=['pointy', 'flat'], default='pointy')
        parser.add_argument('--labels', action='store_true', help='Label cells with q:r')

    def planner_options(self, options):
        cost_table = options.get('cost_table')
        return PlanOptions.from_settings(
            cost_table=cost_table_argument(cost_table) if cost_table else None,
            w_n=options.get('w_n'),
            w_kappa=options.get('w_kappa'),
            mode=options.get('mode'),
            kappa_accumulation=options.get('kappa_accumulation'),
            prune_dead_cells=False if options.get('no_dead_cells') else None,
            initial_heading=options.get('initial_heading'),
            trace=options.get('trace') or None,
        )

    def emit(self, document, out):
        if out:
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(dump_document(document))
            self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))
        else:
            self.stdout.write(dump_document(document), ending='')

    def fail(self, exc):
        if isinstance(exc, NoPath):
            raise CommandError(str(exc), returncode=EXIT_NO_PATH)
        if isinstance(exc, Infeasible):
            raise CommandError(str(exc), returncode=EXIT_INFEASIBLE)
        raise CommandError(str(exc), returncode=EXIT_INVALID)

    def read_json(self, path):
        try:
            return json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f"cannot read {path}: {exc}", returncode=EXIT_INVALID)
