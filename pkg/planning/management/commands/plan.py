from django.core.management.base import CommandError

from ...exceptions import PlanningError
from ...maps import load_map_file
from ...pipeline import EXIT_CODES, STATUS_OK, run_plan
from ...rendering import render_document
from ._base import PlannerCommand


class Command(PlannerCommand):
    help = 'Plan a grid path on a map file and smooth it into a line/arc path'

    def add_arguments(self, parser):
        parser.add_argument('map', help='Map JSON file')
        self.add_planner_arguments(parser)
        self.add_output_arguments(parser)

    def handle(self, *args, **options):
        try:
            grid = load_map_file(options['map'])
            outcome = run_plan(grid, self.planner_options(options))
        except PlanningError as exc:
            self.fail(exc)

        self.emit(outcome.document, options['out'])
        if options['svg']:
            with open(options['svg'], 'w') as handle:
                handle.write(render_document(outcome.document, options['orientation'], options['labels']))

        if outcome.status != STATUS_OK:
            raise CommandError(outcome.document.get('error', outcome.status), returncode=EXIT_CODES[outcome.status])
        metrics = outcome.document['metrics']
        self.stderr.write(self.style.SUCCESS(
            f"{metrics['grid_cells']} cells, arc length {metrics['arc_length']:.3f}, "
            f"max |k|*r_min {metrics['max_curvature_ratio']:.3f}"
        ))
