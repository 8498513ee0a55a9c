from django.core.management.base import CommandError

from ...exceptions import PlanningError
from ...hexgrid import GridSpec, HexCell
from ...smoothing import SmoothingConfig, corridors_for_path, median_curvature_cost, smooth, start_pose_for
from ._base import EXIT_INVALID, PlannerCommand


def parse_cells(text):
    try:
        return [HexCell(*(int(v) for v in item.split(':'))) for item in text.split(',') if item.strip()]
    except (TypeError, ValueError):
        raise CommandError(f"cells must look like 0:0,1:0,2:-1 (got {text!r})", returncode=EXIT_INVALID)


class Command(PlannerCommand):
    help = 'Smooth a given cell sequence into a curvature-bounded line/arc path'

    def add_arguments(self, parser):
        parser.add_argument('cells', help='Comma separated q:r cells, e.g. 0:0,1:0,2:-1')
        parser.add_argument('--cell-inner-radius', type=float, default=1.0)
        parser.add_argument('--min-turn-radius', type=float, default=3.329)
        parser.add_argument('--heading', type=int, choices=range(6), help='Heading for a single cell')
        parser.add_argument('--max-iterations', type=int, default=40)
        parser.add_argument('--out', help='Write the JSON document here instead of stdout')

    def handle(self, *args, **options):
        cells = parse_cells(options['cells'])
        if not cells:
            raise CommandError('no cells given', returncode=EXIT_INVALID)
        try:
            spec = GridSpec(options['cell_inner_radius'], options['min_turn_radius'])
            config = SmoothingConfig.for_spec(spec, max_iterations=options['max_iterations'])
            corridors = corridors_for_path(cells, spec, options['heading'])
            path = smooth(corridors, start_pose_for(cells, spec, options['heading']), config)
        except PlanningError as exc:
            self.fail(exc)

        document = {
            'cells': [c.as_list() for c in cells],
            'smoothed': path.to_document(),
            'median_curvature': median_curvature_cost(path, config.kappa_max, config.sample_step),
            'max_curvature_ratio': path.max_curvature * spec.min_turn_radius,
            'arc_length': path.length,
        }
        self.emit(document, options['out'])
