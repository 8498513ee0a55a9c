from pathlib import Path

from ...exceptions import PlanningError
from ...hexgrid import GridSpec
from ...maps import load_map
from ...primitives import load_catalog
from ...rendering import render_catalog_svg, render_document, render_svg
from ...smoothing import SmoothingConfig, build_corridor, smooth, start_pose_for
from ._base import PlannerCommand


class Command(PlannerCommand):
    help = 'Render a map, a result document, or the primitive catalog as SVG'

    def add_arguments(self, parser):
        parser.add_argument('source', nargs='?', help='Map or result JSON file')
        parser.add_argument('--catalog', action='store_true', help='Render the primitive catalog instead')
        parser.add_argument('--catalog-file', help='Catalog JSON file (default: built-in)')
        parser.add_argument('--out', required=True, help='SVG output path')
        parser.add_argument('--orientation', choices=['pointy', 'flat'], default='pointy')
        parser.add_argument('--labels', action='store_true', help='Label cells with q:r')

    def handle(self, *args, **options):
        try:
            if options['catalog']:
                svg = self._catalog(options)
            else:
                if not options['source']:
                    self.fail(PlanningError('a map or result file is required'))
                document = self.read_json(options['source'])
                if 'map' in document:
                    svg = render_document(document, options['orientation'], options['labels'])
                else:
                    svg = render_svg(load_map(document), orientation=options['orientation'], labels=options['labels'])
        except PlanningError as exc:
            self.fail(exc)

        path = Path(options['out'])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(svg)
        self.stdout.write(self.style.SUCCESS(f"Wrote {path}"))

    def _catalog(self, options):
        catalog = load_catalog(options['catalog_file'])
        spec = GridSpec(1.0, 3.329)
        config = SmoothingConfig.for_spec(spec)
        paths = {}
        for primitive in catalog.primitives:
            cells = primitive.cells()
            paths[primitive.id] = smooth(build_corridor(cells, spec), start_pose_for(cells, spec), config)
        return render_catalog_svg(catalog, spec, paths, options['orientation'])
