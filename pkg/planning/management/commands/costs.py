import pandas as pd

from ...costs import BUILTIN_VARIANTS, adapt_table, load_cost_table
from ...exceptions import PlanningError
from ...hexgrid import GridSpec
from ...primitives import load_catalog
from ...smoothing import precompute_primitive_costs
from ._base import PlannerCommand


class Command(PlannerCommand):
    help = 'Print built-in, file or freshly precomputed primitive cost tables'

    def add_arguments(self, parser):
        parser.add_argument('variants', nargs='*', help='Built-in variants or file:PATH (default: all built-ins)')
        parser.add_argument('--precompute', action='store_true', help='Smooth every primitive and add its costs')
        parser.add_argument('--ratio', type=float, default=3.329, help='r_min / r_c used by --precompute')
        parser.add_argument('--catalog', help='Catalog JSON file (default: built-in)')
        parser.add_argument('--format', choices=['json', 'table'], default='table')
        parser.add_argument('--out', help='Write the JSON document here instead of stdout')

    def handle(self, *args, **options):
        try:
            catalog = load_catalog(options['catalog'])
            tables = [load_cost_table(v, expected_ids=len(catalog.ids)) for v in options['variants'] or BUILTIN_VARIANTS]
            if options['precompute']:
                precomputed = precompute_primitive_costs(catalog, GridSpec(1.0, options['ratio']))
                tables += [precomputed, adapt_table(precomputed)] if len(catalog.ids) == 9 else [precomputed]
        except PlanningError as exc:
            self.fail(exc)

        if options['format'] == 'json':
            self.emit({'tables': [t.to_document() for t in tables]}, options['out'])
            return
        frame = pd.DataFrame(
            {t.variant: list(t.c_kappa) for t in tables},
            index=pd.Index(catalog.ids, name='id'),
        )
        frame.insert(0, 'turns', [p.text for p in catalog.primitives])
        self.stdout.write(frame.to_string(float_format=lambda v: f"{v:.3f}"))
