from django.core.management.base import CommandError

from ...conf import planner_settings
from ...exceptions import PlanningError
from ...scenarios import SCENARIOS, run_scenario
from ._base import EXIT_INVALID, PlannerCommand


class Command(PlannerCommand):
    help = 'Run one scenario of the suite and write its results, SVGs and report'

    def add_arguments(self, parser):
        parser.add_argument('name', help=f"One of: {', '.join(SCENARIOS)}")
        parser.add_argument('--out-dir', help='Output directory (default: PLANNER_OUTPUT_DIR)')
        parser.add_argument('--angles', type=float, nargs='*', help='Subset of angles (degrees) for e1_open_angles')
        self.add_planner_arguments(parser)

    def handle(self, *args, **options):
        name = options['name']
        if name not in SCENARIOS:
            raise CommandError(f"unknown scenario {name!r}; choose one of {', '.join(SCENARIOS)}",
                               returncode=EXIT_INVALID)
        out_dir = options['out_dir'] or planner_settings().output_dir
        self.stdout.write(f"Running {name}...")
        try:
            report = run_scenario(name, out_dir, self.planner_options(options), options['angles'])
        except PlanningError as exc:
            self.fail(exc)

        self.stdout.write(report.frame.to_string(index=False))
        for check, passed in report.checks.items():
            style = self.style.SUCCESS if passed else self.style.WARNING
            self.stdout.write(style(f"{check}: {'pass' if passed else 'FAIL'}"))
        self.stdout.write(self.style.SUCCESS(f"Report written to {out_dir}/{name}/report.json"))
