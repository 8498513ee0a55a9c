from dataclasses import asdict, dataclass
from typing import Optional

from .hexgrid import GridSpec, HexCell
from .primitives import INADMISSIBLE, TurnSymbol, path_moves, path_turns
from .smoothing import ArcPath, corridor_clearance, corridors_for_path, median_curvature_cost


@dataclass(frozen=True)
class MetricsReport:
    grid_cells: int
    arc_length: float
    max_curvature_ratio: float
    median_curvature: float
    direction_changes: int
    min_clearance: float
    iterations: int
    expansions: int
    peak_open: int
    wall_time: Optional[float] = None

    def as_dict(self):
        return asdict(self)


def direction_changes(cells):
    return sum(1 for turn in path_turns(cells) if turn is INADMISSIBLE or turn is not TurnSymbol.S)


def emit_metrics(document):
    """Metrics of a successful result document."""
    spec = GridSpec(document['map']['cell_inner_radius'], document['map']['min_turn_radius'])
    cells = [HexCell(*c) for c in document['grid_path']['cells']]
    path = ArcPath.from_document(document['smoothed'])
    stats = document['grid_path']['statistics']
    step = spec.cell_inner_radius / 10.0

    heading = path_moves(cells[:2])[0] if len(cells) > 1 else document['options'].get('initial_heading')
    clearance = corridor_clearance(path, corridors_for_path(cells, spec, heading), step)
    return MetricsReport(
        grid_cells=len(cells),
        arc_length=path.length,
        max_curvature_ratio=path.max_curvature * spec.min_turn_radius,
        median_curvature=median_curvature_cost(path, spec.kappa_max, step),
        direction_changes=direction_changes(cells),
        min_clearance=clearance,
        iterations=stats.get('iterations', 0),
        expansions=stats.get('expansions', 0),
        peak_open=stats.get('peak_open', 0),
        wall_time=document.get('wall_time', {}).get('total'),
    )
