"""
Cost function of the grid search: ``c = c_c + c_g`` with
``c_c = w_n·n + w_kappa·c_kappa``.

``c_kappa`` comes from a per-primitive CostTable. In accumulated mode the
curvature cost of every trailing window along the path is summed; in literal
mode only the window ending at the newest cell counts.
"""
import enum
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .exceptions import InvalidCostTable, UnknownVariant
from .hexgrid import to_cartesian

logger = logging.getLogger(__name__)

BUILTIN_TABLES = {
    'ribbon': (0.0, 0.087, 0.119, 0.195, 0.429, 0.109, 0.429, 0.507, 0.915),
    'adapted_ribbon': (0.0, 0.087, 0.119, 0.119, 0.429, 0.0, 0.429, 0.087, 0.915),
    'curvature_penalty': (0.0, 0.1, 0.2, 0.2, 1.0, 0.0, 1.0, 0.1, 1.0),
}

BUILTIN_VARIANTS = tuple(BUILTIN_TABLES)

# Primitive ids that are the same cells walked in the opposite direction.
REVERSAL_PAIRS = ((2, 8), (3, 4))
ZIGZAG_ID = 6
STRAIGHT_ID = 1


class KappaAccumulation(str, enum.Enum):
    ACCUMULATED = 'accumulated'
    LITERAL = 'literal'


@dataclass(frozen=True)
class Weights:
    w_n: float = 1.0
    w_kappa: float = 5.0

    def __post_init__(self):
        if self.w_n < 0 or self.w_kappa < 0:
            raise ValueError('weights must be non-negative')

    def as_dict(self):
        return {'w_n': self.w_n, 'w_kappa': self.w_kappa}


@dataclass(frozen=True)
class CostTable:
    variant: str
    c_kappa: tuple

    def __getitem__(self, primitive_id):
        return self.c_kappa[primitive_id - 1]

    @property
    def ids(self):
        return list(range(1, len(self.c_kappa) + 1))

    def to_document(self):
        return {'variant': self.variant, 'costs': {str(i): self[i] for i in self.ids}}


@dataclass(frozen=True)
class CostBreakdown:
    n_cells: int
    c_kappa_term: float
    c_c: float
    c_g: float
    c: float

    def as_dict(self):
        return {
            'n_cells': self.n_cells,
            'c_kappa_term': self.c_kappa_term,
            'c_c': self.c_c,
            'c_g': self.c_g,
            'c': self.c,
        }


def builtin_table(variant):
    try:
        return CostTable(variant, BUILTIN_TABLES[variant])
    except KeyError:
        raise UnknownVariant(
            f"unknown cost table {variant!r}; choose one of {', '.join(BUILTIN_VARIANTS)}"
        ) from None


def adapt_table(ribbon):
    costs = list(ribbon.c_kappa)
    for a, b in REVERSAL_PAIRS:
        low = min(ribbon[a], ribbon[b])
        costs[a - 1] = costs[b - 1] = low
    costs[ZIGZAG_ID - 1] = ribbon[STRAIGHT_ID]
    variant = ribbon.variant if ribbon.variant.startswith('adapted_') else f"adapted_{ribbon.variant}"
    return CostTable(variant, tuple(costs))


def table_from_document(document, expected_ids=9):
    if not isinstance(document, dict) or not isinstance(document.get('costs'), dict):
        raise InvalidCostTable("cost table document needs a 'costs' mapping")
    try:
        costs = {int(k): float(v) for k, v in document['costs'].items()}
    except (TypeError, ValueError) as exc:
        raise InvalidCostTable(f"cost entries must map ids to numbers: {exc}") from exc
    if sorted(costs) != list(range(1, expected_ids + 1)):
        raise InvalidCostTable(f"cost table must list ids 1..{expected_ids}")
    bad = [i for i, v in costs.items() if not (0.0 <= v <= 1.0)]
    if bad:
        raise InvalidCostTable(f"costs outside [0, 1] for ids {bad}")
    return CostTable(str(document.get('variant', 'custom')), tuple(costs[i] for i in sorted(costs)))


def load_cost_table(source, expected_ids=9):
    """Built-in variant name, ``file:PATH``, or a document dict."""
    if isinstance(source, CostTable):
        return source
    if isinstance(source, dict):
        return table_from_document(source, expected_ids)
    if source.startswith('file:'):
        path = Path(source[len('file:'):])
        try:
            document = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidCostTable(f"cannot read cost table {path}: {exc}") from exc
        return table_from_document(document, expected_ids)
    return builtin_table(source)


def cost_to_come(n_c_star, window_primitive, table, weights,
                 mode=KappaAccumulation.ACCUMULATED, accumulated_kappa=0.0):
    window_cost = table[window_primitive] if window_primitive is not None else 0.0
    if KappaAccumulation(mode) is KappaAccumulation.LITERAL:
        kappa = window_cost
    else:
        kappa = accumulated_kappa + window_cost
    return weights.w_n * n_c_star + weights.w_kappa * kappa


def cost_to_go(cell, target, spec):
    ax, ay = to_cartesian(cell, spec)
    bx, by = to_cartesian(target, spec)
    return math.hypot(ax - bx, ay - by) / spec.spacing


def total_cost(n_cells, c_kappa_term, c_c, c_g):
    return CostBreakdown(n_cells=n_cells, c_kappa_term=c_kappa_term, c_c=c_c, c_g=c_g, c=c_c + c_g)


def path_objective(window_ids, n_cells, table, weights, mode=KappaAccumulation.ACCUMULATED):
    """Canonical objective of a complete path from its per-window primitive ids."""
    if KappaAccumulation(mode) is KappaAccumulation.LITERAL:
        kappa = table[window_ids[-1]] if window_ids else 0.0
    else:
        kappa = math.fsum(table[i] for i in window_ids)
    term = weights.w_kappa * kappa
    c_c = weights.w_n * n_cells + term
    return total_cost(n_cells, term, c_c, 0.0)
