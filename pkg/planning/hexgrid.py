"""
Axial hexagonal grid: cells, directions, occupancy maps and plane geometry.

Cells are pointy-top hexagons. Direction ``d`` points at ``60·d`` degrees, so
direction 0 is due east and indices grow counterclockwise::

    2 (0,-1)   1 (+1,-1)
 3 (-1,0)    *    0 (+1,0)
    4 (-1,+1)  5 (0,+1)

Hexagon vertex ``k`` sits at ``60·k - 30`` degrees and edge ``d`` runs from
vertex ``d`` to vertex ``d + 1``, facing the neighbor in direction ``d``.
"""
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .exceptions import InvalidMap, NotAdjacent

SQRT3_2 = math.sqrt(3.0) / 2.0


class HexCell(NamedTuple):
    q: int
    r: int

    @property
    def s(self):
        return -self.q - self.r

    @property
    def label(self):
        return f"{self.q}:{self.r}"

    def __add__(self, other):
        return HexCell(self.q + other[0], self.r + other[1])

    def as_list(self):
        return [self.q, self.r]


OFFSETS = (
    HexCell(+1, 0),
    HexCell(+1, -1),
    HexCell(0, -1),
    HexCell(-1, 0),
    HexCell(-1, +1),
    HexCell(0, +1),
)

DIRECTION_INDEX = {offset: d for d, offset in enumerate(OFFSETS)}

# Unit vectors of the six directions, kept as exact constants so that mirrored
# geometry is bit-identical.
UNIT = (
    (1.0, 0.0),
    (0.5, SQRT3_2),
    (-0.5, SQRT3_2),
    (-1.0, 0.0),
    (-0.5, -SQRT3_2),
    (0.5, -SQRT3_2),
)

# Vertex k relative to the center, for an apothem of 1.
VERTEX = tuple(
    ((UNIT[k - 1][0] + UNIT[k][0]) * 2.0 / 3.0, (UNIT[k - 1][1] + UNIT[k][1]) * 2.0 / 3.0)
    for k in range(6)
)


def opposite(d):
    return (d + 3) % 6


def mirror_direction(d):
    """Direction reflected across the x axis."""
    return (-d) % 6


def direction_angle(d):
    return math.radians(60.0 * d)


def neighbor(cell, d):
    return cell + OFFSETS[d]


def neighbors(cell):
    return [cell + offset for offset in OFFSETS]


def direction_between(a, b):
    try:
        return DIRECTION_INDEX[(b[0] - a[0], b[1] - a[1])]
    except KeyError:
        raise NotAdjacent(f"{HexCell(*a).label} and {HexCell(*b).label} are not adjacent") from None


def hex_distance(a, b):
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def mirror_cell(cell):
    """Reflection across the x axis, which is the line r = 0."""
    return HexCell(cell[0] + cell[1], -cell[1])


@dataclass(frozen=True)
class GridSpec:
    cell_inner_radius: float
    min_turn_radius: float

    def __post_init__(self):
        errors = {}
        for name in ('cell_inner_radius', 'min_turn_radius'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                errors[name] = ['must be a positive number']
        if errors:
            raise InvalidMap(errors)

    @property
    def spacing(self):
        return 2.0 * self.cell_inner_radius

    @property
    def ratio(self):
        return self.min_turn_radius / self.cell_inner_radius

    @property
    def kappa_max(self):
        return 1.0 / self.min_turn_radius

    def scaled(self, factor):
        return GridSpec(self.cell_inner_radius * factor, self.min_turn_radius * factor)


def to_cartesian(cell, spec):
    s = spec.spacing
    return (s * (cell[0] + cell[1] / 2.0), -s * SQRT3_2 * cell[1])


def from_cartesian(x, y, spec):
    """Cell containing the point, by cube rounding."""
    s = spec.spacing
    r = -y / (s * SQRT3_2)
    q = x / s - r / 2.0
    z = -q - r
    rq, rr, rz = round(q), round(r), round(z)
    dq, dr, dz = abs(rq - q), abs(rr - r), abs(rz - z)
    if dq > dr and dq > dz:
        rq = -rr - rz
    elif dr > dz:
        rr = -rq - rz
    return HexCell(int(rq), int(rr))


def unit_center(cell):
    """Cell center for an apothem of 1."""
    return (2.0 * cell[0] + cell[1], -2.0 * SQRT3_2 * cell[1])


def hexagon(cell, spec):
    """The six vertices of ``cell`` in counterclockwise order starting at vertex 0."""
    cx, cy = to_cartesian(cell, spec)
    rc = spec.cell_inner_radius
    return [(cx + rc * vx, cy + rc * vy) for vx, vy in VERTEX]


@dataclass(frozen=True)
class Bounds:
    q_min: int
    q_max: int
    r_min: int
    r_max: int

    def __contains__(self, cell):
        return self.q_min <= cell[0] <= self.q_max and self.r_min <= cell[1] <= self.r_max

    def cells(self):
        return [
            HexCell(q, r)
            for r in range(self.r_min, self.r_max + 1)
            for q in range(self.q_min, self.q_max + 1)
        ]

    def as_dict(self):
        return {'q_min': self.q_min, 'q_max': self.q_max, 'r_min': self.r_min, 'r_max': self.r_max}


@dataclass(frozen=True)
class MapGrid:
    spec: GridSpec
    bounds: Bounds
    occupied: frozenset = field(default_factory=frozenset)
    start: HexCell = HexCell(0, 0)
    target: HexCell = HexCell(0, 0)

    def __post_init__(self):
        object.__setattr__(self, 'occupied', frozenset(HexCell(*c) for c in self.occupied))
        object.__setattr__(self, 'start', HexCell(*self.start))
        object.__setattr__(self, 'target', HexCell(*self.target))

        errors = {}
        if self.bounds.q_min > self.bounds.q_max or self.bounds.r_min > self.bounds.r_max:
            errors.setdefault('bounds', []).append('minimum exceeds maximum')
        for name in ('start', 'target'):
            cell = getattr(self, name)
            if cell not in self.bounds:
                errors.setdefault(name, []).append(f"{cell.label} is outside the bounds")
            if cell in self.occupied:
                errors.setdefault(name, []).append(f"{cell.label} is occupied")
        outside = sorted(c for c in self.occupied if c not in self.bounds)
        if outside:
            errors.setdefault('occupied', []).append(
                'cells outside the bounds: ' + ', '.join(c.label for c in outside)
            )
        if errors:
            raise InvalidMap(errors)

    def is_free(self, cell):
        return cell in self.bounds and cell not in self.occupied

    def free_neighbors(self, cell):
        return [n for n in neighbors(cell) if self.is_free(n)]

    def free_cells(self):
        return [c for c in self.bounds.cells() if c not in self.occupied]
