"""
Ribbon smoothing: a G1 line/arc path with bounded curvature inside the union
of a grid path's hexagons.

All geometry is worked in units of the cell apothem, so results are scale
equivariant; segments are scaled back on output. The path is a polyline
whose first leg runs along the start heading and which then passes one
waypoint on every portal (edge shared by consecutive cells) and one on the
exit edge. Every corner is rounded with the largest arc its two legs allow.
Waypoints start on taut-string and ray seeds and are relaxed sideways along
their edges, minimising max |kappa| plus a weighted median |kappa|.
"""
import bisect
import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .costs import CostTable
from .exceptions import Infeasible, NotAPath, SelfOverlap
from .hexgrid import UNIT, VERTEX, GridSpec, HexCell, direction_angle, neighbor, opposite, to_cartesian, unit_center
from .primitives import path_moves

logger = logging.getLogger(__name__)

TAU = 2.0 * math.pi
INV_SQRT3 = 1.0 / math.sqrt(3.0)
UNIT_ARRAY = np.array(UNIT)


class SegmentKind(str, enum.Enum):
    LINE = 'line'
    ARC = 'arc'


class ExitKind(str, enum.Enum):
    CHORD = 'chord'
    PORTAL = 'portal'
    EDGE = 'edge'


def advance(x, y, heading, curvature, s):
    """Pose after driving ``s`` along a circle of signed ``curvature``."""
    half = 0.5 * curvature * s
    chord = s if curvature == 0.0 else 2.0 * math.sin(half) / curvature
    angle = heading + half
    return x + chord * math.cos(angle), y + chord * math.sin(angle), heading + curvature * s


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float

    def mirrored(self):
        return Pose(self.x, -self.y, -self.heading)

    def scaled(self, factor):
        return Pose(self.x * factor, self.y * factor, self.heading)

    def as_dict(self):
        return {'x': self.x, 'y': self.y, 'heading': self.heading}


@dataclass(frozen=True)
class ArcSegment:
    x: float
    y: float
    heading: float
    curvature: float
    length: float

    @property
    def kind(self):
        return SegmentKind.LINE if self.curvature == 0.0 else SegmentKind.ARC

    @property
    def start(self):
        return Pose(self.x, self.y, self.heading)

    @property
    def end(self):
        return Pose(*advance(self.x, self.y, self.heading, self.curvature, self.length))

    def point_at(self, s):
        return Pose(*advance(self.x, self.y, self.heading, self.curvature, s))

    def as_dict(self):
        return {
            'kind': self.kind.value,
            'x': self.x,
            'y': self.y,
            'heading': self.heading,
            'curvature': self.curvature,
            'length': self.length,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            float(data['x']), float(data['y']), float(data['heading']),
            float(data['curvature']), float(data['length']),
        )


@dataclass(frozen=True)
class ArcPath:
    segments: tuple
    splits: tuple = ()
    history: tuple = field(default=(), compare=False)

    @property
    def length(self):
        return math.fsum(seg.length for seg in self.segments)

    @property
    def start(self):
        return self.segments[0].start

    @property
    def end(self):
        return self.segments[-1].end

    @property
    def max_curvature(self):
        return max((abs(seg.curvature) for seg in self.segments), default=0.0)

    def to_document(self):
        return {'segments': [seg.as_dict() for seg in self.segments], 'splits': list(self.splits)}

    @classmethod
    def from_document(cls, document):
        return cls(
            segments=tuple(ArcSegment.from_dict(s) for s in document['segments']),
            splits=tuple(document.get('splits', ())),
        )

    def polyline(self, step):
        return [(p.x, p.y) for p in sample_path(self, step)]


@dataclass(frozen=True)
class Sample:
    x: float
    y: float
    heading: float
    curvature: float
    s: float


@dataclass(frozen=True)
class SmoothingConfig:
    kappa_max: float
    sample_step: float
    max_iterations: int = 40
    tolerance: float = 1e-6
    median_weight: float = 0.5
    reach_fractions: tuple = (0.15, 0.3, 0.5, 0.75)
    # The remaining knobs are in units of the cell apothem.
    min_reach: float = 0.05
    offset_step: float = 0.15
    reach_step: float = 0.5
    offset_limit: float = 0.8
    swing: float = 0.45
    clearance: float = 0.25
    containment_tolerance: float = 1e-6
    min_offset_step: float = 0.0125

    def __post_init__(self):
        if not (self.sample_step > 0 and self.kappa_max > 0):
            raise ValueError('sample_step and kappa_max must be positive')

    @classmethod
    def for_spec(cls, spec, **overrides):
        return cls(kappa_max=spec.kappa_max, sample_step=spec.cell_inner_radius / 10.0, **overrides)


@dataclass(frozen=True)
class Corridor:
    cells: tuple
    spec: GridSpec
    moves: tuple
    exit_direction: int
    exit_kind: ExitKind
    left_boundary: tuple
    right_boundary: tuple
    frontier: tuple
    entry_edge: tuple
    exit_edge: tuple

    def outline(self):
        """Closed polygon around the corridor, counterclockwise."""
        return list(self.right_boundary) + list(self.frontier[1:-1]) + list(reversed(self.left_boundary))


def split_at_revisits(cells):
    pieces, current, seen = [], [], set()
    for cell in cells:
        if cell in seen:
            pieces.append(current)
            current, seen = [], set()
        current.append(cell)
        seen.add(cell)
    pieces.append(current)
    return pieces


def _append(chain, point):
    if not chain or math.dist(chain[-1], point) > 1e-9:
        chain.append(point)


def build_corridor(cells, spec, heading=None, next_cell=None):
    """Corridor of ``cells``.

    The exit edge is the chord through the last center perpendicular to the
    last move, the portal into ``next_cell`` when given, or for a single cell
    the edge in direction ``heading`` (default 0).
    """
    cells = tuple(HexCell(*c) for c in cells)
    if not cells:
        raise NotAPath('empty cell sequence')
    seen = {}
    for i, cell in enumerate(cells):
        if cell in seen:
            raise SelfOverlap(cell, i)
        seen[cell] = i
    moves = tuple(path_moves(cells))

    if next_cell is not None:
        exit_kind = ExitKind.PORTAL
        exit_direction = path_moves([cells[-1], HexCell(*next_cell)])[0]
    elif moves:
        exit_kind = ExitKind.CHORD
        exit_direction = moves[-1]
    else:
        exit_kind = ExitKind.EDGE
        exit_direction = heading if heading is not None else 0

    rc = spec.cell_inner_radius

    def vertex(cell, k):
        cx, cy = unit_center(cell)
        vx, vy = VERTEX[k % 6]
        return ((cx + vx) * rc, (cy + vy) * rc)

    exits = list(moves) + [exit_direction]
    left, right = [], []
    for i, cell in enumerate(cells):
        entry = opposite(moves[i - 1]) if i else opposite(exits[0])
        f = exits[i]
        last_chord = i == len(cells) - 1 and exit_kind is ExitKind.CHORD
        stop_left = f + 2 if last_chord else f + 1
        stop_right = f - 1 if last_chord else f
        k = entry
        _append(left, vertex(cell, k))
        while k % 6 != stop_left % 6:
            k -= 1
            _append(left, vertex(cell, k))
        k = entry + 1
        _append(right, vertex(cell, k))
        while k % 6 != stop_right % 6:
            k += 1
            _append(right, vertex(cell, k))

    last, f = cells[-1], exit_direction
    if exit_kind is ExitKind.CHORD:
        frontier = tuple(vertex(last, k) for k in (f - 1, f, f + 1, f + 2))
        exit_edge = (vertex(last, f - 1), vertex(last, f + 2))
    else:
        frontier = (vertex(last, f), vertex(last, f + 1))
        exit_edge = frontier
    entry_dir = opposite(exits[0])
    entry_edge = (vertex(cells[0], entry_dir + 1), vertex(cells[0], entry_dir))

    return Corridor(
        cells=cells,
        spec=spec,
        moves=moves,
        exit_direction=exit_direction,
        exit_kind=exit_kind,
        left_boundary=tuple(left),
        right_boundary=tuple(right),
        frontier=frontier,
        entry_edge=entry_edge,
        exit_edge=exit_edge,
    )


def corridors_for_path(cells, spec, heading=None):
    """Corridors of the revisit-free pieces of ``cells``, chained through their portals."""
    cells = [HexCell(*c) for c in cells]
    pieces = split_at_revisits(cells)
    if len(cells) > 1:
        heading = path_moves(cells)[-1]
    corridors = []
    for i, piece in enumerate(pieces):
        following = pieces[i + 1][0] if i + 1 < len(pieces) else None
        corridors.append(build_corridor(piece, spec, heading=heading, next_cell=following))
    return corridors


class _Ribbon:
    """Unit-scale geometry shared by every trial of one smoothing run."""

    def __init__(self, corridors):
        self.cells = [cell for corridor in corridors for cell in corridor.cells]
        moves = path_moves(self.cells)
        self.moves = moves
        self.centers = [unit_center(c) for c in self.cells]

        self.portals = []
        for i, m in enumerate(moves):
            cx, cy = self.centers[i]
            ux, uy = UNIT[m]
            self.portals.append(((cx + ux, cy + uy), (-uy, ux), INV_SQRT3, (ux, uy)))

        boundaries, offset = [], 0
        for corridor in corridors[:-1]:
            offset += len(corridor.cells)
            boundaries.append(offset - 1)
        self.split_portals = boundaries

        final = corridors[-1]
        f = final.exit_direction
        cx, cy = self.centers[-1]
        ux, uy = UNIT[f]
        if final.exit_kind is ExitKind.CHORD:
            self.exit = ((cx, cy), (-uy, ux), 2.0 * INV_SQRT3, (ux, uy))
        else:
            self.exit = ((cx + ux, cy + uy), (-uy, ux), INV_SQRT3, (ux, uy))
        self.exit_direction = f

        unique = list(dict.fromkeys(self.cells))
        members = set(unique)
        self.unique_centers = np.array([unit_center(c) for c in unique])
        starts, ends = [], []
        for cell in unique:
            cx, cy = unit_center(cell)
            for d in range(6):
                if neighbor(cell, d) not in members:
                    starts.append((cx + VERTEX[d][0], cy + VERTEX[d][1]))
                    ends.append((cx + VERTEX[(d + 1) % 6][0], cy + VERTEX[(d + 1) % 6][1]))
        self.edge_a = np.array(starts)
        self.edge_ab = np.array(ends) - self.edge_a
        self.edge_len2 = np.einsum('ij,ij->i', self.edge_ab, self.edge_ab)
        self.portal_mids = np.array([p[0] for p in self.portals]) if self.portals else np.zeros((0, 2))

    def signed_distance(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rel = points[:, None, :] - self.unique_centers[None, :, :]
        inside = ((rel @ UNIT_ARRAY.T).max(axis=2) <= 1.0 + 1e-12).any(axis=1)
        ap = points[:, None, :] - self.edge_a[None, :, :]
        t = np.clip(np.einsum('nmk,mk->nm', ap, self.edge_ab) / self.edge_len2, 0.0, 1.0)
        gap = ap - t[:, :, None] * self.edge_ab[None, :, :]
        dist = np.sqrt(np.einsum('nmk,nmk->nm', gap, gap).min(axis=1))
        return np.where(inside, dist, -dist)

    def in_first_cell(self, x, y, tolerance):
        cx, cy = self.centers[0]
        return max(ux * (x - cx) + uy * (y - cy) for ux, uy in UNIT) <= 1.0 + tolerance

    def point_on(self, edge, offset):
        (mx, my), (tx, ty), half, _ = edge
        return (mx + offset * half * tx, my + offset * half * ty)

    def edges(self):
        return self.portals + [self.exit]


def fillet_radii(legs, turns):
    """Largest fillet radius at every corner of a polyline.

    Corner ``k`` joins legs ``k`` and ``k + 1`` and turns by ``turns[k]``;
    a fillet of radius ``R`` takes ``R·tan(|turn|/2)`` from both legs. All
    radii grow together until some leg is used up; the corners on that leg
    keep their radius and the rest keep growing. Straight corners get ``inf``.
    """
    tans = [math.tan(0.5 * abs(turn)) for turn in turns]
    radii = [math.inf] * len(turns)
    used = [0.0] * len(legs)
    free = {k for k, t in enumerate(tans) if t > 0.0}
    while free:
        bound, tight = math.inf, None
        for j, length in enumerate(legs):
            share = sum(tans[k] for k in (j - 1, j) if k in free)
            if share > 0.0:
                value = max(0.0, length - used[j]) / share
                if value < bound:
                    bound, tight = value, j
        for k in (tight - 1, tight):
            if k in free:
                free.discard(k)
                radii[k] = bound
                used[k] += bound * tans[k]
                used[k + 1] += bound * tans[k]
    return radii


@dataclass
class _Trial:
    params: tuple
    segments: list
    corners: list
    excess: float
    depth: float = 0.0
    violation: float = 0.0
    max_ratio: float = 0.0
    median: float = 0.0
    score: float = 0.0
    focus: int = 0

    @property
    def objective(self):
        return (self.violation, self.score)


def _edge_gap(edge, x, y):
    (mx, my), _, _, (nx, ny) = edge
    return (x - mx) * nx + (y - my) * ny


def _segment_starts(start, segments):
    x, y, heading = start
    xs, ys, headings = [], [], []
    for kappa, length in segments:
        xs.append(x)
        ys.append(y)
        headings.append(heading)
        x, y, heading = advance(x, y, heading, kappa, length)
    return np.array(xs), np.array(ys), np.array(headings)


class _Fillets:
    """Builds and scores filleted polylines for one smoothing run.

    A trial is ``(reach, o_1 .. o_n, o_exit)``: the first corner sits
    ``reach`` along the start heading, then one waypoint per portal still
    ahead of it and one on the exit edge, each ``o`` half-lengths off the
    edge midpoint.
    """

    def __init__(self, ribbon, start, config):
        self.ribbon = ribbon
        self.start = start
        self.config = config
        self.kappa_max = config.kappa_max
        self.step = config.sample_step
        self.limit = config.offset_limit
        self.heading = (math.cos(start[2]), math.sin(start[2]))
        self.reach_range = (config.min_reach, self._free_run())
        self._cache = {}

    def _free_run(self):
        """How far the start ray stays inside the corridor."""
        x, y, _ = self.start
        hx, hy = self.heading
        s = np.arange(1, 401) * 0.05
        outside = np.flatnonzero(self.ribbon.signed_distance(np.column_stack((x + s * hx, y + s * hy))) < 0.0)
        inside = s[:outside[0]] if len(outside) else s
        return max(float(inside[-1]) if len(inside) else 0.0, self.config.min_reach)

    def polyline(self, params):
        x, y, _ = self.start
        hx, hy = self.heading
        vx, vy = x + params[0] * hx, y + params[0] * hy
        points = [(x, y), (vx, vy)]
        edges = self.ribbon.edges()
        behind = True
        for index, (edge, offset) in enumerate(zip(edges, params[1:])):
            # portals the first leg already crossed carry no waypoint
            if behind and index < len(edges) - 1 and _edge_gap(edge, vx, vy) >= 0.0:
                continue
            behind = False
            point = self.ribbon.point_on(edge, offset)
            if math.dist(points[-1], point) > 1e-12:
                points.append(point)
        return points

    def run(self, params):
        key = tuple(params)
        if key not in self._cache:
            trial = self._build(key)
            self._evaluate(trial)
            self._cache[key] = trial
        return self._cache[key]

    def _build(self, params):
        points = self.polyline(params)
        legs = [math.dist(a, b) for a, b in zip(points, points[1:])]
        directions = [self.start[2]] + [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(points[1:], points[2:])]
        turns = []
        for before, after in zip(directions, directions[1:]):
            turn = math.remainder(after - before, TAU)
            turns.append(0.0 if abs(turn) <= 1e-12 else turn)
        radii = fillet_radii(legs, turns)

        kmax = self.kappa_max
        arcs, corners, excess = [], [], 0.0
        for k, (turn, radius) in enumerate(zip(turns, radii)):
            if turn == 0.0:
                arcs.append((0.0, 0.0, 0.0))
                continue
            radius = max(radius, 1e-9)
            over = 0.0
            if radius * kmax < 1.0:
                if radius * kmax >= 1.0 - 1e-9:
                    radius = 1.0 / kmax
                else:
                    over = abs(turn) * (1.0 - kmax * radius)
                    excess += over
            kappa = math.copysign(1.0 / radius, turn)
            arcs.append((kappa, radius * abs(turn), radius * math.tan(0.5 * abs(turn))))
            corners.append((points[k + 1], abs(kappa) / kmax, over))

        segments = []

        def push(kappa, length):
            if length <= 1e-12:
                return
            if segments and segments[-1][0] == kappa:
                segments[-1][1] += length
            else:
                segments.append([kappa, length])

        for j, length in enumerate(legs):
            before = arcs[j - 1][2] if j else 0.0
            after = arcs[j][2] if j < len(arcs) else 0.0
            push(0.0, length - before - after)
            if j < len(arcs):
                push(arcs[j][0], arcs[j][1])
        return _Trial(params=params, segments=[tuple(s) for s in segments], corners=corners, excess=excess)

    def _evaluate(self, trial):
        kappas = np.array([kappa for kappa, _ in trial.segments])
        lengths = np.array([length for _, length in trial.segments])
        xs, ys, headings = _segment_starts(self.start, trial.segments)
        starts = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))
        total = float(lengths.sum())
        s = np.append(np.arange(0.0, total, self.step), total)
        points = _positions(xs, ys, headings, kappas, starts, lengths, s)
        depth = np.maximum(0.0, -self.ribbon.signed_distance(points) - self.config.containment_tolerance)

        trial.depth = float(depth.max())
        trial.violation = trial.excess + float(depth.sum()) * self.step
        trial.max_ratio = float(np.abs(kappas).max()) / self.kappa_max
        trial.median = _median_ratio(kappas, lengths, self.step, self.kappa_max)
        trial.score = trial.max_ratio + self.config.median_weight * trial.median

        if trial.depth > 0.0:
            focus_point = points[int(np.argmax(depth))]
        elif trial.corners:
            focus_point = max(trial.corners, key=lambda corner: (corner[2], corner[1]))[0]
        else:
            focus_point = points[-1]
        mids = self.ribbon.portal_mids
        if len(mids):
            trial.focus = int(np.argmin(np.hypot(mids[:, 0] - focus_point[0], mids[:, 1] - focus_point[1])))
        else:
            trial.focus = 0

    def improves(self, a, b):
        if a.violation > 0.0 or b.violation > 0.0:
            return a.violation < b.violation
        return a.score < b.score - self.config.tolerance


def _positions(xs, ys, headings, kappas, starts, lengths, s):
    index = np.clip(np.searchsorted(starts, s, side='right') - 1, 0, len(starts) - 1)
    local = np.minimum(s - starts[index], lengths[index])
    kappa = kappas[index]
    half = 0.5 * kappa * local
    safe = np.where(kappa == 0.0, 1.0, kappa)
    chord = np.where(kappa == 0.0, local, 2.0 * np.sin(half) / safe)
    angle = headings[index] + half
    return np.column_stack((xs[index] + chord * np.cos(angle), ys[index] + chord * np.sin(angle)))


def _median_ratio(kappas, lengths, step, kappa_max):
    """Median |kappa| over the arc-length measure, sampled at cell midpoints of a uniform partition."""
    lengths = np.asarray(lengths, dtype=float)
    total = float(lengths.sum())
    if total <= 0.0:
        return 0.0
    count = max(1, math.ceil(total / step - 1e-9))
    width = total / count
    s = (np.arange(count) + 0.5) * width
    ends = np.cumsum(lengths)
    index = np.clip(np.searchsorted(ends, s, side='right'), 0, len(lengths) - 1)
    value = float(np.median(np.abs(np.asarray(kappas, dtype=float)[index]))) / kappa_max
    return min(1.0, value)


def _taut_offsets(fillets):
    """Offsets of the string pulled from the start through the portal midpoints
    to just short of the exit midpoint, keeping ``clearance`` from the boundary."""
    ribbon = fillets.ribbon
    config = fillets.config
    (ex, ey), _, _, (nx, ny) = ribbon.exit
    points = [fillets.start[:2]] + [edge[0] for edge in ribbon.portals]
    points.append((ex - config.clearance * nx, ey - config.clearance * ny))

    def visible(a, b):
        count = max(2, int(math.dist(a, b) / 0.1) + 1)
        t = np.linspace(0.0, 1.0, count)[:, None]
        samples = np.asarray(a)[None, :] * (1.0 - t) + np.asarray(b)[None, :] * t
        return bool((ribbon.signed_distance(samples) >= config.clearance).all())

    pulled = [points[0]]
    i = 0
    while i < len(points) - 1:
        j = len(points) - 1
        while j > i + 1 and not visible(points[i], points[j]):
            j -= 1
        pulled.append(points[j])
        i = j

    offsets = [_crossing_offset(pulled, edge, fillets.limit) for edge in ribbon.portals]
    return tuple(offsets) + (0.0,)


def _crossing_offset(polyline, edge, limit):
    (mx, my), (tx, ty), half, _ = edge
    ax_, ay_ = mx - half * tx, my - half * ty
    ex, ey = 2.0 * half * tx, 2.0 * half * ty
    for (px, py), (qx, qy) in zip(polyline, polyline[1:]):
        rx, ry = qx - px, qy - py
        denom = rx * ey - ry * ex
        if abs(denom) < 1e-12:
            continue
        wx, wy = ax_ - px, ay_ - py
        t = (wx * ey - wy * ex) / denom
        u = (wx * ry - wy * rx) / denom
        if -1e-9 <= t <= 1.0 + 1e-9 and -1e-9 <= u <= 1.0 + 1e-9:
            offset = (2.0 * u - 1.0)
            return max(-limit, min(limit, offset))
    return 0.0


def _ray_offsets(fillets):
    """Offsets where the start ray meets every edge, or None if one is missed."""
    x, y, _ = fillets.start
    hx, hy = fillets.heading
    offsets = []
    for (mx, my), (tx, ty), half, (nx, ny) in fillets.ribbon.edges():
        along = hx * nx + hy * ny
        if along <= 1e-9:
            return None
        lam = ((mx - x) * nx + (my - y) * ny) / along
        offset = ((x + lam * hx - mx) * tx + (y + lam * hy - my) * ty) / half
        if lam < 0.0 or abs(offset) > fillets.limit:
            return None
        offsets.append(offset)
    return tuple(offsets)


def _swing_offsets(fillets):
    """Waypoints pushed towards the outside of the turns on either side of each portal."""
    moves = fillets.ribbon.moves
    sides = [0] + [_TURN_SIDE[(b - a) % 6] for a, b in zip(moves, moves[1:])] + [0]
    swing, limit = fillets.config.swing, fillets.limit
    offsets = [max(-limit, min(limit, -swing * (sides[p] + sides[p + 1]))) for p in range(len(moves))]
    return tuple(offsets) + (0.0,)


_TURN_SIDE = {0: 0, 1: 1, 2: 1, 3: 0, 4: -1, 5: -1}


def _seeds(fillets):
    seeds = [
        _taut_offsets(fillets),
        tuple(0.0 for _ in fillets.ribbon.edges()),
        _swing_offsets(fillets),
    ]
    ray = _ray_offsets(fillets)
    if ray is not None:
        seeds.append(ray)
    return list(dict.fromkeys(seeds))


def _relax(fillets, best):
    config = fillets.config
    portals = len(fillets.ribbon.portals)
    exit_index = portals + 1
    low, high = fillets.reach_range
    step_offset, step_reach = config.offset_step, config.reach_step
    history = [best.objective]

    for _ in range(config.max_iterations):
        improved = False
        focus = best.focus
        window = [p + 1 for p in range(max(0, focus - 2), min(portals, focus + 3))] + [exit_index]
        moves = [(j, step_offset, -fillets.limit, fillets.limit) for j in window] + [(0, step_reach, low, high)]
        for index, step, lower, upper in moves:
            trials = []
            for sign in (1.0, -1.0):
                params = list(best.params)
                params[index] = max(lower, min(upper, params[index] + sign * step))
                if params[index] != best.params[index]:
                    trials.append(fillets.run(params))
            challenger = _pick(trials, index)
            if challenger is not None and fillets.improves(challenger, best):
                best = challenger
                history.append(best.objective)
                improved = True

        if not improved:
            step_offset /= 2.0
            step_reach /= 2.0
            if step_offset < config.min_offset_step:
                break
    return best, history


def _pick(trials, index):
    return min(trials, key=lambda trial: (trial.objective, abs(trial.params[index])), default=None)


def smooth(corridor, start_pose, config):
    """Smooth path through ``corridor`` (or a chain of corridor pieces) from ``start_pose``."""
    corridors = [corridor] if isinstance(corridor, Corridor) else list(corridor)
    rc = corridors[0].spec.cell_inner_radius
    ribbon = _Ribbon(corridors)
    unit_config = replace(config, kappa_max=config.kappa_max * rc, sample_step=config.sample_step / rc)
    start = (start_pose.x / rc, start_pose.y / rc, start_pose.heading)
    if not ribbon.in_first_cell(start[0], start[1], unit_config.containment_tolerance):
        raise Infeasible('start pose lies outside the first cell')

    fillets = _Fillets(ribbon, start, unit_config)
    low, high = fillets.reach_range
    best = None
    for offsets in _seeds(fillets):
        for fraction in unit_config.reach_fractions:
            trial = fillets.run((max(low, fraction * high),) + offsets)
            if best is None or fillets.improves(trial, best):
                best = trial

    best, history = _relax(fillets, best)
    if best.violation > 0.0:
        reason = 'curvature bound exceeded' if best.excess > 0.0 else 'path leaves the corridor'
        raise Infeasible(
            f"no curvature-feasible path found: {reason}",
            min_clearance=-best.depth * rc if best.depth > 0.0 else None,
            max_curvature_ratio=best.max_ratio,
        )

    logger.debug(
        'smoothed %d cells: max |k|/kmax %.4f, median %.4f, %d fillets, %d relaxation steps, %d trials',
        len(ribbon.cells), best.max_ratio, best.median, len(best.corners), len(history) - 1, len(fillets._cache),
    )
    return _assemble(fillets, best, start_pose, rc, history)


def _splits(fillets, trial):
    """Arc lengths where the path crosses the portals between corridor pieces."""
    ribbon = fillets.ribbon
    if not ribbon.split_portals:
        return []
    kappas = np.array([kappa for kappa, _ in trial.segments])
    lengths = np.array([length for _, length in trial.segments])
    xs, ys, headings = _segment_starts(fillets.start, trial.segments)
    starts = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))
    total = float(lengths.sum())
    s = np.linspace(0.0, total, max(2, int(total / 0.02) + 1))
    points = _positions(xs, ys, headings, kappas, starts, lengths, s)

    def position(value):
        return _positions(xs, ys, headings, kappas, starts, lengths, np.array([value]))[0]

    splits, low = [], 0
    for index in ribbon.split_portals:
        edge = ribbon.portals[index]
        (mx, my), (tx, ty), half, _ = edge
        gaps = np.array([_edge_gap(edge, px, py) for px, py in points])
        for i in np.flatnonzero((gaps[:-1] < 0.0) & (gaps[1:] >= 0.0)):
            if i < low:
                continue
            if gaps[i + 1] == 0.0:
                crossing = float(s[i + 1])
            else:
                crossing = float(brentq(lambda v: _edge_gap(edge, *position(v)), s[i], s[i + 1], xtol=1e-14))
            px, py = position(crossing)
            if abs((px - mx) * tx + (py - my) * ty) <= half + 1e-9:
                splits.append(crossing)
                low = i + 1
                break
        else:
            logger.debug('path never crosses split portal %d', index)
    return splits


def _assemble(fillets, trial, start_pose, rc, history):
    x, y, heading = start_pose.x, start_pose.y, start_pose.heading
    segments = []
    for kappa, length in trial.segments:
        segment = ArcSegment(x, y, heading, kappa / rc, length * rc)
        segments.append(segment)
        x, y, heading = advance(x, y, heading, segment.curvature, segment.length)
    return ArcPath(
        segments=tuple(segments),
        splits=tuple(s * rc for s in _splits(fillets, trial)),
        history=tuple(history),
    )


def sample_path(path, step):
    if step <= 0:
        raise ValueError('sample step must be positive')
    total = path.length
    count = int(math.floor(total / step + 1e-9))
    positions = [i * step for i in range(count + 1)]
    if total - positions[-1] > 1e-9 * step:
        positions.append(total)
    starts, acc = [], 0.0
    for segment in path.segments:
        starts.append(acc)
        acc += segment.length
    samples = []
    for s in positions:
        i = max(0, min(bisect.bisect_right(starts, s) - 1, len(path.segments) - 1))
        segment = path.segments[i]
        local = min(s - starts[i], segment.length)
        pose = segment.point_at(local)
        samples.append(Sample(pose.x, pose.y, pose.heading, segment.curvature, s))
    return samples


def median_curvature_cost(path, kappa_max, step):
    if step <= 0:
        raise ValueError('sample step must be positive')
    return _median_ratio(
        [seg.curvature for seg in path.segments], [seg.length for seg in path.segments], step, kappa_max,
    )


def corridor_clearance(path, corridors, step):
    """Smallest signed distance (length units) of the sampled path to the corridor boundary."""
    corridors = [corridors] if isinstance(corridors, Corridor) else list(corridors)
    rc = corridors[0].spec.cell_inner_radius
    ribbon = _Ribbon(corridors)
    points = np.array([(p.x / rc, p.y / rc) for p in sample_path(path, step)])
    return float(ribbon.signed_distance(points).min()) * rc


def g1_gap(path):
    """Largest position or heading mismatch between consecutive segments."""
    gap = 0.0
    for a, b in zip(path.segments, path.segments[1:]):
        end = a.end
        gap = max(gap, math.hypot(end.x - b.x, end.y - b.y), abs(end.heading - b.heading))
    return gap


def start_pose_for(cells, spec, heading=None):
    """Pose at the first cell center facing the first move (or ``heading`` index for one cell)."""
    cells = list(cells)
    x, y = to_cartesian(cells[0], spec)
    if len(cells) > 1:
        direction = path_moves(cells[:2])[0]
    else:
        direction = heading if heading is not None else 0
    return Pose(x, y, direction_angle(direction))


def precompute_primitive_costs(catalog, spec=None, config=None):
    spec = spec or GridSpec(1.0, 3.329)
    config = config or SmoothingConfig.for_spec(spec)
    costs = []
    for primitive in catalog.primitives:
        cells = primitive.cells()
        path = smooth(build_corridor(cells, spec), start_pose_for(cells, spec), config)
        cost = median_curvature_cost(path, config.kappa_max, config.sample_step)
        logger.info('primitive %d (%s): median curvature cost %.4f', primitive.id, primitive.text, cost)
        costs.append(cost)
    return CostTable('precomputed', tuple(costs))
