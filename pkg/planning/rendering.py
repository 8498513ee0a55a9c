"""
SVG snapshots of maps, search traces and smoothed paths.

Cell fills follow one fixed palette (CELL_COLORS). Plane y points up while
SVG y points down, so every point goes through ``_Canvas.project``.
"""
import math
import xml.etree.ElementTree as ET
from collections import Counter

from .hexgrid import HexCell, hexagon, to_cartesian
from .maps import load_map
from .search import SearchTrace
from .smoothing import ArcPath

CELL_COLORS = {
    'free': '#d3d3d3',
    'occupied': '#555555',
    'start': '#e41a1c',
    'target': '#377eb8',
    'open': '#4daf4a',
    'closed': '#f4a6c0',
}

ARROW_COLORS = {
    'single': '#222222',
    'shared': '#9a9a9a',
    'dead': '#f2c500',
}

PATH_COLOR = '#ff7f00'
GRID_PATH_COLOR = '#6a3d9a'
SVG_NS = 'http://www.w3.org/2000/svg'


def _fmt(value):
    return f"{value:.4f}".rstrip('0').rstrip('.') if value != 0 else '0'


class _Canvas:
    def __init__(self, orientation='pointy', scale=20.0):
        if orientation not in ('pointy', 'flat'):
            raise ValueError("orientation must be 'pointy' or 'flat'")
        self.rotation = math.radians(30.0) if orientation == 'flat' else 0.0
        self.scale = scale
        self.root = ET.Element('svg', {'xmlns': SVG_NS, 'version': '1.1'})
        self.points = []

    def project(self, x, y):
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        px, py = (c * x - s * y) * self.scale, -(s * x + c * y) * self.scale
        self.points.append((px, py))
        return px, py

    def group(self, css_class):
        return ET.SubElement(self.root, 'g', {'class': css_class})

    def finish(self, margin=10.0):
        xs = [p[0] for p in self.points] or [0.0]
        ys = [p[1] for p in self.points] or [0.0]
        x0, y0 = min(xs) - margin, min(ys) - margin
        width, height = max(xs) - min(xs) + 2 * margin, max(ys) - min(ys) + 2 * margin
        self.root.set('viewBox', ' '.join(_fmt(v) for v in (x0, y0, width, height)))
        self.root.set('width', _fmt(width))
        self.root.set('height', _fmt(height))
        return ET.tostring(self.root, encoding='unicode')


def _add_markers(canvas):
    defs = ET.SubElement(canvas.root, 'defs')
    for name, color in ARROW_COLORS.items():
        marker = ET.SubElement(defs, 'marker', {
            'id': f"arrow-{name}", 'viewBox': '0 0 10 10', 'refX': '9', 'refY': '5',
            'markerWidth': '5', 'markerHeight': '5', 'orient': 'auto',
        })
        ET.SubElement(marker, 'path', {'d': 'M 0 0 L 10 5 L 0 10 z', 'fill': color})


def _cell_kinds(grid, trace):
    kinds = {cell: 'free' for cell in grid.bounds.cells()}
    if trace is not None:
        for cell in trace.closed_cells:
            kinds[HexCell(*cell)] = 'closed'
        for cell in trace.open_cells:
            kinds[HexCell(*cell)] = 'open'
    for cell in grid.occupied:
        kinds[cell] = 'occupied'
    kinds[grid.start] = 'start'
    kinds[grid.target] = 'target'
    return kinds


def _draw_cells(canvas, grid, kinds, labels):
    group = canvas.group('cells')
    for cell, kind in sorted(kinds.items()):
        corners = [canvas.project(x, y) for x, y in hexagon(cell, grid.spec)]
        ET.SubElement(group, 'polygon', {
            'class': f"cell {kind}",
            'points': ' '.join(f"{_fmt(x)},{_fmt(y)}" for x, y in corners),
            'fill': CELL_COLORS[kind],
            'stroke': '#ffffff',
            'stroke-width': '1',
        })
        if labels:
            x, y = canvas.project(*to_cartesian(cell, grid.spec))
            text = ET.SubElement(group, 'text', {
                'x': _fmt(x), 'y': _fmt(y), 'font-size': _fmt(canvas.scale * grid.spec.cell_inner_radius * 0.45),
                'text-anchor': 'middle', 'dominant-baseline': 'middle',
            })
            text.text = cell.label


def _arrow(group, canvas, spec, a, b, kind):
    ax, ay = to_cartesian(a, spec)
    bx, by = to_cartesian(b, spec)
    # Stop short of the centers so arrows between neighbors stay readable.
    x1, y1 = canvas.project(ax + 0.2 * (bx - ax), ay + 0.2 * (by - ay))
    x2, y2 = canvas.project(ax + 0.8 * (bx - ax), ay + 0.8 * (by - ay))
    ET.SubElement(group, 'line', {
        'class': f"arrow {kind}",
        'x1': _fmt(x1), 'y1': _fmt(y1), 'x2': _fmt(x2), 'y2': _fmt(y2),
        'stroke': ARROW_COLORS[kind], 'stroke-width': '1.5',
        'marker-end': f"url(#arrow-{kind})",
    })


def _draw_trace(canvas, grid, trace):
    group = canvas.group('trace')
    pairs = Counter()
    dead = []
    for step in trace.steps:
        for parent, child, _ in step['opened']:
            pairs[(HexCell(*parent), HexCell(*child))] += 1
        dead.extend((HexCell(*a), HexCell(*b)) for a, b in step['dead'])
    for (a, b), count in sorted(pairs.items()):
        _arrow(group, canvas, grid.spec, a, b, 'shared' if count > 1 else 'single')
    for a, b in dead:
        _arrow(group, canvas, grid.spec, a, b, 'dead')


def arc_path_data(path, canvas):
    """SVG path data with one ``A`` command per arc piece of at most a quarter turn."""
    if not path.segments:
        return ''
    first = path.segments[0]
    x, y = canvas.project(first.x, first.y)
    parts = [f"M {_fmt(x)} {_fmt(y)}"]
    for segment in path.segments:
        if segment.curvature == 0.0:
            end = segment.end
            x, y = canvas.project(end.x, end.y)
            parts.append(f"L {_fmt(x)} {_fmt(y)}")
            continue
        turn = abs(segment.curvature) * segment.length
        pieces = max(1, math.ceil(turn / (math.pi / 2.0)))
        radius = canvas.scale / abs(segment.curvature)
        sweep = 1 if segment.curvature > 0 else 0
        for i in range(1, pieces + 1):
            end = segment.point_at(segment.length * i / pieces)
            x, y = canvas.project(end.x, end.y)
            parts.append(f"A {_fmt(radius)} {_fmt(radius)} 0 0 {sweep} {_fmt(x)} {_fmt(y)}")
    return ' '.join(parts)


def _draw_result(canvas, grid, result):
    group = canvas.group('result')
    grid_path = result.get('grid_path')
    if grid_path:
        centers = [canvas.project(*to_cartesian(c, grid.spec)) for c in grid_path['cells']]
        ET.SubElement(group, 'polyline', {
            'class': 'grid-path',
            'points': ' '.join(f"{_fmt(x)},{_fmt(y)}" for x, y in centers),
            'fill': 'none', 'stroke': GRID_PATH_COLOR, 'stroke-width': '1', 'stroke-dasharray': '3,3',
        })
    if result.get('smoothed'):
        path = ArcPath.from_document(result['smoothed'])
        ET.SubElement(group, 'path', {
            'class': 'smoothed',
            'd': arc_path_data(path, canvas),
            'fill': 'none', 'stroke': PATH_COLOR, 'stroke-width': '2',
        })


def render_svg(grid, trace=None, result=None, orientation='pointy', labels=False):
    """SVG of ``grid`` with an optional SearchTrace and result document overlaid."""
    canvas = _Canvas(orientation)
    _add_markers(canvas)
    _draw_cells(canvas, grid, _cell_kinds(grid, trace), labels)
    if trace is not None:
        _draw_trace(canvas, grid, trace)
    if result:
        _draw_result(canvas, grid, result)
    return canvas.finish()


def render_catalog_svg(catalog, spec, paths=None, orientation='pointy'):
    """Every primitive laid out from direction 0, one row each, with its smoothed path if given."""
    canvas = _Canvas(orientation)
    row_gap = 3
    for index, primitive in enumerate(catalog.primitives):
        origin = HexCell(-(row_gap * index) // 2, row_gap * index)
        cells = primitive.cells(start=origin)
        group = canvas.group(f"primitive primitive-{primitive.id}")
        for i, cell in enumerate(cells):
            kind = 'start' if i == 0 else 'target' if i == len(cells) - 1 else 'free'
            corners = [canvas.project(x, y) for x, y in hexagon(cell, spec)]
            ET.SubElement(group, 'polygon', {
                'class': f"cell {kind}",
                'points': ' '.join(f"{_fmt(x)},{_fmt(y)}" for x, y in corners),
                'fill': CELL_COLORS[kind], 'stroke': '#ffffff', 'stroke-width': '1',
            })
        x, y = canvas.project(*to_cartesian(cells[0] + (-2, 0), spec))
        title = ET.SubElement(group, 'text', {'x': _fmt(x), 'y': _fmt(y), 'font-size': '12', 'text-anchor': 'middle'})
        title.text = f"{primitive.id} {primitive.text}"
        if paths and primitive.id in paths:
            ox, oy = to_cartesian(origin, spec)
            path = paths[primitive.id]
            shifted = ArcPath(tuple(
                type(seg)(seg.x + ox, seg.y + oy, seg.heading, seg.curvature, seg.length) for seg in path.segments
            ))
            ET.SubElement(group, 'path', {
                'class': 'smoothed', 'd': arc_path_data(shifted, canvas),
                'fill': 'none', 'stroke': PATH_COLOR, 'stroke-width': '2',
            })
    return canvas.finish()


def render_document(result, orientation='pointy', labels=False):
    """SVG straight from a result document."""
    grid = load_map(result['map'])
    trace = SearchTrace.from_document(result['trace']) if result.get('trace') else None
    return render_svg(grid, trace, result, orientation, labels)
