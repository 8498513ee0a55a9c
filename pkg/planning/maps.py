"""
Map documents::

    {"cell_inner_radius": 1.0, "min_turn_radius": 3.329,
     "bounds": {"q_min": 0, "q_max": 9, "r_min": 0, "r_max": 9},
     "start": [0, 0], "target": [5, 0], "occupied": [[2, 1], ...]}

Structure and types are checked by DRF serializers (ParseError naming the
first bad field); semantic problems come from MapGrid (InvalidMap).
"""
import json
from pathlib import Path

from rest_framework import serializers

from .exceptions import ParseError
from .hexgrid import Bounds, GridSpec, MapGrid

MAP_DIR = Path(__file__).resolve().parent / 'data' / 'maps'


class CellField(serializers.ListField):
    child = serializers.IntegerField()

    def __init__(self, **kwargs):
        super().__init__(min_length=2, max_length=2, **kwargs)


class BoundsSerializer(serializers.Serializer):
    q_min = serializers.IntegerField()
    q_max = serializers.IntegerField()
    r_min = serializers.IntegerField()
    r_max = serializers.IntegerField()


class MapDocumentSerializer(serializers.Serializer):
    cell_inner_radius = serializers.FloatField()
    min_turn_radius = serializers.FloatField()
    bounds = BoundsSerializer()
    start = CellField()
    target = CellField()
    occupied = serializers.ListField(child=CellField(), required=False, default=list)


def _first_error(detail, path=''):
    if isinstance(detail, dict):
        key, value = next(iter(detail.items()))
        return _first_error(value, f"{path}.{key}" if path else str(key))
    if isinstance(detail, (list, tuple)):
        return _first_error(detail[0], path)
    return path, str(detail)


def load_map(document):
    if not isinstance(document, dict):
        raise ParseError('map document must be an object')
    serializer = MapDocumentSerializer(data=document)
    if not serializer.is_valid():
        field, message = _first_error(serializer.errors)
        raise ParseError(message, field=field)
    data = serializer.validated_data
    spec = GridSpec(data['cell_inner_radius'], data['min_turn_radius'])
    return MapGrid(
        spec=spec,
        bounds=Bounds(**data['bounds']),
        occupied=frozenset(tuple(c) for c in data['occupied']),
        start=tuple(data['start']),
        target=tuple(data['target']),
    )


def load_map_file(path):
    try:
        document = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read map file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"map file {path} is not valid JSON: {exc}") from exc
    return load_map(document)


def serialize_map(grid):
    return {
        'cell_inner_radius': grid.spec.cell_inner_radius,
        'min_turn_radius': grid.spec.min_turn_radius,
        'bounds': grid.bounds.as_dict(),
        'start': grid.start.as_list(),
        'target': grid.target.as_list(),
        'occupied': [c.as_list() for c in sorted(grid.occupied)],
    }


def shipped_map(name):
    return load_map_file(MAP_DIR / f"{name}.json")
