"""
Motion primitives expressed as turn signatures.

A path of ``k + 2`` cells has ``k + 1`` moves and ``k`` direction changes. Each
change is a TurnSymbol (S, L = +60°, R = -60°); anything sharper is
inadmissible. A catalog lists one canonical signature per mirror class and is
the authority on which trailing windows the search may extend.
"""
import enum
import itertools
import json
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .exceptions import InvalidCatalog, NotAPath, NotAdjacent, NotInCatalog, UnsupportedRatio
from .hexgrid import HexCell, direction_between, neighbor

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / 'data' / 'catalogs'
BUILTIN_CATALOG_FILE = DATA_DIR / 'c3.json'


class TurnSymbol(str, enum.Enum):
    S = 'S'
    L = 'L'
    R = 'R'

    def __repr__(self):
        return self.value

    @property
    def mirrored(self):
        return _MIRROR[self]

    @property
    def delta(self):
        return _DELTA[self]


_MIRROR = {TurnSymbol.S: TurnSymbol.S, TurnSymbol.L: TurnSymbol.R, TurnSymbol.R: TurnSymbol.L}
_DELTA = {TurnSymbol.S: 0, TurnSymbol.L: 1, TurnSymbol.R: 5}


class _Inadmissible:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'Inadmissible'

    def __bool__(self):
        return False


INADMISSIBLE = _Inadmissible()

_TURN_BY_DELTA = {0: TurnSymbol.S, 1: TurnSymbol.L, 5: TurnSymbol.R}

C3_FORBIDDEN_PAIRS = frozenset({(TurnSymbol.L, TurnSymbol.L), (TurnSymbol.R, TurnSymbol.R)})
C3_RATIO_REGIME = (math.sqrt(7.0), 3.329)


def turn_between(d_prev, d_next):
    return _TURN_BY_DELTA.get((d_next - d_prev) % 6, INADMISSIBLE)


def parse_signature(text):
    try:
        return tuple(TurnSymbol(ch) for ch in text)
    except ValueError:
        raise InvalidCatalog(f"signature {text!r} uses symbols outside 'SLR'") from None


def signature_text(signature):
    return ''.join(t.value for t in signature)


def mirror_signature(signature):
    return tuple(t.mirrored for t in signature)


def reverse_signature(signature):
    """Signature of the same cells walked backwards."""
    return tuple(t.mirrored for t in reversed(signature))


def has_forbidden_pair(turns, forbidden_pairs=C3_FORBIDDEN_PAIRS):
    return any(pair in forbidden_pairs for pair in zip(turns, turns[1:]))


def enumerate_admissible(length, forbidden_pairs=C3_FORBIDDEN_PAIRS):
    return [
        turns
        for turns in itertools.product(TurnSymbol, repeat=length)
        if not has_forbidden_pair(turns, forbidden_pairs)
    ]


def mirror_classes(signatures):
    classes = {}
    for sig in signatures:
        key = min(sig, mirror_signature(sig), key=signature_text)
        classes.setdefault(key, set()).add(sig)
    return classes


def path_moves(cells):
    try:
        return [direction_between(a, b) for a, b in zip(cells, cells[1:])]
    except NotAdjacent as exc:
        raise NotAPath(str(exc)) from exc


def path_turns(cells):
    """Turn symbols along ``cells``; INADMISSIBLE entries mark reversals and sharp turns."""
    moves = path_moves(cells)
    return [turn_between(a, b) for a, b in zip(moves, moves[1:])]


def window_signature(cells, catalog=None):
    forbidden = catalog.forbidden_pairs if catalog else C3_FORBIDDEN_PAIRS
    turns = path_turns(list(cells))
    if any(t is INADMISSIBLE for t in turns) or has_forbidden_pair(turns, forbidden):
        return INADMISSIBLE
    return tuple(turns)


def layout_cells(signature, start=HexCell(0, 0), first_direction=0):
    """Cells of the primitive ``signature`` starting at ``start`` heading ``first_direction``."""
    cells = [HexCell(*start)]
    direction = first_direction
    cells.append(neighbor(cells[-1], direction))
    for turn in signature:
        direction = (direction + turn.delta) % 6
        cells.append(neighbor(cells[-1], direction))
    return cells


@dataclass(frozen=True)
class Primitive:
    id: int
    canonical_signature: tuple

    @property
    def mirror_signature(self):
        return mirror_signature(self.canonical_signature)

    @property
    def text(self):
        return signature_text(self.canonical_signature)

    def cells(self, start=HexCell(0, 0), first_direction=0, mirrored=False):
        sig = self.mirror_signature if mirrored else self.canonical_signature
        return layout_cells(sig, start, first_direction)


class Catalog:
    def __init__(self, name, primitives, ratio_regime, forbidden_pairs):
        self.name = name
        self.primitives = tuple(sorted(primitives, key=lambda p: p.id))
        self.ratio_regime = tuple(ratio_regime) if ratio_regime else None
        self.forbidden_pairs = frozenset(forbidden_pairs)
        self.window_turns = len(self.primitives[0].canonical_signature)

        self._by_id = {p.id: p for p in self.primitives}
        self._expanded = {}
        for p in self.primitives:
            self._expanded.setdefault(p.mirror_signature, (p.id, True))
            self._expanded[p.canonical_signature] = (p.id, False)

        # Every turn sequence up to window length that a trailing window may show.
        self._admissible = {()}
        for length in range(1, self.window_turns):
            self._admissible.update(enumerate_admissible(length, self.forbidden_pairs))
        self._admissible.update(self._expanded)

    def __repr__(self):
        return f"<Catalog {self.name}: {len(self.primitives)} primitives, window {self.window_cells}>"

    @property
    def window_cells(self):
        return self.window_turns + 2

    @property
    def ids(self):
        return [p.id for p in self.primitives]

    @property
    def expanded_signatures(self):
        return set(self._expanded)

    def primitive(self, primitive_id):
        return self._by_id[primitive_id]

    def classify(self, signature):
        try:
            return self._expanded[tuple(signature)]
        except KeyError:
            raise NotInCatalog(f"{signature_text(signature)} is not in catalog {self.name}") from None

    def admits(self, turns):
        """True when ``turns`` (at most ``window_turns`` long) may trail a path."""
        return tuple(turns) in self._admissible

    def check_ratio(self, spec):
        if self.ratio_regime is None:
            return
        low, high = self.ratio_regime
        if spec.ratio > high:
            raise UnsupportedRatio(
                f"r_min/r_c = {spec.ratio:.4f} exceeds {high} supported by catalog {self.name}"
            )
        if spec.ratio <= low:
            logger.warning(
                'r_min/r_c = %.4f is at or below %.4f; catalog %s is conservative here',
                spec.ratio, low, self.name,
            )

    def to_document(self):
        return {
            'name': self.name,
            'ratio_regime': list(self.ratio_regime) if self.ratio_regime else None,
            'forbidden_pairs': sorted(a.value + b.value for a, b in self.forbidden_pairs),
            'primitives': [{'id': p.id, 'turns': p.text} for p in self.primitives],
        }


def admissible_extension(trailing, candidate, catalog=None):
    catalog = catalog or builtin_catalog()
    cells = list(trailing)[-(catalog.window_cells - 1):] + [candidate]
    if len(cells) < 3:
        return True
    turns = path_turns(cells)
    if any(t is INADMISSIBLE for t in turns):
        return False
    return catalog.admits(turns)


def _parse_pairs(raw):
    pairs = set()
    for item in raw:
        if not isinstance(item, str) or len(item) != 2:
            raise InvalidCatalog(f"forbidden pair {item!r} must be a two-letter string")
        a, b = parse_signature(item)
        pairs.add((a, b))
    return pairs


def catalog_from_document(document):
    if not isinstance(document, dict) or not isinstance(document.get('primitives'), list):
        raise InvalidCatalog("catalog document needs a 'primitives' list")
    name = str(document.get('name', 'custom'))
    forbidden = _parse_pairs(document.get('forbidden_pairs', ['LL', 'RR']))

    ratio_regime = document.get('ratio_regime')
    if ratio_regime is not None:
        if not (isinstance(ratio_regime, list) and len(ratio_regime) == 2):
            raise InvalidCatalog('ratio_regime must be a [low, high] pair')
        ratio_regime = (float(ratio_regime[0]), float(ratio_regime[1]))

    primitives = []
    seen_ids = set()
    for entry in document['primitives']:
        if not isinstance(entry, dict) or 'id' not in entry or 'turns' not in entry:
            raise InvalidCatalog(f"primitive entry {entry!r} needs 'id' and 'turns'")
        pid = entry['id']
        if not isinstance(pid, int) or isinstance(pid, bool):
            raise InvalidCatalog(f"primitive id {pid!r} is not an integer")
        if pid in seen_ids:
            raise InvalidCatalog(f"duplicate primitive id {pid}")
        seen_ids.add(pid)
        signature = parse_signature(str(entry['turns']))
        if has_forbidden_pair(signature, forbidden):
            raise InvalidCatalog(f"primitive {pid} signature {entry['turns']} is not admissible")
        primitives.append(Primitive(pid, signature))

    if not primitives:
        raise InvalidCatalog('catalog has no primitives')
    lengths = {len(p.canonical_signature) for p in primitives}
    if len(lengths) != 1 or 0 in lengths:
        raise InvalidCatalog('all primitives must have the same non-zero number of turns')
    length = lengths.pop()

    universe = mirror_classes(enumerate_admissible(length, forbidden))
    if sorted(seen_ids) != list(range(1, len(universe) + 1)):
        raise InvalidCatalog(f"ids must be exactly 1..{len(universe)}")
    straight = tuple([TurnSymbol.S] * length)
    if next(p for p in primitives if p.id == 1).canonical_signature != straight:
        raise InvalidCatalog('primitive 1 must be the straight line')

    claimed = {}
    for p in primitives:
        for sig in (p.canonical_signature, p.mirror_signature):
            owner = claimed.setdefault(sig, p.id)
            if owner != p.id:
                raise InvalidCatalog(f"primitives {owner} and {p.id} share a mirror class")
    expected = set().union(*universe.values())
    if set(claimed) != expected:
        raise InvalidCatalog('primitives do not partition the admissible signatures')

    return Catalog(name, primitives, ratio_regime, forbidden)


def load_catalog(source=None):
    """Load the built-in catalog (``None`` or ``'builtin'``), a document dict, or a JSON file."""
    if source is None or source == 'builtin':
        return builtin_catalog()
    if isinstance(source, dict):
        return catalog_from_document(source)
    try:
        document = json.loads(Path(source).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidCatalog(f"cannot read catalog {source}: {exc}") from exc
    return catalog_from_document(document)


@lru_cache(maxsize=1)
def builtin_catalog():
    """The c3 catalog shipped in ``data/catalogs/c3.json``."""
    return load_catalog(BUILTIN_CATALOG_FILE)
