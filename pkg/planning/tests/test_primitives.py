import itertools
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from planning.exceptions import InvalidCatalog, NotInCatalog, UnsupportedRatio
from planning.hexgrid import GridSpec, HexCell, neighbor
from planning.primitives import (
    BUILTIN_CATALOG_FILE, C3_RATIO_REGIME, INADMISSIBLE, TurnSymbol, admissible_extension, builtin_catalog,
    catalog_from_document, enumerate_admissible, has_forbidden_pair, layout_cells, load_catalog, mirror_classes,
    parse_signature, path_turns, reverse_signature, turn_between, window_signature,
)

S, L, R = TurnSymbol.S, TurnSymbol.L, TurnSymbol.R


class SignatureTests(SimpleTestCase):
    def test_turn_between(self):
        self.assertIs(turn_between(0, 0), S)
        self.assertIs(turn_between(0, 1), L)
        self.assertIs(turn_between(0, 5), R)
        self.assertIs(turn_between(5, 0), L)
        self.assertIs(turn_between(0, 2), INADMISSIBLE)
        self.assertIs(turn_between(0, 3), INADMISSIBLE)

    def test_seventeen_admissible_signatures_in_nine_classes(self):
        signatures = enumerate_admissible(3)
        self.assertEqual(len(signatures), 17)
        self.assertEqual(len(mirror_classes(signatures)), 9)

    def test_parse_rejects_unknown_symbols(self):
        with self.assertRaises(InvalidCatalog):
            parse_signature('SXL')

    def test_layout_round_trips_through_path_turns(self):
        for primitive in builtin_catalog().primitives:
            cells = primitive.cells(start=HexCell(2, -1), first_direction=3)
            self.assertEqual(len(cells), 5)
            self.assertEqual(tuple(path_turns(cells)), primitive.canonical_signature)

    def test_window_signature_flags_forbidden_pairs(self):
        cells = layout_cells((L, L), HexCell(0, 0), 0)
        self.assertIs(window_signature(cells), INADMISSIBLE)
        self.assertEqual(window_signature(layout_cells((S, L), HexCell(0, 0), 0)), (S, L))


class CatalogTests(SimpleTestCase):
    def setUp(self):
        self.catalog = builtin_catalog()

    def test_builtin_catalog(self):
        self.assertEqual(self.catalog.ids, list(range(1, 10)))
        self.assertEqual(self.catalog.window_cells, 5)
        self.assertEqual(len(self.catalog.expanded_signatures), 17)

    def test_classify_canonical_and_mirrored(self):
        self.assertEqual(self.catalog.classify((S, S, S)), (1, False))
        self.assertEqual(self.catalog.classify((L, S, L)), (9, False))
        self.assertEqual(self.catalog.classify((R, S, R)), (9, True))
        self.assertEqual(self.catalog.classify((R, L, R)), (6, True))

    def test_classify_rejects_inadmissible(self):
        with self.assertRaises(NotInCatalog):
            self.catalog.classify((R, R, S))

    def test_reversed_primitives(self):
        ssl = self.catalog.primitive(2).canonical_signature
        slr = self.catalog.primitive(3).canonical_signature
        self.assertEqual(self.catalog.classify(reverse_signature(ssl))[0], 8)
        self.assertEqual(self.catalog.classify(reverse_signature(slr))[0], 4)

    def test_builtin_is_the_shipped_file(self):
        catalog = load_catalog(BUILTIN_CATALOG_FILE)
        self.assertEqual(catalog.to_document(), self.catalog.to_document())
        self.assertEqual(self.catalog.name, 'c3')
        self.assertAlmostEqual(self.catalog.ratio_regime[0], C3_RATIO_REGIME[0], delta=1e-12)
        self.assertEqual(self.catalog.ratio_regime[1], C3_RATIO_REGIME[1])
        texts = [p.text for p in self.catalog.primitives]
        self.assertEqual(texts, ['SSS', 'SSL', 'SLR', 'LRS', 'SLS', 'LRL', 'LSR', 'LSS', 'LSL'])

    def test_windows_follow_the_pairwise_rule(self):
        for length in range(self.catalog.window_turns + 1):
            for turns in itertools.product(TurnSymbol, repeat=length):
                with self.subTest(turns=turns):
                    allowed = not has_forbidden_pair(turns, self.catalog.forbidden_pairs)
                    self.assertEqual(self.catalog.admits(turns), allowed)
                    if length == self.catalog.window_turns:
                        self.assertEqual(turns in self.catalog.expanded_signatures, allowed)

    def test_extension_agrees_with_window_signature(self):
        for moves in itertools.product(range(6), repeat=5):
            cells = [HexCell(0, 0)]
            for d in moves:
                cells.append(neighbor(cells[-1], d))
            expected = window_signature(cells[-5:]) is not INADMISSIBLE
            self.assertEqual(admissible_extension(cells[:-1], cells[-1]), expected, moves)

    def test_shorter_window_catalog(self):
        catalog = catalog_from_document({
            'name': 'c1', 'forbidden_pairs': ['LL', 'RR'],
            'primitives': [{'id': 1, 'turns': 'S'}, {'id': 2, 'turns': 'L'}],
        })
        self.assertEqual(catalog.window_cells, 3)
        self.assertEqual(catalog.classify((R,)), (2, True))

    def test_admissible_extension(self):
        straight = [HexCell(0, 0), HexCell(1, 0), HexCell(2, 0)]
        self.assertTrue(admissible_extension(straight, HexCell(3, 0)))
        self.assertTrue(admissible_extension(straight, HexCell(3, -1)))
        self.assertFalse(admissible_extension(straight, HexCell(2, -1)))
        after_left = [HexCell(0, 0), HexCell(1, 0), HexCell(2, -1)]
        self.assertFalse(admissible_extension(after_left, HexCell(2, -2)))

    def test_check_ratio(self):
        self.catalog.check_ratio(GridSpec(1.0, 3.0))
        with self.assertRaises(UnsupportedRatio):
            self.catalog.check_ratio(GridSpec(1.0, 4.0))
        with self.assertLogs('planning.primitives', level='WARNING'):
            self.catalog.check_ratio(GridSpec(1.0, 2.0))


class CorruptedCatalogTests(SimpleTestCase):
    def corrupt(self, mutate):
        document = json.loads(BUILTIN_CATALOG_FILE.read_text())
        mutate(document['primitives'])
        with self.assertRaises(InvalidCatalog):
            catalog_from_document(document)

    def test_duplicate_id(self):
        self.corrupt(lambda p: p[1].update(id=1))

    def test_missing_primitive(self):
        self.corrupt(lambda p: p.pop())

    def test_forbidden_signature(self):
        self.corrupt(lambda p: p[4].update(turns='LLS'))

    def test_first_primitive_not_straight(self):
        def swap(p):
            p[0]['turns'], p[1]['turns'] = p[1]['turns'], p[0]['turns']
        self.corrupt(swap)

    def test_two_primitives_in_one_class(self):
        self.corrupt(lambda p: p[1].update(turns='SSR') or p[7].update(turns='SSL'))

    def test_mixed_lengths(self):
        self.corrupt(lambda p: p[2].update(turns='SLRS'))

    def test_unreadable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.json'
            path.write_text('{not json')
            with self.assertRaises(InvalidCatalog):
                load_catalog(path)
            path.write_text(json.dumps({'name': 'empty'}))
            with self.assertRaises(InvalidCatalog):
                load_catalog(path)
