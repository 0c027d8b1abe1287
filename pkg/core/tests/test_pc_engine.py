import dataclasses
import math

import numpy as np
from django.test import SimpleTestCase

from core.catalog import builtin, catalog_keys
from core.exceptions import FuelExhausted, PresentationError, PresentationSyntaxError
from core.pc_engine import (
    PcWord, check_consistency, collect, commutator, conjugate, element, element_order, format_element,
    generator, group_order, identity, invert, left_normed_commutator, multiply, parse_presentation,
    power, rewrite_collect, serialize_presentation,
)
from core.subgroup import full_group, random_element

C2_SOURCE = "pcgroup c2\nngens 1\norders 2\nend\n"


def _random_elements(p, count, seed=7, length=8):
    rng = np.random.default_rng(seed)
    gens = list(full_group(p).gens)
    return [random_element(p, gens, length, rng) for _ in range(count)]


class ParsePresentationTests(SimpleTestCase):
    def test_c2(self):
        p = parse_presentation(C2_SOURCE)
        self.assertEqual(p.n, 1)
        self.assertEqual(p.rel_orders, (2,))
        self.assertEqual(group_order(p), 2)

    def test_round_trip_is_canonical(self):
        for key in ("r_inv", "gamma", "graph4b", "c2"):
            text = serialize_presentation(builtin(key).presentation)
            self.assertEqual(serialize_presentation(parse_presentation(text)), text)

    def test_gamma_has_twenty_involutions(self):
        p = builtin("gamma").presentation
        self.assertEqual(p.n, 20)
        self.assertEqual(set(p.rel_orders), {2})
        self.assertIn("conj 15 18 := g15 g12", serialize_presentation(p))

    def test_r_inv_keeps_source_numbering(self):
        text = serialize_presentation(builtin("r_inv").presentation)
        self.assertIn("numbering 1 2 4 5 6 7 8 9 10 11 12 13 14", text)

    def test_rhs_index_rule(self):
        source = "pcgroup bad\nngens 5\norders 2 2 2 2 2\nconj 2 4 := g5\nend\n"
        with self.assertRaises(PresentationError):
            parse_presentation(source)

    def test_conjugated_generator_must_precede(self):
        source = "pcgroup bad\nngens 5\norders 2 2 2 2 2\nconj 4 2 := g1\nend\n"
        with self.assertRaises(PresentationError):
            parse_presentation(source)

    def test_syntax_error_position(self):
        with self.assertRaises(PresentationSyntaxError) as ctx:
            parse_presentation("pcgroup c2\nngens 1\norders two\nend\n")
        self.assertEqual(ctx.exception.line, 3)
        self.assertEqual(ctx.exception.column, 8)

    def test_missing_end(self):
        with self.assertRaises(PresentationSyntaxError):
            parse_presentation("pcgroup c2\nngens 1\norders 2\n")


class CollectionTests(SimpleTestCase):
    def setUp(self):
        self.r_inv = builtin("r_inv").presentation

    def test_out_of_order_word(self):
        # x12 x14 = x14 x12^x14 = x14 x12 x9
        self.assertEqual(format_element(self.r_inv, element(self.r_inv, "g12 g14")), "g14 g12 g9")

    def test_normal_form_is_fixed(self):
        self.assertEqual(format_element(self.r_inv, element(self.r_inv, "g14 g12")), "g14 g12")

    def test_empty_word(self):
        self.assertTrue(collect(self.r_inv, PcWord()).is_identity())

    def test_strategies_agree(self):
        rng = np.random.default_rng(11)
        for key in catalog_keys():
            p = builtin(key).presentation
            for n in range(200):
                letters = [(int(g), int(e)) for g, e in zip(rng.integers(0, p.n, 8), rng.integers(-2, 3, 8))]
                with self.subTest(key=key, word=n):
                    stack = collect(p, letters)
                    self.assertEqual(rewrite_collect(p, letters, "leftmost"), stack)
                    self.assertEqual(rewrite_collect(p, letters, "rightmost"), stack)

    def test_fuel_exhaustion_reports_partial_word(self):
        with self.assertRaises(FuelExhausted) as ctx:
            element(self.r_inv, "g12 g14 g13 g12 g14", fuel=2)
        self.assertIn("|", ctx.exception.partial)


class ArithmeticTests(SimpleTestCase):
    def setUp(self):
        self.p = builtin("r_inv").presentation
        self.x = {label: generator(self.p, label) for label in (1, 7, 11, 12, 13, 14)}

    def test_identity_is_neutral(self):
        g = self.x[12]
        self.assertEqual(multiply(self.p, identity(self.p), g), g)

    def test_involution(self):
        self.assertTrue(multiply(self.p, self.x[12], self.x[12]).is_identity())

    def test_power_relation(self):
        self.assertEqual(power(self.p, self.x[7], 2), self.x[1])
        self.assertTrue(invert(self.p, identity(self.p)).is_identity())

    def test_commutators(self):
        self.assertEqual(commutator(self.p, self.x[12], self.x[13]), generator(self.p, 11))
        self.assertTrue(commutator(self.p, self.x[12], identity(self.p)).is_identity())
        self.assertEqual(left_normed_commutator(self.p, [self.x[11], self.x[14], self.x[14]]), generator(self.p, 2))

    def test_left_normed_needs_two_entries(self):
        with self.assertRaises(ValueError):
            left_normed_commutator(self.p, [self.x[12]])

    def test_group_laws(self):
        for key in ("r_inv", "r_free", "gamma"):
            p = builtin(key).presentation
            elts = _random_elements(p, 90, seed=3)
            for a, b, c in zip(elts[0::3], elts[1::3], elts[2::3]):
                self.assertEqual(multiply(p, multiply(p, a, b), c), multiply(p, a, multiply(p, b, c)))
                self.assertTrue(multiply(p, a, invert(p, a)).is_identity())
                self.assertEqual(power(p, a, -1), invert(p, a))
                self.assertEqual(
                    conjugate(p, multiply(p, a, b), c),
                    multiply(p, conjugate(p, a, c), conjugate(p, b, c)),
                )
                self.assertEqual(commutator(p, a, b), invert(p, commutator(p, b, a)))

    def test_power_matches_repeated_multiplication(self):
        for a in _random_elements(self.p, 20, seed=5):
            acc = identity(self.p)
            for k in range(6):
                self.assertEqual(power(self.p, a, k), acc)
                acc = multiply(self.p, acc, a)


class OrderTests(SimpleTestCase):
    def test_group_orders(self):
        self.assertEqual(group_order(builtin("r_inv").presentation), 2 ** 13)
        self.assertEqual(group_order(builtin("r_free").presentation), math.inf)
        self.assertEqual(builtin("r_free").presentation.hirsch_length, 8)

    def test_element_orders(self):
        p = builtin("r_inv").presentation
        self.assertEqual(element_order(p, generator(p, 7)), 4)
        self.assertEqual(element_order(p, identity(p)), 1)
        d16 = builtin("d16").presentation
        self.assertEqual(element_order(d16, generator(d16, 3)), 8)
        r_free = builtin("r_free").presentation
        self.assertEqual(element_order(r_free, generator(r_free, 12)), math.inf)


class ConsistencyTests(SimpleTestCase):
    def test_small_entries_are_consistent(self):
        for key in ("c2", "d8", "d16", "complete4", "graph4b", "r_inv", "r_free", "gamma"):
            with self.subTest(key=key):
                self.assertTrue(check_consistency(builtin(key).presentation).consistent)

    def test_power_conflicting_with_conjugation_fails(self):
        # g2^2 = g1 forces g2 to centralize g1, the conjugate relation inverts it
        source = "pcgroup bad\nngens 2\norders 3 2\npow 2 := g1\nconj 1 2 := g1^2\nend\n"
        report = check_consistency(parse_presentation(source))
        self.assertFalse(report.consistent)
        failure = report.failures[0]
        self.assertNotEqual(failure.left, failure.right)
        self.assertEqual(failure.kind, "power-self")

    def test_dropping_any_gamma_relation_is_detected(self):
        p = builtin("gamma").presentation
        self.assertEqual(len(p.conj_rhs), 40)
        for key in p.conj_rhs:
            conj = {k: w for k, w in p.conj_rhs.items() if k != key}
            with self.subTest(relation=(p.labels[key[0]], p.labels[key[1]])):
                self.assertFalse(check_consistency(dataclasses.replace(p, conj_rhs=conj)).consistent)
