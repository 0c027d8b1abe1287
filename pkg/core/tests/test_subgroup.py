import math

import numpy as np
from django.test import SimpleTestCase

from core.catalog import builtin
from core.exceptions import CapExceeded, ClassBoundExceeded, UnsupportedOperation
from core.pc_engine import commutator, conjugate, element, generator, group_order, identity, multiply
from core.subgroup import (
    center, contains, elements, full_group, induced_sequence, is_subgroup, lower_central_series,
    nilpotency_class, normal_closure, random_element, same_subgroup, subgroup_order, trivial_subgroup,
)


class InducedSequenceTests(SimpleTestCase):
    def setUp(self):
        self.p = builtin("r_inv").presentation

    def test_two_generator_subgroup(self):
        s = induced_sequence(self.p, [generator(self.p, 12), generator(self.p, 13)])
        self.assertEqual(subgroup_order(self.p, s), 8)
        self.assertTrue(contains(self.p, s, generator(self.p, 11)))
        self.assertFalse(contains(self.p, s, generator(self.p, 14)))

    def test_redundant_generators_do_not_change_the_subgroup(self):
        gens = [generator(self.p, 12), generator(self.p, 13)]
        s = induced_sequence(self.p, gens)
        t = induced_sequence(self.p, gens + [multiply(self.p, gens[0], gens[1]), generator(self.p, 11)])
        self.assertTrue(same_subgroup(self.p, s, t))

    def test_full_and_trivial(self):
        full = full_group(self.p)
        self.assertEqual(subgroup_order(self.p, full), 2 ** 13)
        self.assertEqual(subgroup_order(self.p, trivial_subgroup()), 1)
        self.assertTrue(induced_sequence(self.p, [identity(self.p)]).is_trivial())
        self.assertTrue(is_subgroup(self.p, trivial_subgroup(), full))

    def test_generated_by_the_named_involutions_is_everything(self):
        s = induced_sequence(self.p, builtin("r_inv").generating_set())
        self.assertTrue(same_subgroup(self.p, s, full_group(self.p)))

    def test_infinite_subgroup(self):
        p = builtin("r_free").presentation
        s = induced_sequence(p, [generator(p, 12)])
        self.assertEqual(subgroup_order(p, s), math.inf)

    def test_element_enumeration(self):
        p = builtin("d8").presentation
        elts = elements(p, full_group(p))
        self.assertEqual(len(elts), 8)
        self.assertEqual(len(set(elts)), 8)

    def test_enumeration_cap(self):
        with self.assertRaises(CapExceeded):
            elements(self.p, full_group(self.p), cap=100)


class SeriesTests(SimpleTestCase):
    def test_normal_closure_of_a_reflection_in_d8(self):
        p = builtin("d8").presentation
        reflection = generator(p, 3)
        closure = normal_closure(p, [reflection], ambient=full_group(p).gens)
        self.assertEqual(subgroup_order(p, closure), 4)

    def test_classes(self):
        for key, expected in (("d8", 2), ("d16", 3), ("c2", 1), ("r_inv", 5), ("r_free", 5)):
            with self.subTest(key=key):
                p = builtin(key).presentation
                self.assertEqual(nilpotency_class(p, full_group(p)), expected)

    def test_series_ends_in_trivial_term(self):
        p = builtin("r_inv").presentation
        series = lower_central_series(p, full_group(p))
        self.assertTrue(series[-1].is_trivial())
        for upper, lower in zip(series, series[1:]):
            self.assertTrue(is_subgroup(p, lower, upper))

    def test_class_bound(self):
        p = builtin("r_inv").presentation
        with self.assertRaises(ClassBoundExceeded) as ctx:
            nilpotency_class(p, full_group(p), max_class=3)
        self.assertEqual(ctx.exception.bound, 3)
        self.assertTrue(ctx.exception.last_term)


class CenterTests(SimpleTestCase):
    def test_d8(self):
        p = builtin("d8").presentation
        z = center(p)
        self.assertEqual(subgroup_order(p, z), 2)
        self.assertTrue(contains(p, z, generator(p, 1)))

    def test_r_inv_center_holds_the_bottom_generator(self):
        p = builtin("r_inv").presentation
        z = center(p)
        self.assertTrue(contains(p, z, generator(p, 1)))
        self.assertFalse(contains(p, z, element(p, "g12")))

    def test_infinite_is_unsupported(self):
        with self.assertRaises(UnsupportedOperation):
            center(builtin("r_free").presentation)


class SubgroupPropertyTests(SimpleTestCase):
    KEYS = ("d8", "d16", "complete4", "graph5", "graph4a", "graph4b", "alpha", "r_inv", "gamma")

    def _subgroups(self, p, rng, count=5):
        gens = list(full_group(p).gens)
        for _ in range(count):
            yield [random_element(p, gens, 6, rng) for _ in range(2)]

    def test_lagrange(self):
        rng = np.random.default_rng(0xE9E1)
        for key in self.KEYS:
            p = builtin(key).presentation
            for gens in self._subgroups(p, rng):
                with self.subTest(key=key):
                    self.assertEqual(group_order(p) % subgroup_order(p, induced_sequence(p, gens)), 0)

    def test_induced_sequence_is_idempotent(self):
        rng = np.random.default_rng(1)
        for key in self.KEYS:
            p = builtin(key).presentation
            for gens in self._subgroups(p, rng):
                s = induced_sequence(p, gens)
                again = induced_sequence(p, s.gens)
                with self.subTest(key=key):
                    self.assertEqual(again.leading_positions, s.leading_positions)
                    self.assertTrue(same_subgroup(p, again, s))

    def test_membership_is_sound(self):
        rng = np.random.default_rng(2)
        for key in self.KEYS:
            p = builtin(key).presentation
            ambient = list(full_group(p).gens)
            for gens in self._subgroups(p, rng):
                s = induced_sequence(p, gens)
                with self.subTest(key=key):
                    for g in gens:
                        self.assertTrue(contains(p, s, g))
                    self.assertTrue(contains(p, s, random_element(p, gens, 10, rng)))
                    outsider = random_element(p, ambient, 6, rng)
                    bigger = induced_sequence(p, gens + [outsider])
                    grown = subgroup_order(p, bigger) > subgroup_order(p, s)
                    self.assertEqual(contains(p, s, outsider), not grown)

    def test_normal_closure_is_normal(self):
        rng = np.random.default_rng(3)
        for key in self.KEYS:
            p = builtin(key).presentation
            ambient = list(full_group(p).gens)
            g = random_element(p, ambient, 6, rng)
            closure = normal_closure(p, [g], ambient=ambient)
            with self.subTest(key=key):
                self.assertTrue(contains(p, closure, g))
                for h in closure.gens:
                    for x in ambient:
                        self.assertTrue(contains(p, closure, conjugate(p, h, x)))

    def test_r_inv_center_is_maximal(self):
        p = builtin("r_inv").presentation
        gens = full_group(p).gens
        z = center(p)
        central = [
            g for g in elements(p, full_group(p))
            if all(commutator(p, g, x).is_identity() for x in gens)
        ]
        self.assertEqual(len(central), subgroup_order(p, z))
        self.assertTrue(same_subgroup(p, induced_sequence(p, central), z))
