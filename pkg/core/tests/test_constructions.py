import itertools

import numpy as np
from django.test import SimpleTestCase, override_settings
from django.conf import settings

from core.constructions import (
    X, Leaf, Node, SubsetIndex, build_char2_example, build_enveloping_basis, build_unipotent_group, build_V,
    build_Vstar, build_W, commutator_type, dump_context, format_commutator_tree, killed_by_type,
    left_normed_tree, matrix_commutator, matrix_left_engel_check, multi_weight, nonnilpotence_witness,
    parse_commutator_tree, random_commutator_tree, subalgebra_class, subalgebra_class_bound, verify_simple_ideal,
    vstar_dim,
)
from core.engel import SamplingPolicy
from core.exceptions import CapExceeded, ExpressionSyntaxError, LieAlgebraError, PolicyError, PreconditionViolation
from core.lie_engine import bracket, check_axioms, left_normed, lie_center


class Char2ExampleTests(SimpleTestCase):
    def test_layout(self):
        L = build_char2_example(3)
        self.assertEqual(L.dim, 2 * 3 + 5)
        self.assertEqual(L.basis_names[:4], ("a", "b", "y", "u_0"))
        self.assertEqual(L.basis_names[-1], "v_4")
        self.assertEqual(L.p, 2)

    def test_products(self):
        L = build_char2_example(3)
        e = L.basis
        self.assertEqual(bracket(L, e("a"), e("b")), e("y"))
        self.assertEqual(bracket(L, e("u_1"), e("a")), e("v_2"))
        self.assertEqual(bracket(L, e("u_1"), e("y")), e("u_2"))
        self.assertEqual(bracket(L, e("v_2"), e("b")), e("u_2"))
        self.assertEqual(bracket(L, e("v_2"), e("y")), e("v_3"))
        # индекс выше N отбрасывается
        self.assertTrue(bracket(L, e("u_3"), e("y")).is_zero())

    def test_bounds(self):
        with self.assertRaises(PreconditionViolation):
            build_char2_example(0)
        with self.assertRaises(CapExceeded):
            build_char2_example(settings.SANDWICHLAB["CHAR2_CAP"] + 1)


class AlgebraVTests(SimpleTestCase):
    def test_V_and_W(self):
        self.assertTrue(check_axioms(build_V()).passed)
        self.assertTrue(check_axioms(build_W()).passed)
        self.assertEqual(len(lie_center(build_V())), 0)

    def test_enveloping_basis(self):
        basis = build_enveloping_basis()
        self.assertEqual(len(basis.elements), 12)
        self.assertEqual(basis.rank, 12)
        self.assertEqual(basis.closure_dim, 12)
        self.assertTrue(basis.is_basis)

    def test_W_is_a_simple_ideal(self):
        V = build_V()
        report = verify_simple_ideal(V, [V.basis(n).coeffs for n in ("u", "v", "w")])
        self.assertTrue(report.passed)
        self.assertEqual(report.subspaces_checked, 16)

    def test_whole_algebra_is_not_simple(self):
        V = build_V()
        report = verify_simple_ideal(V, np.eye(4, dtype=np.int64))
        self.assertTrue(report.is_ideal)
        self.assertFalse(report)
        self.assertIsNotNone(report.proper_subideal)

    def test_non_ideal(self):
        V = build_V()
        self.assertFalse(verify_simple_ideal(V, [V.basis("x").coeffs]).is_ideal)

    @override_settings(SANDWICHLAB={**settings.SANDWICHLAB, "SUBSPACE_CAP": 4})
    def test_subspace_cap(self):
        V = build_V()
        with self.assertRaises(CapExceeded):
            verify_simple_ideal(V, [V.basis(n).coeffs for n in ("u", "v", "w")])


class VstarTests(SimpleTestCase):
    def test_dimensions(self):
        for n, dim in ((1, 4), (2, 10), (3, 22), (4, 46)):
            with self.subTest(n=n):
                self.assertEqual(vstar_dim(n), dim)
                self.assertEqual(build_Vstar(n).dim, dim)

    def test_subset_index(self):
        idx = SubsetIndex.of(3, "u", [1, 2])
        self.assertEqual(idx.name, "u_{1,2}")
        self.assertEqual(idx.subset, (1, 2))
        self.assertEqual(idx.position, 1 + 3 * 2)
        with self.assertRaises(LieAlgebraError):
            SubsetIndex.of(2, "u", [3])
        with self.assertRaises(LieAlgebraError):
            SubsetIndex(2, 1, "x")

    def test_products(self):
        L = build_Vstar(2)
        e = L.basis
        self.assertEqual(bracket(L, e("u_{1}"), e("v_{2}")), e("u_{1,2}"))
        self.assertEqual(bracket(L, e("v_{1}"), e("w_{2}")), e("w_{1,2}"))
        self.assertEqual(bracket(L, e("w_{2}"), e("u_{1}")), e("v_{1,2}"))
        self.assertEqual(bracket(L, e("w_{1,2}"), e("x")), e("u_{1,2}"))
        self.assertTrue(bracket(L, e("u_{1}"), e("v_{1}")).is_zero())
        self.assertTrue(bracket(L, e("u_{1}"), e("x")).is_zero())

    def test_axioms(self):
        self.assertTrue(check_axioms(build_Vstar(3)).passed)

    def test_x_squares_to_zero(self):
        for n in (1, 2, 3):
            L = build_Vstar(n)
            x = L.basis("x")
            with self.subTest(n=n):
                for name in L.basis_names:
                    self.assertTrue(left_normed(L, [L.basis(name), x, x]).is_zero(), name)

    def test_subalgebra_classes(self):
        L = build_Vstar(3)
        self.assertEqual(subalgebra_class(L, ["x", "u_{1}", "v_{2}"]), (2, 4))
        self.assertEqual(subalgebra_class(L, ["x", "w_{1}", "v_{2}"]), (3, 4))
        self.assertEqual(subalgebra_class_bound(["x", "u_{1}", "v_{2}", "w_{3}"]), 6)
        klass, bound = subalgebra_class(L, ["x", "u_{1}", "v_{2}", "w_{3}"])
        self.assertLessEqual(klass, bound)

    def test_subset_cap(self):
        with self.assertRaises(CapExceeded):
            build_Vstar(settings.SANDWICHLAB["SUBSET_CAP"] + 1)
        with self.assertRaises(PreconditionViolation):
            build_Vstar(0)


class UnipotentGroupTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.ctx = build_unipotent_group(2)

    def test_generators_are_involutions(self):
        self.assertEqual(len(self.ctx.names), vstar_dim(2))
        self.assertEqual(self.ctx.names[0], "a")
        self.assertFalse(self.ctx.a.is_identity())
        for m in self.ctx.matrices:
            self.assertTrue((m * m).is_identity())

    def test_words_and_families(self):
        self.assertEqual(len(self.ctx.family("u")), 3)
        self.assertTrue(self.ctx.word(["a", "a"]).is_identity())
        self.assertTrue(self.ctx.word([]).is_identity())
        with self.assertRaises(LieAlgebraError):
            self.ctx.generator("x")

    def test_families_are_elementary_abelian(self):
        for ctx in (self.ctx, build_unipotent_group(3)):
            for letter in ("u", "v", "w"):
                family = ctx.family(letter)
                with self.subTest(n=ctx.n, family=letter):
                    self.assertEqual(len(family), 2 ** ctx.n - 1)
                    for g, h in itertools.combinations(family, 2):
                        self.assertEqual(g * h, h * g)

    def test_matrix_commutator(self):
        a = self.ctx.a
        self.assertTrue(matrix_commutator(a, a).is_identity())
        self.assertTrue(matrix_commutator(a, self.ctx.identity).is_identity())

    def test_left_engel(self):
        pol = SamplingPolicy(samples=500, max_word_length=8)
        passed = matrix_left_engel_check(self.ctx, 3, pol)
        self.assertEqual(passed.verdict, "sampled-pass")
        self.assertEqual(passed.samples, 500)
        report = matrix_left_engel_check(self.ctx, 1, pol)
        self.assertEqual(report.verdict, "fail")
        self.assertGreater(report.samples, 1)

    def test_left_engel_is_sampled_only(self):
        with self.assertRaises(PolicyError):
            matrix_left_engel_check(self.ctx, 3, SamplingPolicy(mode="exhaustive"))
        with self.assertRaises(PreconditionViolation):
            matrix_left_engel_check(self.ctx, 0, SamplingPolicy())

    def test_witnesses(self):
        pol = SamplingPolicy()
        first = nonnilpotence_witness(self.ctx, 1, pol)
        self.assertTrue(first.found)
        self.assertEqual(first.attempts, 1)
        report = nonnilpotence_witness(self.ctx, 2, pol)
        self.assertEqual(report.verdict, "pass")
        self.assertEqual(len(report.conjugators), 2)
        for word in report.conjugators:
            self.assertLessEqual(len(word), 4)

    def test_witness_is_reproducible(self):
        pol = SamplingPolicy(seed=17)
        self.assertEqual(nonnilpotence_witness(self.ctx, 2, pol).conjugators,
                         nonnilpotence_witness(self.ctx, 2, pol).conjugators)

    def test_deeper_witness(self):
        report = nonnilpotence_witness(build_unipotent_group(3), 3, SamplingPolicy())
        self.assertTrue(report.found)

    def test_dump(self):
        text = dump_context(self.ctx)
        self.assertTrue(text.startswith("characteristic 2\ndim 10\n"))
        self.assertIn("generator a\n", text)
        self.assertIn("generator w_{1,2}\n", text)


class CommutatorTypeTests(SimpleTestCase):
    def test_parse_and_format(self):
        tree = parse_commutator_tree("[x, a1, [a2, a_3]]")
        self.assertEqual(tree, Node(Node(X, Leaf(1)), Node(Leaf(2), Leaf(3))))
        self.assertEqual(format_commutator_tree(tree), "[x,a1,[a2,a3]]")
        self.assertEqual(parse_commutator_tree("x"), X)

    def test_parse_errors(self):
        for text in ("[x, b1]", "x a1", "[x, a0]", "[x,"):
            with self.subTest(text=text), self.assertRaises(ExpressionSyntaxError):
                parse_commutator_tree(text)

    def test_types(self):
        self.assertEqual(commutator_type(X), -2)
        self.assertEqual(commutator_type(parse_commutator_tree("[x, a1]")), -1)
        self.assertEqual(commutator_type(parse_commutator_tree("[x, a1, a2]")), 0)
        self.assertEqual(commutator_type(parse_commutator_tree("[x, [x, a1], a2, a2]")), -1)
        self.assertEqual(multi_weight(parse_commutator_tree("[x, a1, a1, a3]")), (1, {1: 2, 3: 1}))

    def test_killed_by_type(self):
        self.assertFalse(killed_by_type(X))
        self.assertFalse(killed_by_type(parse_commutator_tree("[x, a1]")))
        self.assertTrue(killed_by_type(parse_commutator_tree("[x, [x, a1]]")))
        self.assertTrue(killed_by_type(parse_commutator_tree("[x, a1, a2, a3, a4]")))

    def test_type_is_additive(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            leaves = int(rng.integers(2, 13))
            tree = random_commutator_tree(rng, leaves)
            self.assertIsInstance(tree, Node)
            self.assertEqual(commutator_type(tree), commutator_type(tree.left) + commutator_type(tree.right))
            m, e = multi_weight(tree)
            self.assertEqual(m + sum(e.values()), leaves)

    def test_killed_by_type_up_to_weight_six(self):
        alphabet = (X, Leaf(1), Leaf(2), Leaf(3))
        checked = 0
        for weight in range(1, 7):
            for items in itertools.product(alphabet, repeat=weight):
                tree = left_normed_tree(list(items))
                m = sum(1 for leaf in items if leaf == X)
                self.assertEqual(commutator_type(tree), weight - 3 * m)
                expected = tree != X and abs(weight - 3 * m) >= 2
                self.assertEqual(killed_by_type(tree), expected, format_commutator_tree(tree))
                checked += 1
        self.assertEqual(checked, sum(4 ** k for k in range(1, 7)))

    def test_left_normed_tree(self):
        self.assertEqual(left_normed_tree([X, Leaf(1), Leaf(2)]), Node(Node(X, Leaf(1)), Leaf(2)))
        with self.assertRaises(ExpressionSyntaxError):
            left_normed_tree([])
