from django.test import SimpleTestCase

from core.catalog import builtin
from core.exceptions import ExpressionSyntaxError
from core.expressions import (
    Commutator, Conjugate, Name, Power, Product, evaluate, format_expression, parse_expression,
)
from core.pc_engine import format_element, generator


class ParseExpressionTests(SimpleTestCase):
    def test_commutator(self):
        self.assertEqual(parse_expression("[x, y, z]"), Commutator((Name("x"), Name("y"), Name("z"))))

    def test_precedence(self):
        expr = parse_expression("x y^2 z^a")
        self.assertEqual(expr, Product((Name("x"), Power(Name("y"), 2), Conjugate(Name("z"), Name("a")))))

    def test_parenthesised_conjugator(self):
        expr = parse_expression("x^(a b)")
        self.assertEqual(expr, Conjugate(Name("x"), Product((Name("a"), Name("b")))))
        self.assertEqual(format_expression(expr), "x^(a b)")

    def test_nested_format(self):
        self.assertEqual(format_expression(parse_expression("[x,[y,a],b]^-1")), "[x,[y,a],b]^-1")

    def test_errors(self):
        for text in ("[x]", "x,", "[x, y", "x $ y", "", "x^"):
            with self.subTest(text=text), self.assertRaises(ExpressionSyntaxError):
                parse_expression(text)


class EvaluateTests(SimpleTestCase):
    def setUp(self):
        self.entry = builtin("r_inv")
        self.p = self.entry.presentation
        self.names = self.entry.named_elements()

    def value(self, text):
        return format_element(self.p, evaluate(self.p, text, self.names))

    def test_named_commutators(self):
        self.assertEqual(self.value("[x, y]"), "g11")
        self.assertEqual(self.value("[[x, y], z, z]"), "g2")
        self.assertEqual(self.value("[x, y, x, y, x, y]"), self.value("[[x,y],x,y,x,y]"))

    def test_conjugation_and_powers(self):
        self.assertEqual(self.value("x^y"), "g12 g11")
        self.assertEqual(self.value("g7^2"), "g1")
        self.assertEqual(self.value("x x"), "id")
        self.assertEqual(self.value("id"), "id")

    def test_generator_labels_follow_numbering(self):
        self.assertEqual(evaluate(self.p, "g14"), generator(self.p, 14))

    def test_unknown_name(self):
        with self.assertRaises(ExpressionSyntaxError):
            evaluate(self.p, "[x, w]", self.names)
