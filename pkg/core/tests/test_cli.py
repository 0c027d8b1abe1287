import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, override_settings

from core.catalog import export
from core.checks import sandwichlab_settings_check
from core.cli import run
from core.management.commands.sandwichlab import Command


def invoke(*argv):
    out, err = StringIO(), StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv, "--format", "json")
    return code, json.loads(out)


class CatalogCommandTests(SimpleTestCase):
    def test_catalog_list(self):
        code, report = invoke_json("catalog-list")
        self.assertEqual(code, 0)
        self.assertEqual(len(report["fields"]), 12)
        self.assertEqual(report["fields"]["r_free"]["order"], "infinite")
        self.assertEqual(report["fields"]["beta"]["generators"], ["x", "a", "b", "c"])

    def test_order_json(self):
        code, report = invoke_json("order", "r_inv")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["order"], {"base": 2, "exp": 13})
        self.assertEqual(report["tool_version"], "1.0.0")
        self.assertEqual(report["seed"], 0xE9E1)
        self.assertEqual(report["verdict"], "pass")
        self.assertEqual(report["counterexamples"], [])

    def test_order_text(self):
        code, out, _ = invoke("order", "r_inv")
        self.assertEqual(code, 0)
        self.assertIn("order: 2^13", out)
        self.assertEqual(invoke_json("order", "r_free")[1]["fields"]["order"], "infinite")

    def test_class(self):
        code, out, _ = invoke("class", "r_inv")
        self.assertEqual(code, 0)
        self.assertIn("class: 5", out)

    def test_class_bound_exit_code(self):
        code, _, err = invoke("class", "r_inv", "--max-class", "3")
        self.assertEqual(code, 3)
        self.assertTrue(err.startswith("error:"))

    def test_collect(self):
        code, out, _ = invoke("collect", "r_inv", "g12 g14")
        self.assertEqual(code, 0)
        self.assertIn("normal_form: g14 g12 g9", out)

    def test_collect_out_of_fuel(self):
        code, _, err = invoke("collect", "r_inv", "g12 g14 g13 g12 g14", "--fuel", "2")
        self.assertEqual(code, 3)
        self.assertIn("fuel exhausted", err)

    def test_commutator(self):
        code, out, _ = invoke("commutator", "r_inv", "x", "y")
        self.assertEqual(code, 0)
        self.assertIn("commutator: g11", out)

    def test_verify(self):
        code, report = invoke_json("verify", "d16", "--samples", "50")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["order"]["computed"], {"base": 2, "exp": 4})
        self.assertEqual(report["fields"]["sandwich"]["computed"], "fail")
        self.assertTrue(report["counterexamples"])

    def test_export(self):
        code, out, _ = invoke("export", "gamma")
        self.assertEqual(code, 0)
        self.assertEqual(out, export("gamma"))

    def test_lemma_replay(self):
        code, out, _ = invoke("lemma-replay", "r_inv")
        self.assertEqual(code, 0)
        self.assertIn("  [ok] [g12,g13] = g11 (expected g11)", out)
        self.assertNotIn("MISMATCH", out)

    def test_definitions(self):
        code, report = invoke_json("definitions", "r_inv")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["definitions"]["items"], 13)


class CheckCommandTests(SimpleTestCase):
    def test_sandwich_failure(self):
        code, out, _ = invoke("sandwich-check", "d16", "--samples", "20")
        self.assertEqual(code, 1)
        self.assertIn("verdict: fail", out)
        self.assertIn("counterexample: a = ", out)

    def test_sandwich_pass(self):
        code, report = invoke_json("sandwich-check", "r_inv", "--samples", "100")
        self.assertEqual(code, 0)
        self.assertEqual(report["verdict"], "sampled-pass")
        self.assertEqual(report["fields"]["samples"], 100)

    def test_strong_sandwich_failure(self):
        code, _, _ = invoke("strong-sandwich-check", "r_inv", "--samples", "100")
        self.assertEqual(code, 1)

    def test_engel(self):
        self.assertEqual(invoke("engel-check", "d16", "s", "--n", "2", "--mode", "exhaustive")[0], 1)
        code, report = invoke_json("engel-check", "d16", "s", "--n", "3", "--mode", "exhaustive")
        self.assertEqual(code, 0)
        self.assertEqual(report["verdict"], "pass")
        self.assertEqual(report["fields"]["check"], "left-3-engel")
        code, report = invoke_json("engel-check", "d8", "x", "--n", "2", "--right", "--mode", "exhaustive")
        self.assertEqual(report["fields"]["check"], "right-2-engel")

    def test_seed_fixes_the_output(self):
        argv = ("sandwich-check", "r_inv", "--samples", "30", "--seed", "0x2a", "--format", "json")
        first, second = invoke(*argv), invoke(*argv)
        self.assertEqual(first, second)
        self.assertEqual(json.loads(first[1])["seed"], 42)

    def test_type(self):
        code, report = invoke_json("type", "[x, a1, a2]")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["type"], 0)
        self.assertEqual(report["fields"]["m"], 1)
        self.assertEqual(report["fields"]["e"], {"a1": 1, "a2": 1})
        self.assertFalse(report["fields"]["killed"])


class LieCommandTests(SimpleTestCase):
    def test_lie_check_V(self):
        code, out, _ = invoke("lie-check", "V")
        self.assertEqual(code, 0)
        self.assertIn("center_dim: 0", out)
        self.assertIn("class: -", out)

    def test_lie_check_char2(self):
        code, report = invoke_json("lie-check", "char2:2")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["dim"], 9)
        self.assertEqual(report["fields"]["class"], 6)

    def test_lie_check_file(self):
        source = "characteristic 2\ndim 4\nbasis x u v w\n1 2 : 2\n1 4 : 2\n2 3 : 2\n2 4 : 3\n3 4 : 4\nend\n"
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.lie"
            path.write_text(source, encoding="utf-8")
            code, out, _ = invoke("lie-check", str(path))
        self.assertEqual(code, 1)
        self.assertIn("counterexample: Jacobi(x, u, w) = v", out)

    def test_lie_check_missing(self):
        code, _, err = invoke("lie-check", "no/such/file.lie")
        self.assertEqual(code, 2)
        self.assertIn("neither a builtin", err)

    def test_lie_check_undecodable_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "latin.lie"
            path.write_bytes(b"characteristic 2\ndim 1\nbasis \xff\xfe\nend\n")
            code, out, err = invoke("lie-check", str(path))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("cannot read", err)

    def test_vstar(self):
        code, report = invoke_json("vstar", "--n", "2")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["dim"], 10)

    def test_vstar_witness(self):
        code, out, _ = invoke("vstar", "--n", "2", "--witness", "2")
        self.assertEqual(code, 0)
        self.assertIn("found: yes", out)

    def test_vstar_engel(self):
        code, report = invoke_json("vstar", "--n", "2", "--engel", "--samples", "50")
        self.assertEqual(code, 0)
        self.assertEqual(report["fields"]["check"], "matrix-left-engel")
        self.assertEqual(report["fields"]["details"]["n_engel"], 3)

    def test_vstar_dump(self):
        code, out, _ = invoke("vstar", "--n", "1", "--dump")
        self.assertEqual(code, 0)
        self.assertIn("generator a", out)


class UsageTests(SimpleTestCase):
    def test_unknown_key(self):
        code, out, err = invoke("verify", "r_missing")
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("unknown catalog key", err)

    def test_bad_arguments(self):
        self.assertEqual(invoke("bogus")[0], 2)
        self.assertEqual(invoke("order")[0], 2)
        self.assertEqual(invoke("engel-check", "d8", "x")[0], 2)
        self.assertEqual(invoke("order", "d8", "--format", "yaml")[0], 2)

    def test_samples_must_be_positive(self):
        code, _, err = invoke("sandwich-check", "d16", "--samples", "0")
        self.assertEqual(code, 2)
        self.assertIn("samples", err)

    def test_bad_expression(self):
        self.assertEqual(invoke("commutator", "r_inv", "[x", "y")[0], 2)


class ManagementCommandTests(SimpleTestCase):
    def test_call_command(self):
        out = StringIO()
        call_command("sandwichlab", "order", "d8", stdout=out)
        self.assertIn("order: 2^3", out.getvalue())

    def test_failure_raises(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("sandwichlab", "sandwich-check", "d16", stdout=StringIO(), stderr=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)

    def test_subcommands_are_declared_on_the_command_parser(self):
        parser = Command().create_parser("manage.py", "sandwichlab")
        options = parser.parse_args(["engel-check", "d8", "x", "--n", "3", "--seed", "0x10"])
        self.assertEqual(options.command, "engel-check")
        self.assertEqual(options.n, 3)
        self.assertEqual(options.seed, 16)

    def test_subcommand_options(self):
        out = StringIO()
        call_command("sandwichlab", "order", "r_inv", "--format", "json", stdout=out)
        self.assertEqual(json.loads(out.getvalue())["fields"]["order"], {"base": 2, "exp": 13})

    def test_usage_error_returncode(self):
        with self.assertRaises(CommandError) as ctx:
            call_command("sandwichlab", "engel-check", "d8", "x", stdout=StringIO(), stderr=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)


class SettingsCheckTests(SimpleTestCase):
    def test_defaults_are_valid(self):
        self.assertEqual(sandwichlab_settings_check(None), [])

    @override_settings(SANDWICHLAB={**settings.SANDWICHLAB, "FUEL": 0, "SUBSET_CAP": -1})
    def test_bad_values(self):
        ids = [e.id for e in sandwichlab_settings_check(None)]
        self.assertEqual(ids, ["core.E001", "core.E003"])
