# core/cli.py
"""
Командная строка: python manage.py sandwichlab <command> ...

Коды выхода: 0 - все проверки прошли, 1 - проверка не прошла,
2 - ошибка использования/конфигурации, 3 - исчерпан fuel или лимит.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

from .catalog import REPLAY_SUITES, builtin, catalog_keys, check_definitions, export, lemma_replay, verify_builtin
from .constructions import (
    build_char2_example, build_unipotent_group, build_V, build_Vstar, build_W, commutator_type, dump_context,
    format_commutator_tree, killed_by_type, matrix_left_engel_check, multi_weight, nonnilpotence_witness,
    parse_commutator_tree, vstar_dim,
)
from .engel import SamplingPolicy, is_left_n_engel, is_right_n_engel, is_sandwich_set, is_strong_sandwich_set
from .exceptions import LieAlgebraError, NotNilpotent, SandwichLabError
from .expressions import evaluate
from .lie_engine import LieAlgebra, check_axioms, is_sandwich_element, lie_center, lie_class, parse_lie_algebra
from .pc_engine import commutator, element, format_element, group_order
from .serializers import RunConfigSerializer
from .services import (
    catalog_report_fields, make_report, order_json, render, replay_fields, verdict_fields,
)
from .subgroup import full_group, nilpotency_class

logger = logging.getLogger(__name__)


class UsageError(SandwichLabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=None)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--max-word-length", type=int, default=None)
    common.add_argument("--fuel", type=int, default=None)
    common.add_argument("--max-class", type=int, default=None)
    common.add_argument("--mode", choices=("sampled", "exhaustive"), default=None)
    return common


def add_subcommands(parser: argparse.ArgumentParser, parser_class: type | None = None) -> None:
    """Объявляет подкоманды на готовом парсере (в том числе на CommandParser Django)."""
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True, metavar="command",
                                parser_class=parser_class or type(parser))

    def add(name: str, *positionals: str, help: str):
        p = sub.add_parser(name, parents=[common], help=help)
        for pos in positionals:
            p.add_argument(pos)
        return p

    add("catalog-list", help="list builtin groups")
    add("verify", "target", help="verify consistency, order, class, graph and sandwich property")
    add("order", "target", help="group order")
    add("class", "target", help="nilpotency class")
    add("collect", "target", "word", help="collect a word to normal form")
    add("commutator", "target", "left", "right", help="commutator of two elements")
    add("sandwich-check", "target", help="sandwich-set check on the named generators")
    add("strong-sandwich-check", "target", help="strong sandwich-set check on the named generators")
    engel = add("engel-check", "target", "element", help="left (or right) n-Engel check")
    engel.add_argument("--n", type=int, required=True)
    engel.add_argument("--right", action="store_true")
    add("lemma-replay", "target", help=f"replay suite: {', '.join(REPLAY_SUITES)} or all")
    add("lie-check", "target", help="Lie algebra file or builtin: V, W, vstar:<n>, char2:<N>")
    vstar = add("vstar", help="truncated V* and the unipotent group G(n)")
    vstar.add_argument("--n", type=int, required=True)
    action = vstar.add_mutually_exclusive_group()
    action.add_argument("--engel", type=int, nargs="?", const=3, default=None)
    action.add_argument("--witness", type=int, default=None)
    action.add_argument("--dump", action="store_true")
    add("type", "target", help="type of a commutator in x and a<i>")
    add("export", "target", help="presentation source of a builtin group")
    add("definitions", "target", help="check generator definitions of a builtin group")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sandwichlab", description="Engel and sandwich-condition verification toolkit")
    add_subcommands(parser)
    return parser


# =================== commands ===================

class _Run:
    """Одна команда: конфигурация, политика выборки и сборка отчёта."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args = args
        self.config = config
        self.target = config["target"]
        self.fuel = config["fuel"]
        self.counterexamples: list[str] = []

    @property
    def policy(self) -> SamplingPolicy:
        return SamplingPolicy.from_settings(
            mode=self.config["mode"], samples=self.config["samples"], seed=self.config["seed"],
            max_word_length=self.config["max_word_length"],
        )

    def report(self, verdict: str, fields: dict) -> dict:
        return make_report(self.config["command"], self.target, self.config["seed"], verdict, fields,
                           self.counterexamples)

    def verdict(self, passed: bool) -> str:
        return "pass" if passed else "fail"

    def from_check(self, check) -> dict:
        if check.counterexample:
            self.counterexamples.append(check.counterexample)
        return self.report(check.verdict, verdict_fields(check))

    # ---- pc groups ----

    def catalog_list(self) -> dict:
        fields = {}
        for key in catalog_keys():
            entry = builtin(key)
            fields[key] = {
                "order": order_json(entry.expected_order.value),
                "class": entry.expected_class.value,
                "generators": list(entry.vertices),
            }
        return self.report("pass", fields)

    def verify(self) -> dict:
        report = verify_builtin(self.target, self.policy, self.fuel, self.config["max_class"])
        self.counterexamples.extend(report.counterexamples)
        return self.report(self.verdict(report.passed), catalog_report_fields(report))

    def order(self) -> dict:
        return self.report("pass", {"order": order_json(group_order(builtin(self.target).presentation))})

    def klass(self) -> dict:
        p = builtin(self.target).presentation
        try:
            value = nilpotency_class(p, full_group(p), max_class=self.config["max_class"], fuel=self.fuel)
        except NotNilpotent as exc:
            return self.report("fail", {"class": None, "error": str(exc)})
        return self.report("pass", {"class": value})

    def collect(self) -> dict:
        p = builtin(self.target).presentation
        return self.report("pass", {"normal_form": format_element(p, element(p, self.args.word, self.fuel))})

    def commutator(self) -> dict:
        entry = builtin(self.target)
        p, names = entry.presentation, entry.named_elements()
        left = evaluate(p, self.args.left, names, self.fuel)
        right = evaluate(p, self.args.right, names, self.fuel)
        return self.report("pass", {"commutator": format_element(p, commutator(p, left, right, self.fuel))})

    def sandwich_check(self) -> dict:
        entry = builtin(self.target)
        return self.from_check(is_sandwich_set(entry.presentation, entry.generating_set(), self.policy, self.fuel))

    def strong_sandwich_check(self) -> dict:
        entry = builtin(self.target)
        return self.from_check(
            is_strong_sandwich_set(entry.presentation, entry.generating_set(), self.policy, self.fuel)
        )

    def engel_check(self) -> dict:
        entry = builtin(self.target)
        p = entry.presentation
        a = evaluate(p, self.args.element, entry.named_elements(), self.fuel)
        check = is_right_n_engel if self.args.right else is_left_n_engel
        return self.from_check(check(p, a, self.args.n, self.policy, fuel=self.fuel))

    def lemma_replay(self) -> dict:
        report = lemma_replay(self.target, self.fuel)
        self._replay_counterexamples(report)
        return self.report(self.verdict(report.passed), {"replay": replay_fields(report)})

    def definitions(self) -> dict:
        report = check_definitions(self.target, self.fuel)
        self._replay_counterexamples(report)
        return self.report(self.verdict(report.passed), {"definitions": replay_fields(report)})

    def _replay_counterexamples(self, report) -> None:
        self.counterexamples.extend(
            f"{r.suite}: {r.expression} = {r.computed}, expected {r.expected}" for r in report.mismatches
        )

    def export(self) -> dict:
        return self.report("pass", {"source": export(self.target)})

    # ---- Lie algebras ----

    def _algebra(self) -> LieAlgebra:
        name = self.target
        if name == "V":
            return build_V()
        if name == "W":
            return build_W()
        kind, _, arg = name.partition(":")
        if kind in ("vstar", "char2") and arg.isdigit():
            return build_Vstar(int(arg)) if kind == "vstar" else build_char2_example(int(arg))
        path = Path(name)
        if not path.is_file():
            raise LieAlgebraError(f"{name!r} is neither a builtin algebra nor a readable file")
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise LieAlgebraError(f"cannot read {name!r}: {exc}") from exc
        return parse_lie_algebra(text, name=path.stem)

    def lie_check(self) -> dict:
        L = self._algebra()
        axioms = check_axioms(L)
        for names, residual in axioms.jacobi_failures:
            self.counterexamples.append(f"Jacobi({', '.join(names)}) = {residual}")
        fields = {
            "characteristic": L.p,
            "dim": L.dim,
            "alternating": axioms.alternating,
            "jacobi_triples": axioms.triples_checked,
            "center_dim": len(lie_center(L)),
        }
        if axioms.passed:
            fields["class"] = lie_class(L)
            fields["sandwich_basis_elements"] = [
                L.basis_names[i] for i in range(L.dim) if is_sandwich_element(L, L.basis(i))
            ]
        return self.report(self.verdict(axioms.passed), fields)

    def vstar(self) -> dict:
        n = self.args.n
        if self.args.dump:
            return self.report("pass", {"dump": dump_context(build_unipotent_group(n))})
        if self.args.engel is not None:
            check = matrix_left_engel_check(build_unipotent_group(n), self.args.engel, self.policy)
            return self.from_check(check)
        if self.args.witness is not None:
            witness = nonnilpotence_witness(build_unipotent_group(n), self.args.witness, self.policy)
            fields = {
                "depth": witness.k,
                "found": witness.found,
                "attempts": witness.attempts,
                "conjugators": [" ".join(w) for w in witness.conjugators],
            }
            return self.report(witness.verdict, fields)
        L = build_Vstar(n)
        axioms = check_axioms(L)
        fields = {"n": n, "dim": L.dim, "expected_dim": vstar_dim(n), "axioms": axioms.passed}
        return self.report(self.verdict(axioms.passed and L.dim == vstar_dim(n)), fields)

    def commutator_type(self) -> dict:
        tree = parse_commutator_tree(self.target)
        m, e = multi_weight(tree)
        fields = {
            "commutator": format_commutator_tree(tree),
            "m": m,
            "e": {f"a{i}": c for i, c in e.items()},
            "type": commutator_type(tree),
            "killed": killed_by_type(tree),
        }
        return self.report("pass", fields)


_DISPATCH: dict[str, Callable[[_Run], dict]] = {
    "catalog-list": _Run.catalog_list,
    "verify": _Run.verify,
    "order": _Run.order,
    "class": _Run.klass,
    "collect": _Run.collect,
    "commutator": _Run.commutator,
    "sandwich-check": _Run.sandwich_check,
    "strong-sandwich-check": _Run.strong_sandwich_check,
    "engel-check": _Run.engel_check,
    "lemma-replay": _Run.lemma_replay,
    "lie-check": _Run.lie_check,
    "vstar": _Run.vstar,
    "type": _Run.commutator_type,
    "export": _Run.export,
    "definitions": _Run.definitions,
}

_EXIT_CODES = {"pass": 0, "sampled-pass": 0, "fail": 1, "precondition-failed": 1, "inconclusive": 3}


def execute(args: argparse.Namespace, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Выполняет уже разобранную подкоманду и возвращает код выхода."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        serializer = RunConfigSerializer(data={
            "command": args.command,
            "target": getattr(args, "target", "") or "",
            "seed": args.seed,
            "samples": args.samples,
            "max_word_length": args.max_word_length,
            "fuel": args.fuel,
            "max_class": args.max_class,
            "mode": args.mode or "sampled",
            "format": args.format or "text",
        })
        if not serializer.is_valid():
            raise UsageError("; ".join(f"{k}: {' '.join(map(str, v))}" for k, v in serializer.errors.items()))
        config = serializer.validated_data
        logger.info("[CLI] %s %s", config["command"], config["target"])
        report = _DISPATCH[config["command"]](_Run(args, config))
    except SandwichLabError as exc:
        logger.debug("[CLI] %s", exc, exc_info=True)
        stderr.write(f"error: {exc}\n")
        return exc.exit_code
    if config["command"] == "export" and config["format"] == "text":
        stdout.write(report["fields"]["source"])
    else:
        stdout.write(render(report, config["format"]))
    return _EXIT_CODES[report["verdict"]]


def run(argv: Sequence[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as exc:
        (stderr or sys.stderr).write(f"error: {exc}\n")
        return exc.exit_code
    return execute(args, stdout, stderr)
