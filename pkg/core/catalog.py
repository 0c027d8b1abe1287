# core/catalog.py
"""
Встроенные группы: pc-презентации (core/presentations/*.pc), ожидаемые
порядок/класс/граф коммутирования с пометкой происхождения, определения
генераторов через коммутаторы и набор replay-проверок тождеств.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from .engel import CommutativityGraph, SamplingPolicy, commutativity_graph, is_sandwich_set
from .exceptions import SandwichLabError, UnknownCatalogKey
from .expressions import evaluate
from .pc_engine import (
    PcElement, PcPresentation, PcWord,
    check_consistency, conjugate, format_element, group_order, identity, multiply, parse_presentation,
    power, serialize_presentation,
)
from .subgroup import full_group, nilpotency_class

logger = logging.getLogger(__name__)

PRESENTATIONS_DIR = Path(__file__).resolve().parent / "presentations"

PAPER = "PAPER"
DERIVED = "DERIVED"
TRIVIAL = "TRIVIAL"


@dataclass(frozen=True)
class Expected:
    value: Any
    provenance: str


@dataclass(frozen=True)
class ReplayItem:
    expression: str
    expected: str
    provenance: str = PAPER


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    presentation: PcPresentation
    names: Mapping[str, str]
    vertices: tuple[str, ...]
    expected_order: Expected
    expected_class: Expected
    expected_graph: CommutativityGraph | None = None
    expected_sandwich: bool = True
    replay_items: tuple[ReplayItem, ...] = ()
    definitions: tuple[tuple[int, str], ...] = ()

    def named_elements(self) -> dict[str, PcElement]:
        return {name: evaluate(self.presentation, expr) for name, expr in self.names.items()}

    def generating_set(self) -> list[PcElement]:
        named = self.named_elements()
        return [named[v] for v in self.vertices]


# =================== presentations ===================

def load_presentation(key: str) -> PcPresentation:
    path = PRESENTATIONS_DIR / f"{key}.pc"
    if not path.is_file():
        raise UnknownCatalogKey(f"no shipped presentation {key!r}")
    return parse_presentation(path.read_text(encoding="utf-8"))


def direct_product(p: PcPresentation, q: PcPresentation, name: str | None = None) -> PcPresentation:
    """Блочная презентация: сначала генераторы p, потом q (метки q сдвинуты)."""
    shift = p.n
    label_shift = max(p.labels, default=0)

    def moved(w: PcWord) -> PcWord:
        return PcWord(tuple((g + shift, e) for g, e in w))

    power_rhs = dict(p.power_rhs)
    power_rhs.update({i + shift: moved(w) for i, w in q.power_rhs.items()})
    conj_rhs = dict(p.conj_rhs)
    conj_rhs.update({(j + shift, i + shift): moved(w) for (j, i), w in q.conj_rhs.items()})
    return PcPresentation(
        name=name or f"{p.name}_x_{q.name}",
        rel_orders=p.rel_orders + q.rel_orders,
        power_rhs=power_rhs,
        conj_rhs=conj_rhs,
        labels=p.labels + tuple(label + label_shift for label in q.labels),
    )


def _graph(vertices: Sequence[str], *edges: str) -> CommutativityGraph:
    return CommutativityGraph.from_edges(vertices, [tuple(e.split("-")) for e in edges])


# =================== definitions & replay data ===================

_R_INV_DEFINITIONS = (
    (1, "[z,x,y,y]"), (2, "[x,y,z,z]"), (4, "[z,x,[z,y]]"), (5, "[x,y,[x,z]]"), (6, "[y,z,[y,x]]"),
    (7, "[z,x,y]"), (8, "[z,y,x]"), (9, "[z,x]"), (10, "[z,y]"), (11, "[x,y]"),
    (12, "x"), (13, "y"), (14, "z"),
)

# в r_free определения x4..x6 зависят от выбора знаков, их не проверяем
_R_FREE_DEFINITIONS = tuple(d for d in _R_INV_DEFINITIONS if d[0] not in (4, 5, 6))

_BETA_DEFINITIONS = (
    (1, "[[[x^c,x^a],[x^a,x^b]],b]"),
    (2, "[[x^c,x^a],[x^a,x^b]]"),
    (3, "[[x^a,x^b],[x^b,x^c]]"),
    (4, "[x,x^(c a),x^b]"),
    (5, "[x,x^(c a),x^b]^a"),
    (6, "[x,x^(b c),x^a]"),
    (7, "[x,x^(b c),x^a]^b"),
    (8, "[x,x^(b c),x^a]^c"),
    (9, "[x,x^(a b)] [x^c,x^(a b c)]"),
    (10, "[x,x^(a b)]"),
    (11, "[x,x^(b c)] [x^a,x^(a b c)]"),
    (12, "[x,x^(b c)]"),
    (13, "[x,x^(a c)] [x^b,x^(a b c)]"),
    (14, "[x,x^(a c)]"),
    (15, "[x,x^(a b c)] [x^c,x^(a b)]"),
    (16, "[x,x^(a b c)] [x^a,x^(b c)]"),
    (17, "[x,x^(a b c)]"),
    (18, "x"), (19, "x^a"), (20, "x^b"), (21, "x^c"),
    (22, "x^(a b)"), (23, "x^(c a)"), (24, "x^(b c)"), (25, "x^(a b c)"),
    (26, "a"), (27, "b"), (28, "c"),
)

_GAMMA_DEFINITIONS = (
    (1, "[x,b,[y,a],x,y,[x,b]]"), (2, "[x,b,[y,a],y,x,[y,a]]"),
    (3, "[x,b,[y,a],x,y,x]"), (4, "[x,b,[y,a],y,x,y]"),
    (5, "[x,b,[y,a],x,y]"), (6, "[x,b,[y,a],y,x]"),
    (7, "[x,b,[y,a],x]"), (8, "[x,b,[y,a],y]"),
    (9, "[x,b,y,x]"), (10, "[x,[y,a],y]"),
    (11, "[x,b,[y,a]]"), (12, "[x,b,y]"), (13, "[x,[y,a]]"), (14, "[x,y]"),
    (15, "[x,b]"), (16, "[y,a]"),
    (17, "x"), (18, "y"), (19, "a"), (20, "b"),
)

_R_INV_REPLAY = (
    ReplayItem("[g11,g14]", "g8 g7 g6 g5 g4 g2"),
    ReplayItem("[g11,g14,g14]", "g2"),
    ReplayItem("[g12,g13]", "g11"),
    ReplayItem("[g12,g14]", "g9"),
    ReplayItem("[g13,g14]", "g10"),
    ReplayItem("[g9,g13]", "g7"),
    ReplayItem("[g10,g12]", "g8"),
    ReplayItem("[g7,g12]", "g5 g1"),
    ReplayItem("g7^2", "g1"),
    ReplayItem("[y,z,x,x]", "g2 g1"),
    ReplayItem("[x,y,z,z] [z,x,y,y] [z,y,x,x]", "id"),
)

_BETA_REPLAY = (
    ReplayItem("[g10,g28]", "g9"),
    ReplayItem("[g10,g12]", "g3"),
    ReplayItem("[g10,g11]", "g1"),
    ReplayItem("[g10,g14]", "g2"),
    ReplayItem("[g9,g19]", "g6 g5"),
    ReplayItem("[g9,g22]", "g7 g5"),
    ReplayItem("[g9,g20]", "g7 g4"),
    ReplayItem("[g9,g18]", "g6 g4"),
    ReplayItem("[g12,g19]", "g6"),
    ReplayItem("[g13,g18]", "g4"),
    ReplayItem("[a b,x]", "x^(a b) x"),
    ReplayItem("g12 g12^a", "g11"),
)

_GAMMA_REPLAY = (
    ReplayItem("[g15,g18]", "g12"),
    ReplayItem("[g12,g19]", "g11 g8"),
    ReplayItem("[g13,g15]", "g7"),
    ReplayItem("[g8,g13]", "g2"),
    ReplayItem("[g8,g14]", "g4"),
    ReplayItem("[g8,g17]", "g6"),
    ReplayItem("[g14,g19]", "g13 g10"),
    ReplayItem("[g13,g20]", "g11 g7"),
    ReplayItem("[g11,g18]", "g8"),
    ReplayItem("[g10,g20]", "g8 g5 g2"),
    ReplayItem("[g12,g18]", "id"),
)


# =================== registry ===================

def _c2() -> CatalogEntry:
    return CatalogEntry(
        "c2", load_presentation("c2"), {"a": "g1"}, ("a",),
        Expected(2, TRIVIAL), Expected(1, TRIVIAL), _graph(("a",)),
    )


def _d8() -> CatalogEntry:
    return CatalogEntry(
        "d8", load_presentation("d8"), {"x": "g3", "y": "g2"}, ("x", "y"),
        Expected(8, DERIVED), Expected(2, DERIVED), _graph(("x", "y")),
    )


def _d16() -> CatalogEntry:
    return CatalogEntry(
        "d16", load_presentation("d16"), {"s": "g4", "t": "g4 g3"}, ("s", "t"),
        Expected(16, DERIVED), Expected(3, DERIVED), _graph(("s", "t")),
        expected_sandwich=False,
    )


def _complete4() -> CatalogEntry:
    v = ("a", "b", "c", "d")
    return CatalogEntry(
        "complete4", load_presentation("complete4"), {"a": "g1", "b": "g2", "c": "g3", "d": "g4"}, v,
        Expected(16, PAPER), Expected(1, TRIVIAL),
        _graph(v, "a-b", "a-c", "a-d", "b-c", "b-d", "c-d"),
    )


def _graph5() -> CatalogEntry:
    p = direct_product(load_presentation("d8"), direct_product(_c2().presentation, _c2().presentation),
                       name="graph5")
    v = ("x", "y", "a", "b")
    return CatalogEntry(
        "graph5", p, {"x": "g3", "y": "g2", "a": "g4", "b": "g5"}, v,
        Expected(32, PAPER), Expected(2, DERIVED),
        _graph(v, "x-a", "x-b", "y-a", "y-b", "a-b"),
    )


def _graph4a() -> CatalogEntry:
    p = direct_product(load_presentation("d8"), load_presentation("d8"), name="graph4a")
    v = ("x", "y", "a", "b")
    return CatalogEntry(
        "graph4a", p, {"x": "g3", "y": "g2", "a": "g6", "b": "g5"}, v,
        Expected(64, PAPER), Expected(2, DERIVED),
        _graph(v, "x-a", "x-b", "y-a", "y-b"),
    )


def _graph4b() -> CatalogEntry:
    v = ("a", "b", "c", "x")
    return CatalogEntry(
        "graph4b", load_presentation("graph4b"), {"a": "g3", "b": "g5", "c": "g7", "x": "g8"}, v,
        Expected(256, PAPER), Expected(4, DERIVED),
        _graph(v, "a-x", "c-x", "a-b", "b-x"),
    )


def _alpha() -> CatalogEntry:
    p = direct_product(load_presentation("r_inv"), load_presentation("c2"), name="alpha")
    v = ("x", "y", "z", "a")
    return CatalogEntry(
        "alpha", p, {"x": "g12", "y": "g13", "z": "g14", "a": "g15"}, v,
        Expected(2 ** 14, DERIVED), Expected(5, DERIVED),
        _graph(v, "a-x", "a-y", "a-z"),
    )


def _r_free() -> CatalogEntry:
    v = ("x", "y", "z")
    return CatalogEntry(
        "r_free", load_presentation("r_free"), {"x": "g12", "y": "g13", "z": "g14"}, v,
        Expected(math.inf, DERIVED), Expected(5, PAPER), _graph(v),
        definitions=_R_FREE_DEFINITIONS,
    )


def _r_inv() -> CatalogEntry:
    v = ("x", "y", "z")
    return CatalogEntry(
        "r_inv", load_presentation("r_inv"), {"x": "g12", "y": "g13", "z": "g14"}, v,
        Expected(2 ** 13, PAPER), Expected(5, PAPER), _graph(v),
        replay_items=_R_INV_REPLAY, definitions=_R_INV_DEFINITIONS,
    )


def _beta() -> CatalogEntry:
    v = ("x", "a", "b", "c")
    return CatalogEntry(
        "beta", load_presentation("beta"), {"x": "g18", "a": "g26", "b": "g27", "c": "g28"}, v,
        Expected(2 ** 28, PAPER), Expected(9, PAPER), _graph(v, "a-b", "a-c", "b-c"),
        # [a, c^(g21 g20), a] = g1: по напечатанным соотношениям это не сэндвич-множество
        expected_sandwich=False,
        replay_items=_BETA_REPLAY, definitions=_BETA_DEFINITIONS,
    )


def _gamma() -> CatalogEntry:
    v = ("x", "y", "a", "b")
    return CatalogEntry(
        "gamma", load_presentation("gamma"), {"x": "g17", "y": "g18", "a": "g19", "b": "g20"}, v,
        # весовая фильтрация центральна, γ_9 = 1; напечатанный класс 9 не подтверждается
        Expected(2 ** 20, PAPER), Expected(8, DERIVED), _graph(v, "a-b", "x-a", "y-b"),
        replay_items=_GAMMA_REPLAY, definitions=_GAMMA_DEFINITIONS,
    )


_REGISTRY: dict[str, Callable[[], CatalogEntry]] = {
    "r_free": _r_free,
    "r_inv": _r_inv,
    "beta": _beta,
    "gamma": _gamma,
    "complete4": _complete4,
    "graph5": _graph5,
    "graph4a": _graph4a,
    "graph4b": _graph4b,
    "alpha": _alpha,
    "d8": _d8,
    "d16": _d16,
    "c2": _c2,
}

REPLAY_SUITES = ("r_inv", "beta", "gamma")


def catalog_keys() -> list[str]:
    return list(_REGISTRY)


@lru_cache(maxsize=None)
def builtin(key: str) -> CatalogEntry:
    try:
        factory = _REGISTRY[key]
    except KeyError:
        raise UnknownCatalogKey(f"unknown catalog key {key!r}; known: {', '.join(_REGISTRY)}") from None
    return factory()


def export(key: str) -> str:
    return serialize_presentation(builtin(key).presentation)


# =================== verification ===================

@dataclass
class FieldResult:
    name: str
    computed: Any = None
    expected: Any = None
    provenance: str | None = None
    ok: bool | None = None
    error: str | None = None


@dataclass
class CatalogReport:
    key: str
    fields: list[FieldResult] = field(default_factory=list)
    counterexamples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(f.ok for f in self.fields)

    def get(self, name: str) -> FieldResult:
        return next(f for f in self.fields if f.name == name)


def _guarded(report: CatalogReport, name: str, compute: Callable[[], FieldResult]) -> None:
    # ошибка подзадачи пишется в поле, отчёт не прерывается
    try:
        result = compute()
    except SandwichLabError as exc:
        logger.warning("[CATALOG] %s.%s failed: %s", report.key, name, exc)
        result = FieldResult(name, ok=False, error=f"{type(exc).__name__}: {exc}")
    report.fields.append(result)


def verify_builtin(key: str, pol: SamplingPolicy | None = None, fuel: int | None = None,
                   max_class: int | None = None) -> CatalogReport:
    entry = builtin(key)
    p = entry.presentation
    pol = pol or SamplingPolicy.from_settings()
    report = CatalogReport(key)
    logger.info("[CATALOG] verifying %s", key)

    def consistency() -> FieldResult:
        cr = check_consistency(p, fuel)
        for t in cr.failures:
            report.counterexamples.append(f"{t.kind} {t.labels}: {t.left} != {t.right}")
        return FieldResult("consistency", cr.consistent, True, DERIVED, cr.consistent)

    def order() -> FieldResult:
        value = group_order(p)
        return FieldResult("order", value, entry.expected_order.value, entry.expected_order.provenance,
                           value == entry.expected_order.value)

    def klass() -> FieldResult:
        value = nilpotency_class(p, full_group(p), max_class=max_class, fuel=fuel)
        return FieldResult("class", value, entry.expected_class.value, entry.expected_class.provenance,
                           value == entry.expected_class.value)

    def graph() -> FieldResult:
        computed = commutativity_graph(p, entry.generating_set(), entry.vertices, fuel)
        expected = entry.expected_graph
        return FieldResult("graph", computed.edge_list(), expected.edge_list() if expected else None,
                           PAPER, expected is None or computed == expected)

    def sandwich() -> FieldResult:
        verdict = is_sandwich_set(p, entry.generating_set(), pol, fuel)
        if verdict.counterexample:
            report.counterexamples.append(f"sandwich: {verdict.counterexample}")
        expected = "pass" if entry.expected_sandwich else "fail"
        return FieldResult("sandwich", verdict.verdict, expected, DERIVED, verdict.passed == entry.expected_sandwich)

    for name, compute in (("consistency", consistency), ("order", order), ("class", klass),
                          ("graph", graph), ("sandwich", sandwich)):
        _guarded(report, name, compute)
    logger.info("[CATALOG] %s: %s", key, "ok" if report.passed else "mismatch")
    return report


# =================== replay ===================

@dataclass(frozen=True)
class ReplayResult:
    suite: str
    expression: str
    expected: str
    computed: str
    provenance: str
    ok: bool


@dataclass
class ReplayReport:
    suite: str
    results: list[ReplayResult] = field(default_factory=list)

    @property
    def mismatches(self) -> list[ReplayResult]:
        return [r for r in self.results if not r.ok]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def _replay_entry(key: str, items: Sequence[ReplayItem], fuel: int | None) -> list[ReplayResult]:
    entry = builtin(key)
    p = entry.presentation
    names = entry.named_elements()
    results = []
    for item in items:
        computed = evaluate(p, item.expression, names, fuel)
        expected = evaluate(p, item.expected, names, fuel)
        results.append(ReplayResult(
            key, item.expression, format_element(p, expected), format_element(p, computed),
            item.provenance, computed == expected,
        ))
    return results


def definition_items(key: str) -> tuple[ReplayItem, ...]:
    return tuple(ReplayItem(expr, f"g{label}") for label, expr in builtin(key).definitions)


def check_definitions(key: str, fuel: int | None = None) -> ReplayReport:
    return ReplayReport(key, _replay_entry(key, definition_items(key), fuel))


def lemma_replay(suite: str, fuel: int | None = None) -> ReplayReport:
    keys = REPLAY_SUITES if suite == "all" else (suite,)
    if suite != "all" and suite not in REPLAY_SUITES:
        raise UnknownCatalogKey(f"unknown replay suite {suite!r}; known: {', '.join(REPLAY_SUITES)}, all")
    report = ReplayReport(suite)
    for key in keys:
        items = builtin(key).replay_items + definition_items(key)
        report.results.extend(_replay_entry(key, items, fuel))
    logger.info("[CATALOG] replay %s: %d items, %d mismatches", suite, len(report.results), len(report.mismatches))
    return report


def relations_hold(source: str, target: str, images: Mapping[str, str],
                   fuel: int | None = None) -> ReplayReport:
    """
    Образы генераторов source (через их определения и images: имя -> выражение
    в target) удовлетворяют всем степенным и сопрягающим соотношениям source.
    """
    src, dst = builtin(source), builtin(target)
    if not src.definitions:
        raise UnknownCatalogKey(f"{source} carries no generator definitions")
    p, q = src.presentation, dst.presentation
    target_names = dst.named_elements()
    names = {name: evaluate(q, expr, target_names, fuel) for name, expr in images.items()}
    image = {p.position(label): evaluate(q, expr, names, fuel) for label, expr in src.definitions}
    if len(image) != p.n:
        raise UnknownCatalogKey(f"{source}: definitions do not cover every generator")

    def word_image(w: PcWord) -> PcElement:
        acc = identity(q)
        for g, e in w:
            acc = multiply(q, acc, power(q, image[g], e, fuel), fuel)
        return acc

    report = ReplayReport(f"{source}->{target}")
    for i in range(p.n):
        o = p.rel_orders[i]
        if not o:
            continue
        lhs = power(q, image[i], o, fuel)
        rhs = word_image(p.power_rhs.get(i, PcWord()))
        report.results.append(ReplayResult(
            report.suite, f"g{p.labels[i]}^{o}", format_element(q, rhs), format_element(q, lhs), DERIVED, lhs == rhs,
        ))
    for j in range(p.n):
        for i in range(j + 1, p.n):
            lhs = conjugate(q, image[j], image[i], fuel)
            rhs = word_image(p.conj_rhs.get((j, i), PcWord(((j, 1),))))
            report.results.append(ReplayResult(
                report.suite, f"g{p.labels[j]}^g{p.labels[i]}", format_element(q, rhs), format_element(q, lhs),
                DERIVED, lhs == rhs,
            ))
    return report
