# core/engel.py
"""
Проверки Engel-условий и sandwich-множеств на pc-группах.

Кванторы "для всех g" проверяются либо перебором (mode="exhaustive", только
для конечных подгрупп не больше exhaustive_cap), либо на seed-фиксированных
случайных словах (mode="sampled"; вердикт тогда "sampled-pass", не "pass").
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

import networkx as nx
import numpy as np

from .conf import sandwichlab_setting
from .exceptions import (
    CapExceeded, ClassBoundExceeded, FuelExhausted, NotNilpotent, PolicyError, PreconditionViolation,
)
from .pc_engine import (
    PcElement, PcPresentation,
    commutator, conjugate, format_element, identity, invert, left_normed_commutator, multiply, power,
)
from .subgroup import (
    elements, full_group, induced_sequence, nilpotency_class, normal_closure, random_element,
)

logger = logging.getLogger(__name__)

MODES = ("exhaustive", "sampled")
VERDICTS = ("pass", "sampled-pass", "fail", "inconclusive", "precondition-failed")


@dataclass(frozen=True)
class SamplingPolicy:
    mode: str = "sampled"
    samples: int = 1000
    seed: int = 0xE9E1
    max_word_length: int = 12
    exhaustive_cap: int = 2 ** 14

    def __post_init__(self):
        if self.mode not in MODES:
            raise PolicyError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.mode == "sampled" and self.samples < 1:
            raise PolicyError("sampled mode requires samples >= 1")
        if self.max_word_length < 1:
            raise PolicyError("max_word_length must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise PolicyError("seed must fit in 64 bits")
        if self.exhaustive_cap < 1:
            raise PolicyError("exhaustive_cap must be >= 1")

    @classmethod
    def from_settings(cls, **overrides) -> "SamplingPolicy":
        values = {
            "samples": sandwichlab_setting("SAMPLES"),
            "seed": sandwichlab_setting("SEED"),
            "max_word_length": sandwichlab_setting("MAX_WORD_LENGTH"),
            "exhaustive_cap": sandwichlab_setting("EXHAUSTIVE_CAP"),
        }
        values.update(overrides)
        return cls(**values)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @property
    def verdict_on_success(self) -> str:
        return "pass" if self.mode == "exhaustive" else "sampled-pass"


@dataclass
class VerdictReport:
    check: str
    verdict: str
    mode: str
    samples: int
    seed: int
    counterexample: str | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "sampled-pass")


@dataclass(frozen=True)
class CommutativityGraph:
    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    @classmethod
    def from_edges(cls, vertices: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "CommutativityGraph":
        vertices = tuple(vertices)
        edges = frozenset(frozenset(pair) for pair in pairs)
        for e in edges:
            if len(e) != 2 or not e <= set(vertices):
                raise ValueError(f"bad edge {sorted(e)} for vertices {vertices}")
        return cls(vertices, edges)

    def edge_list(self) -> list[tuple[str, str]]:
        order = {v: i for i, v in enumerate(self.vertices)}
        return sorted(
            (tuple(sorted(e, key=order.__getitem__)) for e in self.edges),
            key=lambda uv: (order[uv[0]], order[uv[1]]),
        )

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edge_list())
        return g

    def is_isomorphic(self, other: "CommutativityGraph") -> bool:
        return nx.is_isomorphic(self.to_networkx(), other.to_networkx())


# =================== helpers ===================

def _random_elements(p: PcPresentation, gens: Sequence[PcElement], pol: SamplingPolicy,
                     rng: np.random.Generator, fuel: int | None) -> Iterator[PcElement]:
    while True:
        length = int(rng.integers(1, pol.max_word_length + 1))
        yield random_element(p, gens, length, rng, fuel)


def _exhaustive_domain(p: PcPresentation, gens: Sequence[PcElement], pol: SamplingPolicy,
                       arity: int = 1, fuel: int | None = None) -> list[PcElement]:
    s = induced_sequence(p, gens, fuel) if gens else full_group(p)
    try:
        domain = elements(p, s, cap=pol.exhaustive_cap, fuel=fuel)
    except CapExceeded as exc:
        raise PolicyError(f"exhaustive mode not allowed: {exc}") from None
    if len(domain) ** arity > pol.exhaustive_cap:
        raise PolicyError(
            f"exhaustive mode not allowed: {len(domain)}^{arity} instances exceed the cap {pol.exhaustive_cap}"
        )
    return domain


def _generators(p: PcPresentation) -> list[PcElement]:
    return list(full_group(p).gens)


def _evaluate(check: str, pol: SamplingPolicy, instances: Iterable[Any],
              test: Callable[[Any], bool], describe: Callable[[Any], str],
              details: dict[str, Any] | None = None) -> VerdictReport:
    count = 0
    inconclusive = 0
    details = dict(details or {})
    for inst in instances:
        count += 1
        try:
            ok = test(inst)
        except FuelExhausted as exc:
            inconclusive += 1
            logger.warning("[%s] instance %d inconclusive: %s", check.upper(), count, exc)
            continue
        if not ok:
            logger.info("[%s] fail at instance %d", check.upper(), count)
            return VerdictReport(check, "fail", pol.mode, count, pol.seed, describe(inst), details)
    if inconclusive:
        details["inconclusive_instances"] = inconclusive
        verdict = "inconclusive"
    else:
        verdict = pol.verdict_on_success
    logger.info("[%s] %s after %d instances", check.upper(), verdict, count)
    return VerdictReport(check, verdict, pol.mode, count, pol.seed, None, details)


def _domain(p: PcPresentation, pol: SamplingPolicy, domain: Sequence[PcElement] | None,
            rng: np.random.Generator, fuel: int | None) -> Iterable[PcElement]:
    """Элементы x для "для всех x из G"."""
    if domain is not None:
        return list(domain)
    if pol.mode == "exhaustive":
        return _exhaustive_domain(p, [], pol, fuel=fuel)
    return itertools.islice(_random_elements(p, _generators(p), pol, rng, fuel), pol.samples)


def _class_at_most(p: PcPresentation, gens: Sequence[PcElement], bound: int, fuel: int | None) -> bool:
    try:
        nilpotency_class(p, induced_sequence(p, gens, fuel), max_class=bound, fuel=fuel)
    except (ClassBoundExceeded, NotNilpotent):
        return False
    return True


# =================== Engel elements ===================

def is_left_n_engel(p: PcPresentation, a: PcElement, n: int, pol: SamplingPolicy,
                    domain: Sequence[PcElement] | None = None, fuel: int | None = None) -> VerdictReport:
    """[x, a, ..., a] (n копий a) = 1 для всех x."""
    if n < 1:
        raise PreconditionViolation("Engel degree must be >= 1")
    rng = pol.rng()
    return _evaluate(
        f"left-{n}-engel", pol, _domain(p, pol, domain, rng, fuel),
        lambda x: left_normed_commutator(p, [x] + [a] * n, fuel).is_identity(),
        lambda x: f"x = {format_element(p, x)}",
        {"element": format_element(p, a), "n": n},
    )


def is_right_n_engel(p: PcPresentation, a: PcElement, n: int, pol: SamplingPolicy,
                     domain: Sequence[PcElement] | None = None, fuel: int | None = None) -> VerdictReport:
    """[a, x, ..., x] (n копий x) = 1 для всех x."""
    if n < 1:
        raise PreconditionViolation("Engel degree must be >= 1")
    rng = pol.rng()
    return _evaluate(
        f"right-{n}-engel", pol, _domain(p, pol, domain, rng, fuel),
        lambda x: left_normed_commutator(p, [a] + [x] * n, fuel).is_identity(),
        lambda x: f"x = {format_element(p, x)}",
        {"element": format_element(p, a), "n": n},
    )


def heineken_check(p: PcPresentation, a: PcElement, n: int, pol: SamplingPolicy,
                   fuel: int | None = None) -> VerdictReport:
    """Правый n-Engel a => a^-1 левый (n+1)-Engel."""
    right = is_right_n_engel(p, a, n, pol, fuel=fuel)
    if not right.passed:
        return VerdictReport("heineken", "precondition-failed", pol.mode, right.samples, pol.seed,
                             right.counterexample, {"precondition": right.check})
    left = is_left_n_engel(p, invert(p, a, fuel), n + 1, pol, fuel=fuel)
    left.check = "heineken"
    left.samples += right.samples
    return left


def is_strong_left_3_engel(p: PcPresentation, a: PcElement, pol: SamplingPolicy,
                           fuel: int | None = None) -> VerdictReport:
    """<a, a^g> класса <= 2 и <a, a^f, a^g> класса <= 3."""
    rng = pol.rng()
    if pol.mode == "exhaustive":
        dom = _exhaustive_domain(p, [], pol, arity=2, fuel=fuel)
        instances: Iterable = itertools.product(dom, dom)
    else:
        stream = _random_elements(p, _generators(p), pol, rng, fuel)
        instances = ((next(stream), next(stream)) for _ in range(pol.samples))

    def test(fg: tuple[PcElement, PcElement]) -> bool:
        f, g = fg
        ag, af = conjugate(p, a, g, fuel), conjugate(p, a, f, fuel)
        return _class_at_most(p, [a, ag], 2, fuel) and _class_at_most(p, [a, af, ag], 3, fuel)

    return _evaluate(
        "strong-left-3-engel", pol, instances, test,
        lambda fg: f"f = {format_element(p, fg[0])}, g = {format_element(p, fg[1])}",
        {"element": format_element(p, a)},
    )


def right_engel_closure_check(p: PcPresentation, a: PcElement, pol: SamplingPolicy,
                              fuel: int | None = None) -> VerdictReport:
    """Правый 3-Engel a => нормальное замыкание <a>^G класса <= 3."""
    right = is_right_n_engel(p, a, 3, pol, fuel=fuel)
    if not right.passed:
        return VerdictReport("right-engel-closure", "precondition-failed", pol.mode, right.samples,
                             pol.seed, right.counterexample, {"precondition": right.check})
    closure = normal_closure(p, [a], ambient=_generators(p), fuel=fuel)
    try:
        cls = nilpotency_class(p, closure, max_class=3, fuel=fuel)
    except (ClassBoundExceeded, NotNilpotent):
        return VerdictReport("right-engel-closure", "fail", pol.mode, right.samples, pol.seed,
                             f"<{format_element(p, a)}>^G", {"class_bound": 3})
    return VerdictReport("right-engel-closure", right.verdict, pol.mode, right.samples, pol.seed,
                         None, {"closure_class": cls})


def engel_power_identity_check(p: PcPresentation, a: PcElement, n: int, pol: SamplingPolicy,
                               x: PcElement | None = None, fuel: int | None = None) -> VerdictReport:
    """[x, a, ..., a] (m+1 копий a) = [x, a]^{(-2)^m} для m = 1..n, a - инволюция."""
    if not power(p, a, 2, fuel).is_identity():
        raise PreconditionViolation(f"{format_element(p, a)} is not an involution")
    rng = pol.rng()
    dom = _domain(p, pol, [x] if x is not None else None, rng, fuel)

    def test(elt: PcElement) -> bool:
        base = commutator(p, elt, a, fuel)
        lhs = base
        for m in range(1, n + 1):
            lhs = commutator(p, lhs, a, fuel)
            if lhs != power(p, base, (-2) ** m, fuel):
                return False
        return True

    return _evaluate(
        "engel-power-identity", pol, dom, test,
        lambda elt: f"x = {format_element(p, elt)}",
        {"element": format_element(p, a), "n": n},
    )


def hall_witt_check(p: PcPresentation, pol: SamplingPolicy, fuel: int | None = None) -> VerdictReport:
    """[[x,y^-1],z]^y [[y,z^-1],x]^z [[z,x^-1],y]^x = 1."""
    rng = pol.rng()
    if pol.mode == "exhaustive":
        dom = _exhaustive_domain(p, [], pol, arity=3, fuel=fuel)
        instances: Iterable = itertools.product(dom, dom, dom)
    else:
        stream = _random_elements(p, _generators(p), pol, rng, fuel)
        instances = ((next(stream), next(stream), next(stream)) for _ in range(pol.samples))

    def term(u: PcElement, v: PcElement, w: PcElement) -> PcElement:
        inner = commutator(p, commutator(p, u, invert(p, v, fuel), fuel), w, fuel)
        return conjugate(p, inner, v, fuel)

    def test(xyz: tuple[PcElement, PcElement, PcElement]) -> bool:
        x, y, z = xyz
        total = multiply(p, multiply(p, term(x, y, z), term(y, z, x), fuel), term(z, x, y), fuel)
        return total.is_identity()

    return _evaluate(
        "hall-witt", pol, instances, test,
        lambda xyz: ", ".join(f"{n} = {format_element(p, e)}" for n, e in zip("xyz", xyz)),
    )


# =================== sandwich sets ===================

def _sandwich_instances(p: PcPresentation, X: Sequence[PcElement], pol: SamplingPolicy,
                        fuel: int | None) -> Iterable[tuple[PcElement, PcElement, PcElement]]:
    pairs = list(itertools.product(X, X))
    if pol.mode == "exhaustive":
        dom = _exhaustive_domain(p, X, pol, fuel=fuel)
        if len(dom) * len(pairs) > pol.exhaustive_cap:
            raise PolicyError("exhaustive mode not allowed: too many sandwich instances")
        return ((a, b, g) for a, b in pairs for g in dom)
    rng = pol.rng()
    stream = _random_elements(p, X, pol, rng, fuel)

    def sampled():
        # сначала все пары с g = 1, дальше случайные g
        for i in range(pol.samples):
            a, b = pairs[i % len(pairs)]
            g = identity(p) if i < len(pairs) else next(stream)
            yield a, b, g

    return sampled()


def is_sandwich_set(p: PcPresentation, X: Sequence[PcElement], pol: SamplingPolicy,
                    fuel: int | None = None) -> VerdictReport:
    """<a, b^g> класса <= 2: [u,v,u] = [u,v,v] = 1 для u = a, v = b^g."""
    X = list(X)

    def test(abg) -> bool:
        a, b, g = abg
        v = conjugate(p, b, g, fuel)
        uv = commutator(p, a, v, fuel)
        return commutator(p, uv, a, fuel).is_identity() and commutator(p, uv, v, fuel).is_identity()

    return _evaluate(
        "sandwich", pol, _sandwich_instances(p, X, pol, fuel), test,
        lambda abg: "a = {}, b = {}, g = {}".format(*(format_element(p, e) for e in abg)),
        {"set": [format_element(p, e) for e in X]},
    )


def is_strong_sandwich_set(p: PcPresentation, X: Sequence[PcElement], pol: SamplingPolicy,
                           fuel: int | None = None) -> VerdictReport:
    """Sandwich-множество, где ещё <a, b^f, c^g> класса <= 3."""
    X = list(X)
    first = is_sandwich_set(p, X, pol, fuel)
    if not first.passed:
        first.check = "strong-sandwich"
        return first

    triples = list(itertools.product(X, X, X))
    if pol.mode == "exhaustive":
        dom = _exhaustive_domain(p, X, pol, fuel=fuel)
        if len(triples) * len(dom) ** 2 > pol.exhaustive_cap:
            raise PolicyError("exhaustive mode not allowed: too many strong sandwich instances")
        instances: Iterable = ((t, f, g) for t in triples for f in dom for g in dom)
    else:
        stream = _random_elements(p, X, pol, pol.rng(), fuel)

        def sampled():
            for i in range(pol.samples):
                t = triples[i % len(triples)]
                if i < len(triples):
                    yield t, identity(p), identity(p)
                else:
                    yield t, next(stream), next(stream)

        instances = sampled()

    def test(inst) -> bool:
        (a, b, c), f, g = inst
        return _class_at_most(p, [a, conjugate(p, b, f, fuel), conjugate(p, c, g, fuel)], 3, fuel)

    report = _evaluate(
        "strong-sandwich", pol, instances, test,
        lambda inst: "a = {}, b = {}, c = {}, f = {}, g = {}".format(
            *(format_element(p, e) for e in (*inst[0], inst[1], inst[2]))
        ),
        {"set": [format_element(p, e) for e in X]},
    )
    report.samples += first.samples
    return report


def commutativity_graph(p: PcPresentation, X: Sequence[PcElement], labels: Sequence[str] | None = None,
                        fuel: int | None = None) -> CommutativityGraph:
    labels = list(labels) if labels is not None else [format_element(p, x) for x in X]
    if len(labels) != len(X):
        raise ValueError("one label per element is required")
    pairs = [
        (labels[i], labels[j])
        for i, j in itertools.combinations(range(len(X)), 2)
        if commutator(p, X[i], X[j], fuel).is_identity()
    ]
    return CommutativityGraph.from_edges(labels, pairs)


def sandwich_closure_check(p: PcPresentation, X: Sequence[PcElement], pol: SamplingPolicy,
                           pairs: Sequence[tuple[int, int]] | None = None,
                           fuel: int | None = None) -> VerdictReport:
    """Для сильного sandwich-множества X множество X + {[a, b]} тоже сильное."""
    X = list(X)
    strong = is_strong_sandwich_set(p, X, pol, fuel)
    if not strong.passed:
        return VerdictReport("sandwich-closure", "precondition-failed", pol.mode, strong.samples, pol.seed,
                             strong.counterexample, {"precondition": "strong-sandwich"})
    pairs = list(pairs) if pairs is not None else list(itertools.combinations(range(len(X)), 2))
    total = strong.samples
    verdict = strong.verdict
    for i, j in pairs:
        extra = commutator(p, X[i], X[j], fuel)
        report = is_strong_sandwich_set(p, X + [extra], pol, fuel)
        total += report.samples
        if report.verdict == "fail":
            return VerdictReport(
                "sandwich-closure", "fail", pol.mode, total, pol.seed,
                f"pair ({format_element(p, X[i])}, {format_element(p, X[j])}): {report.counterexample}",
            )
        if report.verdict == "inconclusive":
            verdict = "inconclusive"
    return VerdictReport("sandwich-closure", verdict, pol.mode, total, pol.seed, None, {"pairs": len(pairs)})


def pair_class_bound_check(p: PcPresentation, a: PcElement, b: PcElement, pol: SamplingPolicy,
                           fuel: int | None = None) -> VerdictReport:
    """Два левых 3-Engel элемента порождают подгруппу класса <= 4."""
    samples = 0
    for elt in (a, b):
        pre = is_left_n_engel(p, elt, 3, pol, fuel=fuel)
        samples += pre.samples
        if not pre.passed:
            return VerdictReport("pair-class-bound", "precondition-failed", pol.mode, samples, pol.seed,
                                 pre.counterexample, {"precondition": f"left-3-engel {format_element(p, elt)}"})
    try:
        cls = nilpotency_class(p, induced_sequence(p, [a, b], fuel), max_class=4, fuel=fuel)
    except (ClassBoundExceeded, NotNilpotent):
        return VerdictReport("pair-class-bound", "fail", pol.mode, samples, pol.seed,
                             f"a = {format_element(p, a)}, b = {format_element(p, b)}", {"class_bound": 4})
    return VerdictReport("pair-class-bound", pol.verdict_on_success, pol.mode, samples, pol.seed,
                         None, {"class": cls})
