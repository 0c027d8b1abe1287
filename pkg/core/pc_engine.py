# core/pc_engine.py
"""
Power-conjugate (pc) presentations: разбор/сериализация исходного формата,
сборка слов в нормальную форму, арифметика элементов и проверка
согласованности (consistency).

Нормальная форма убывающая: x_n^{e_n} ... x_1^{e_1}. Относительный порядок 0
означает бесконечный порядок. Внутри модуля генераторы адресуются позицией
0..n-1; в тексте (g<k>) - метками из строки numbering (по умолчанию 1..n).
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .conf import sandwichlab_setting
from .exceptions import FuelExhausted, PresentationError, PresentationSyntaxError

logger = logging.getLogger(__name__)

INFINITE = 0

# int или math.inf
ExtendedNatural = int | float

Letter = tuple[int, int]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
_LETTER_RE = re.compile(r"g(\d+)(?:\^(-?\d+))?")


# =================== words & elements ===================

@dataclass(frozen=True)
class PcWord:
    """Слово: последовательность (позиция, показатель) слева направо."""

    letters: tuple[Letter, ...] = ()

    @classmethod
    def of(cls, letters: Iterable[Letter]) -> "PcWord":
        # склеиваем соседние одинаковые буквы, нулевые показатели выбрасываем
        merged: list[list[int]] = []
        for gen, exp in letters:
            if exp == 0:
                continue
            if merged and merged[-1][0] == gen:
                merged[-1][1] += exp
                if merged[-1][1] == 0:
                    merged.pop()
            else:
                merged.append([gen, exp])
        return cls(tuple((g, e) for g, e in merged))

    def inverse(self) -> "PcWord":
        return PcWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "PcWord") -> "PcWord":
        return PcWord.of(self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def max_position(self) -> int:
        return max((g for g, _ in self.letters), default=-1)


@dataclass(frozen=True)
class PcElement:
    """Вектор показателей нормальной формы; равенство элементов = равенство векторов."""

    exponents: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "PcElement":
        return cls((0,) * n)

    @classmethod
    def generator(cls, n: int, position: int, exp: int = 1) -> "PcElement":
        vec = [0] * n
        vec[position] = exp
        return cls(tuple(vec))

    def is_identity(self) -> bool:
        return not any(self.exponents)

    def leading(self) -> int:
        """Старшая позиция с ненулевым показателем (-1 для единицы)."""
        for pos in range(len(self.exponents) - 1, -1, -1):
            if self.exponents[pos]:
                return pos
        return -1

    def word(self) -> PcWord:
        return PcWord(tuple(
            (pos, self.exponents[pos])
            for pos in range(len(self.exponents) - 1, -1, -1)
            if self.exponents[pos]
        ))


# =================== presentation ===================

@dataclass(frozen=True)
class PcPresentation:
    name: str
    rel_orders: tuple[int, ...]
    power_rhs: Mapping[int, PcWord] = field(default_factory=dict)
    conj_rhs: Mapping[tuple[int, int], PcWord] = field(default_factory=dict)
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.rel_orders)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, n + 1)))
        object.__setattr__(self, "rel_orders", tuple(int(o) for o in self.rel_orders))
        # тривиальные отношения не храним: пустая степень = единица, x_j^{x_i} = x_j = коммутируют
        object.__setattr__(self, "power_rhs", {
            i: w for i, w in sorted(self.power_rhs.items()) if len(w)
        })
        object.__setattr__(self, "conj_rhs", {
            key: w for key, w in sorted(self.conj_rhs.items()) if w.letters != ((key[0], 1),)
        })
        self._validate()

    def _validate(self) -> None:
        n = self.n
        if not _NAME_RE.match(self.name):
            raise PresentationError(f"invalid presentation name {self.name!r}")
        if len(self.labels) != n:
            raise PresentationError(f"numbering lists {len(self.labels)} labels for {n} generators")
        if any(b <= a for a, b in zip(self.labels, self.labels[1:])) or (n and self.labels[0] < 1):
            raise PresentationError("numbering must be strictly increasing positive labels")
        for pos, o in enumerate(self.rel_orders):
            if o != INFINITE and o < 2:
                raise PresentationError(f"relative order of g{self.labels[pos]} must be 0 or >= 2, got {o}")
        for i, w in self.power_rhs.items():
            if not 0 <= i < n:
                raise PresentationError(f"power relation for position {i} out of range")
            if self.rel_orders[i] == INFINITE:
                raise PresentationError(f"g{self.labels[i]} has infinite relative order and cannot carry a power relation")
            self._check_rhs(w, i, f"pow {self.labels[i]}")
        for (j, i), w in self.conj_rhs.items():
            if not (0 <= j < n and 0 <= i < n):
                raise PresentationError(f"conjugate relation ({j}, {i}) out of range")
            if not j < i:
                raise PresentationError(
                    f"conj {self.labels[j]} {self.labels[i]}: the conjugated generator must precede the conjugator"
                )
            if not len(w):
                raise PresentationError(f"conj {self.labels[j]} {self.labels[i]}: right-hand side cannot be the identity")
            self._check_rhs(w, i, f"conj {self.labels[j]} {self.labels[i]}")

    def _check_rhs(self, w: PcWord, bound: int, where: str) -> None:
        for gen, _ in w:
            if not 0 <= gen < self.n:
                raise PresentationError(f"{where}: generator position {gen} out of range")
            if gen >= bound:
                raise PresentationError(
                    f"{where}: right-hand side uses g{self.labels[gen]}, indices must stay below g{self.labels[bound]}"
                )

    @property
    def n(self) -> int:
        return len(self.rel_orders)

    @property
    def is_finite(self) -> bool:
        return INFINITE not in self.rel_orders

    @property
    def hirsch_length(self) -> int:
        return self.rel_orders.count(INFINITE)

    @cached_property
    def _positions(self) -> dict[int, int]:
        return {label: pos for pos, label in enumerate(self.labels)}

    def position(self, label: int) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise PresentationError(f"{self.name} has no generator g{label}") from None

    @cached_property
    def collector(self) -> "Collector":
        return Collector(self)


# =================== text formats ===================

def format_word(p: PcPresentation, w: PcWord | Iterable[Letter]) -> str:
    letters = w.letters if isinstance(w, PcWord) else tuple(w)
    if not letters:
        return "id"
    return " ".join(
        f"g{p.labels[g]}" + (f"^{e}" if e != 1 else "") for g, e in letters
    )


def format_element(p: PcPresentation, a: PcElement) -> str:
    return format_word(p, a.word())


def _parse_letters(text: str, lookup: Mapping[int, int], line: int, column: int) -> PcWord:
    if text.strip() == "id":
        return PcWord()
    letters: list[Letter] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _LETTER_RE.match(text, pos)
        if not m:
            raise PresentationSyntaxError(f"unexpected {text[pos]!r} in word", line, column + pos)
        label = int(m.group(1))
        if label not in lookup:
            raise PresentationSyntaxError(f"unknown generator g{label}", line, column + pos)
        letters.append((lookup[label], int(m.group(2) or 1)))
        pos = m.end()
    if not letters:
        raise PresentationSyntaxError("empty word (write 'id' for the identity)", line, column)
    return PcWord.of(letters)


def parse_word(p: PcPresentation, text: str) -> PcWord:
    return _parse_letters(text, p._positions, 1, 1)


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _int_token(tok: tuple[int, str], lineno: int, what: str) -> int:
    col, text = tok
    try:
        return int(text)
    except ValueError:
        raise PresentationSyntaxError(f"expected {what}, got {text!r}", lineno, col) from None


def parse_presentation(text: str) -> PcPresentation:
    """
    Разбор исходного формата:
        pcgroup <name> / ngens <n> / [numbering ...] / orders ... /
        pow <i> := <word> / conj <j> <i> := <word> / end
    '#' - комментарий до конца строки.
    """
    name: str | None = None
    ngens: int | None = None
    labels: tuple[int, ...] = ()
    orders: tuple[int, ...] | None = None
    power_rhs: dict[int, PcWord] = {}
    conj_rhs: dict[tuple[int, int], PcWord] = {}
    finished = False
    lookup: dict[int, int] = {}
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        toks = _tokens(body)
        if not toks:
            continue
        col, head = toks[0]
        if finished:
            raise PresentationSyntaxError("content after 'end'", lineno, col)

        if name is None:
            if head != "pcgroup" or len(toks) != 2:
                raise PresentationSyntaxError("expected 'pcgroup <name>'", lineno, col)
            name = toks[1][1]
            continue
        if ngens is None:
            if head != "ngens" or len(toks) != 2:
                raise PresentationSyntaxError("expected 'ngens <n>'", lineno, col)
            ngens = _int_token(toks[1], lineno, "generator count")
            if ngens < 0:
                raise PresentationSyntaxError("generator count must be non-negative", lineno, toks[1][0])
            continue
        if head == "numbering" and orders is None and not labels:
            labels = tuple(_int_token(t, lineno, "label") for t in toks[1:])
            if len(labels) != ngens:
                raise PresentationSyntaxError(f"numbering needs {ngens} labels", lineno, col)
            continue
        if orders is None:
            if head != "orders":
                raise PresentationSyntaxError("expected 'orders o_1 ... o_n'", lineno, col)
            orders = tuple(_int_token(t, lineno, "relative order") for t in toks[1:])
            if len(orders) != ngens:
                raise PresentationSyntaxError(f"orders needs {ngens} entries, got {len(orders)}", lineno, col)
            lookup = {label: pos for pos, label in enumerate(labels or range(1, ngens + 1))}
            continue

        if head == "end":
            if len(toks) != 1:
                raise PresentationSyntaxError("unexpected tokens after 'end'", lineno, toks[1][0])
            finished = True
            continue

        if head not in ("pow", "conj"):
            raise PresentationSyntaxError(f"unknown directive {head!r}", lineno, col)
        arity = 1 if head == "pow" else 2
        if len(toks) < arity + 3 or toks[arity + 1][1] != ":=":
            raise PresentationSyntaxError(f"expected '{head} <index>{' <index>' * (arity - 1)} := <word>'", lineno, col)
        idx = []
        for tok in toks[1:arity + 1]:
            label = _int_token(tok, lineno, "generator index")
            if label not in lookup:
                raise PresentationSyntaxError(f"generator index {label} out of range", lineno, tok[0])
            idx.append(lookup[label])
        word_col = toks[arity + 2][0]
        word = _parse_letters(body[word_col - 1:], lookup, lineno, word_col)
        bound = idx[-1]
        for gen, _ in word:
            if gen >= bound:
                raise PresentationError(
                    f"line {lineno}: right-hand side uses g{(labels or range(1, ngens + 1))[gen]}, "
                    f"indices must stay below {toks[arity][1]}"
                )
        if head == "pow":
            if idx[0] in power_rhs:
                raise PresentationSyntaxError("duplicate power relation", lineno, col)
            power_rhs[idx[0]] = word
        else:
            key = (idx[0], idx[1])
            if key in conj_rhs:
                raise PresentationSyntaxError("duplicate conjugate relation", lineno, col)
            conj_rhs[key] = word

    if not finished:
        raise PresentationSyntaxError("missing 'end'", last_line + 1, 1)
    return PcPresentation(name=name, rel_orders=orders, power_rhs=power_rhs, conj_rhs=conj_rhs, labels=labels)


def serialize_presentation(p: PcPresentation) -> str:
    lines = [f"pcgroup {p.name}", f"ngens {p.n}"]
    if p.labels != tuple(range(1, p.n + 1)):
        lines.append("numbering " + " ".join(str(label) for label in p.labels))
    lines.append("orders " + " ".join(str(o) for o in p.rel_orders))
    for i, w in sorted(p.power_rhs.items()):
        lines.append(f"pow {p.labels[i]} := {format_word(p, w)}")
    for (j, i), w in sorted(p.conj_rhs.items()):
        lines.append(f"conj {p.labels[j]} {p.labels[i]} := {format_word(p, w)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# =================== collection ===================

def _inverse_letters(letters: Sequence[Letter]) -> tuple[Letter, ...]:
    return tuple((g, -e) for g, e in reversed(letters))


class Collector:
    """
    Сборка слева для одной презентации.
    Состояние - вектор H x_i^{v_i} L; при домножении на x_i^s, если L не коммутирует
    с x_i, L уходит на стек в виде L^{x_i^s}.
    """

    def __init__(self, presentation: PcPresentation):
        self.p = presentation
        self._partners: list[tuple[int, ...]] = [
            tuple(j for j in range(i) if (j, i) in presentation.conj_rhs)
            for i in range(presentation.n)
        ]
        self._inverse_conj: dict[tuple[int, int], tuple[Letter, ...]] = {}

    # ---- relation-derived words ----

    def _power_letters(self, i: int, q: int) -> tuple[Letter, ...]:
        w = self.p.power_rhs.get(i)
        if w is None or q == 0:
            return ()
        if q > 0:
            return w.letters * q
        return _inverse_letters(w.letters) * (-q)

    def _conjugated_power(self, k: int, f: int, i: int, s: int) -> tuple[Letter, ...]:
        """Буквы слова (x_k^f)^{x_i^s}, s = +-1."""
        rhs = self.p.conj_rhs.get((k, i))
        if rhs is None:
            return ((k, f),)
        base = rhs.letters if s > 0 else self._conjugate_by_inverse(k, i)
        if f > 0:
            return base * f
        return _inverse_letters(base) * (-f)

    def _conjugate_by_inverse(self, k: int, i: int) -> tuple[Letter, ...]:
        # x_k^{x_i} = x_k u  =>  x_k^{x_i^-1} = x_k * (u^-1)^{x_i^-1}
        cached = self._inverse_conj.get((k, i))
        if cached is not None:
            return cached
        rhs = self.p.conj_rhs[(k, i)].letters
        if rhs[0] != (k, 1) or any(g >= k for g, _ in rhs[1:]):
            lk, li = self.p.labels[k], self.p.labels[i]
            raise PresentationError(
                f"conjugation by g{li}^-1 needs a relation g{lk}^g{li} = g{lk} * (word below g{lk})"
            )
        letters: list[Letter] = []
        for g, e in _inverse_letters(rhs[1:]):
            letters.extend(self._conjugated_power(g, e, i, -1))
        tail = self.collect(letters).word().letters
        result = ((k, 1),) + tail
        self._inverse_conj[(k, i)] = result
        return result

    def _partial(self, vec: Sequence[int], stack: Sequence[Letter]) -> str:
        done = format_element(self.p, PcElement(tuple(vec)))
        pending = format_word(self.p, tuple(reversed(stack)))
        return f"{done} | {pending}"

    # ---- strategies ----

    def collect(self, letters: Iterable[Letter], start: Sequence[int] | None = None,
                fuel: int | None = None) -> PcElement:
        p = self.p
        fuel = sandwichlab_setting("FUEL") if fuel is None else fuel
        orders = p.rel_orders
        partners = self._partners
        vec = list(start) if start is not None else [0] * p.n
        stack = list(reversed(tuple(letters)))
        steps = 0
        while stack:
            steps += 1
            if steps > fuel:
                logger.warning("[COLLECT] %s: fuel %d exhausted", p.name, fuel)
                raise FuelExhausted(fuel, self._partial(vec, stack))
            i, e = stack.pop()
            if e == 0:
                continue
            o = orders[i]
            if o and not 0 < e < o:
                q, r = divmod(e, o)
                stack.extend(reversed(self._power_letters(i, q)))
                if r:
                    stack.append((i, r))
                continue
            if any(vec[k] for k in partners[i]):
                s = 1 if e > 0 else -1
                lower = [(k, vec[k]) for k in range(i - 1, -1, -1) if vec[k]]
                for k, _ in lower:
                    vec[k] = 0
                if e != s:
                    stack.append((i, e - s))
                moved: list[Letter] = []
                for k, f in lower:
                    moved.extend(self._conjugated_power(k, f, i, s))
                stack.extend(reversed(moved))
                e = s
            total = vec[i] + e
            if o and total >= o:
                q, r = divmod(total, o)
                vec[i] = r
                stack.extend(reversed(self._power_letters(i, q)))
            else:
                vec[i] = total
        return PcElement(tuple(vec))

    def rewrite_collect(self, letters: Iterable[Letter], policy: str = "leftmost",
                        fuel: int | None = None) -> PcElement:
        """Наивное переписывание слова; policy выбирает самую левую или самую правую пару x_j x_i, j < i."""
        if policy not in ("leftmost", "rightmost"):
            raise ValueError("policy must be 'leftmost' or 'rightmost'")
        p = self.p
        fuel = sandwichlab_setting("FUEL") if fuel is None else fuel
        orders = p.rel_orders
        word = list(PcWord.of(letters).letters)
        steps = 0
        while True:
            steps += 1
            if steps > fuel:
                raise FuelExhausted(fuel, format_word(p, word))
            word = list(PcWord.of(word).letters)
            for idx, (i, e) in enumerate(word):
                o = orders[i]
                if o and not 0 < e < o:
                    q, r = divmod(e, o)
                    word[idx:idx + 1] = ([(i, r)] if r else []) + list(self._power_letters(i, q))
                    break
            else:
                sites = [t for t in range(len(word) - 1) if word[t][0] < word[t + 1][0]]
                if not sites:
                    break
                t = sites[0] if policy == "leftmost" else sites[-1]
                (j, a), (i, b) = word[t], word[t + 1]
                s = 1 if b > 0 else -1
                tail = [(i, b - s)] if b != s else []
                word[t:t + 2] = [(i, s)] + list(self._conjugated_power(j, a, i, s)) + tail
        vec = [0] * p.n
        for i, e in word:
            vec[i] = e
        return PcElement(tuple(vec))


# =================== element arithmetic ===================

def _letters(w: PcWord | PcElement | Iterable[Letter]) -> tuple[Letter, ...]:
    if isinstance(w, PcElement):
        return w.word().letters
    if isinstance(w, PcWord):
        return w.letters
    return tuple(w)


def identity(p: PcPresentation) -> PcElement:
    return PcElement.identity(p.n)


def generator(p: PcPresentation, label: int, exp: int = 1) -> PcElement:
    """Элемент x_label^exp (через сборку, чтобы показатель стал каноническим)."""
    return collect(p, ((p.position(label), exp),))


def collect(p: PcPresentation, w: PcWord | Iterable[Letter], fuel: int | None = None) -> PcElement:
    return p.collector.collect(_letters(w), fuel=fuel)


def rewrite_collect(p: PcPresentation, w: PcWord | Iterable[Letter], policy: str = "leftmost",
                    fuel: int | None = None) -> PcElement:
    return p.collector.rewrite_collect(_letters(w), policy=policy, fuel=fuel)


def element(p: PcPresentation, text: str, fuel: int | None = None) -> PcElement:
    return collect(p, parse_word(p, text), fuel=fuel)


def multiply(p: PcPresentation, a: PcElement, b: PcElement, fuel: int | None = None) -> PcElement:
    return p.collector.collect(b.word().letters, start=a.exponents, fuel=fuel)


def invert(p: PcPresentation, a: PcElement, fuel: int | None = None) -> PcElement:
    return p.collector.collect(_inverse_letters(a.word().letters), fuel=fuel)


def power(p: PcPresentation, a: PcElement, k: int, fuel: int | None = None) -> PcElement:
    if k < 0:
        a, k = invert(p, a, fuel), -k
    result = identity(p)
    base = a
    while k:
        if k & 1:
            result = multiply(p, result, base, fuel)
        k >>= 1
        if k:
            base = multiply(p, base, base, fuel)
    return result


def conjugate(p: PcPresentation, a: PcElement, g: PcElement, fuel: int | None = None) -> PcElement:
    """a^g = g^-1 a g."""
    g_letters = g.word().letters
    return p.collector.collect(_inverse_letters(g_letters) + a.word().letters + g_letters, fuel=fuel)


def commutator(p: PcPresentation, a: PcElement, b: PcElement, fuel: int | None = None) -> PcElement:
    """[a, b] = a^-1 b^-1 a b."""
    wa, wb = a.word().letters, b.word().letters
    return p.collector.collect(_inverse_letters(wa) + _inverse_letters(wb) + wa + wb, fuel=fuel)


def left_normed_commutator(p: PcPresentation, seq: Sequence[PcElement], fuel: int | None = None) -> PcElement:
    if len(seq) < 2:
        raise ValueError("left-normed commutator needs at least two entries")
    acc = seq[0]
    for b in seq[1:]:
        acc = commutator(p, acc, b, fuel)
    return acc


# =================== orders ===================

def group_order(p: PcPresentation) -> ExtendedNatural:
    """Произведение относительных порядков; верно для согласованных презентаций."""
    if not p.is_finite:
        return math.inf
    return math.prod(p.rel_orders)


def element_order(p: PcPresentation, a: PcElement, fuel: int | None = None) -> ExtendedNatural:
    # order(a) = r * order(a^r), r - относительный индекс старшего показателя
    order = 1
    current = a
    while not current.is_identity():
        lead = current.leading()
        o = p.rel_orders[lead]
        if o == INFINITE:
            return math.inf
        r = o // math.gcd(current.exponents[lead], o)
        order *= r
        current = power(p, current, r, fuel)
    return order


# =================== consistency ===================

@dataclass(frozen=True)
class OverlapTest:
    kind: str
    labels: tuple[int, ...]
    status: str  # pass | fail | inconclusive
    left: str | None = None
    right: str | None = None


@dataclass(frozen=True)
class ConsistencyReport:
    presentation: str
    tests: tuple[OverlapTest, ...]

    @property
    def failures(self) -> tuple[OverlapTest, ...]:
        return tuple(t for t in self.tests if t.status == "fail")

    @property
    def inconclusive(self) -> tuple[OverlapTest, ...]:
        return tuple(t for t in self.tests if t.status == "inconclusive")

    @property
    def consistent(self) -> bool:
        return not self.failures and not self.inconclusive


def _overlap_cases(p: PcPresentation):
    """
    Слова вне нормальной формы (возрастающие пары) в двух расстановках скобок.
    Каждый случай: (kind, позиции, левая часть, правая часть) как функции от
    multiply/gen/pow.
    """
    n = p.n
    orders = p.rel_orders
    for i in range(n):
        for j in range(i):
            for k in range(j):
                yield "associativity", (k, j, i)
    for i in range(n):
        if orders[i]:
            yield "power-self", (i,)
        for j in range(i):
            if orders[j]:
                yield "power-left", (j, i)
            if orders[i]:
                yield "power-right", (j, i)
            if orders[i] == INFINITE:
                yield "inverse-right", (j, i)
            if orders[j] == INFINITE:
                yield "inverse-left", (j, i)
            if orders[i] == INFINITE and orders[j] == INFINITE:
                yield "inverse-both", (j, i)


def check_consistency(p: PcPresentation, fuel: int | None = None) -> ConsistencyReport:
    col = p.collector
    n = p.n

    def gen(pos: int, exp: int = 1) -> PcElement:
        return PcElement.generator(n, pos, exp)

    def mul(a: PcElement, b: PcElement) -> PcElement:
        return col.collect(b.word().letters, start=a.exponents, fuel=fuel)

    def power_value(pos: int) -> PcElement:
        return col.collect(p.power_rhs.get(pos, PcWord()).letters, fuel=fuel)

    def sides(kind: str, idx: tuple[int, ...]) -> tuple[PcElement, PcElement]:
        if kind == "associativity":
            k, j, i = idx
            return mul(mul(gen(k), gen(j)), gen(i)), mul(gen(k), mul(gen(j), gen(i)))
        if kind == "power-self":
            (i,) = idx
            return mul(power_value(i), gen(i)), mul(gen(i), power_value(i))
        j, i = idx
        if kind == "power-left":
            return mul(power_value(j), gen(i)), mul(gen(j, p.rel_orders[j] - 1), mul(gen(j), gen(i)))
        if kind == "power-right":
            return mul(gen(j), power_value(i)), mul(mul(gen(j), gen(i)), gen(i, p.rel_orders[i] - 1))
        if kind == "inverse-right":
            return gen(j), mul(mul(gen(j), gen(i, -1)), gen(i))
        if kind == "inverse-left":
            return gen(i), mul(gen(j), mul(gen(j, -1), gen(i)))
        return gen(j, -1), mul(mul(gen(j, -1), gen(i, -1)), gen(i))

    tests: list[OverlapTest] = []
    for kind, idx in _overlap_cases(p):
        labels = tuple(p.labels[x] for x in idx)
        try:
            left, right = sides(kind, idx)
        except (FuelExhausted, PresentationError) as exc:
            logger.warning("[CONSISTENCY] %s %s %s inconclusive: %s", p.name, kind, labels, exc)
            tests.append(OverlapTest(kind, labels, "inconclusive", left=str(exc)))
            continue
        if left == right:
            tests.append(OverlapTest(kind, labels, "pass"))
        else:
            tests.append(OverlapTest(kind, labels, "fail", format_element(p, left), format_element(p, right)))

    report = ConsistencyReport(p.name, tuple(tests))
    logger.info(
        "[CONSISTENCY] %s: %d tests, %d failed, %d inconclusive",
        p.name, len(tests), len(report.failures), len(report.inconclusive),
    )
    return report
