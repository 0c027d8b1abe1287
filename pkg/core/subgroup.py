# core/subgroup.py
"""
Подгруппы pc-группы через индуцированные последовательности:
членство просеиванием (sift), порядок, нормальное замыкание,
нижний центральный ряд, класс нильпотентности, центр.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .conf import sandwichlab_setting
from .exceptions import (
    CapExceeded, ClassBoundExceeded, FuelExhausted, NotNilpotent, UnsupportedOperation,
)
from .linalg import gfp_nullspace
from .pc_engine import (
    INFINITE, ExtendedNatural, PcElement, PcPresentation,
    commutator, format_element, identity, invert, multiply, power,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InducedSequence:
    """Генераторы по возрастанию старшей позиции; старшие показатели нормализованы."""

    gens: tuple[PcElement, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.gens)

    @property
    def leading_positions(self) -> tuple[int, ...]:
        return tuple(h.leading() for h in self.gens)

    def is_trivial(self) -> bool:
        return not self.gens


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(d, s, t): s*a + t*b = d = gcd(a, b)."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def _sift_table(p: PcPresentation, table: dict[int, PcElement], g: PcElement,
                fuel: int | None = None) -> PcElement:
    # g * h^{-a/c}, пока старшая позиция g есть в таблице и делится
    while not g.is_identity():
        lead = g.leading()
        h = table.get(lead)
        if h is None:
            return g
        a, c = g.exponents[lead], h.exponents[lead]
        if a % c:
            return g
        g = multiply(p, g, power(p, h, -(a // c), fuel), fuel)
    return g


class _SequenceBuilder:
    """Таблица по старшей позиции + очередь следствий (степени, коммутаторы)."""

    def __init__(self, p: PcPresentation, fuel: int | None = None, table: dict[int, PcElement] | None = None):
        self.p = p
        self.fuel = fuel
        self.table: dict[int, PcElement] = dict(table or {})
        self.queue: deque[PcElement] = deque()
        self._budget = sandwichlab_setting("FUEL") if fuel is None else fuel

    def sift(self, g: PcElement) -> PcElement:
        return _sift_table(self.p, self.table, g, self.fuel)

    def contains(self, g: PcElement) -> bool:
        return self.sift(g).is_identity()

    def _normalize(self, g: PcElement) -> PcElement:
        lead = g.leading()
        o = self.p.rel_orders[lead]
        a = g.exponents[lead]
        if o == INFINITE:
            return invert(self.p, g, self.fuel) if a < 0 else g
        d = math.gcd(a, o)
        if d == a:
            return g
        return power(self.p, g, pow(a // d, -1, o // d), self.fuel)

    def _consequences(self, h: PcElement) -> None:
        p = self.p
        lead = h.leading()
        o = p.rel_orders[lead]
        if o:
            self.queue.append(power(p, h, o // h.exponents[lead], self.fuel))
        for other in list(self.table.values()):
            if other == h:
                continue
            self.queue.append(commutator(p, h, other, self.fuel))
            if p.rel_orders[lead] == INFINITE or p.rel_orders[other.leading()] == INFINITE:
                self.queue.append(commutator(p, h, invert(p, other, self.fuel), self.fuel))
                self.queue.append(commutator(p, invert(p, h, self.fuel), other, self.fuel))

    def _insert(self, g: PcElement) -> bool:
        g = self.sift(g)
        if g.is_identity():
            return False
        g = self._normalize(g)
        lead = g.leading()
        h = self.table.get(lead)
        if h is None:
            self.table[lead] = g
            self._consequences(g)
            return True
        # оба старших показателя не делят друг друга: склеиваем через расширенный НОД
        d, s, t = _xgcd(g.exponents[lead], h.exponents[lead])
        combined = multiply(self.p, power(self.p, g, s, self.fuel), power(self.p, h, t, self.fuel), self.fuel)
        self.table[lead] = self._normalize(combined)
        self.queue.append(h)
        self.queue.append(g)
        self._consequences(self.table[lead])
        return True

    def add(self, gens: Iterable[PcElement]) -> None:
        self.queue.extend(gens)
        self.close()

    def close(self) -> None:
        while True:
            steps = 0
            while self.queue:
                steps += 1
                if steps > self._budget:
                    raise FuelExhausted(self._budget, f"{len(self.queue)} pending subgroup elements")
                self._insert(self.queue.popleft())
            if not self._verify():
                return

    def _verify(self) -> bool:
        """Повторная проверка всех степеней и коммутаторов; True если что-то добавлено."""
        for h in list(self.table.values()):
            self._consequences(h)
        pending = [g for g in self.queue if not self.contains(g)]
        self.queue.clear()
        self.queue.extend(pending)
        return bool(pending)

    def sequence(self) -> InducedSequence:
        return InducedSequence(tuple(self.table[k] for k in sorted(self.table)))


def _table(s: InducedSequence) -> dict[int, PcElement]:
    return {h.leading(): h for h in s.gens}


# =================== basic operations ===================

def induced_sequence(p: PcPresentation, gens: Iterable[PcElement], fuel: int | None = None) -> InducedSequence:
    builder = _SequenceBuilder(p, fuel)
    builder.add(gens)
    return builder.sequence()


def full_group(p: PcPresentation) -> InducedSequence:
    """Все генераторы pc-последовательности уже образуют индуцированную последовательность."""
    return InducedSequence(tuple(PcElement.generator(p.n, pos) for pos in range(p.n)))


def trivial_subgroup() -> InducedSequence:
    return InducedSequence()


def sift(p: PcPresentation, s: InducedSequence, g: PcElement, fuel: int | None = None) -> PcElement:
    return _sift_table(p, _table(s), g, fuel)


def contains(p: PcPresentation, s: InducedSequence, g: PcElement, fuel: int | None = None) -> bool:
    return sift(p, s, g, fuel).is_identity()


def subgroup_order(p: PcPresentation, s: InducedSequence) -> ExtendedNatural:
    order = 1
    for h in s.gens:
        lead = h.leading()
        o = p.rel_orders[lead]
        if o == INFINITE:
            return math.inf
        order *= o // h.exponents[lead]
    return order


def is_subgroup(p: PcPresentation, small: InducedSequence, big: InducedSequence,
                fuel: int | None = None) -> bool:
    table = _table(big)
    return all(_sift_table(p, table, h, fuel).is_identity() for h in small.gens)


def same_subgroup(p: PcPresentation, s: InducedSequence, t: InducedSequence,
                  fuel: int | None = None) -> bool:
    if s.leading_positions != t.leading_positions:
        return False
    return is_subgroup(p, s, t, fuel) and is_subgroup(p, t, s, fuel)


def elements(p: PcPresentation, s: InducedSequence, cap: int | None = None,
             fuel: int | None = None) -> list[PcElement]:
    """Все элементы подгруппы в виде h_r^{e_r} ... h_1^{e_1}."""
    cap = sandwichlab_setting("EXHAUSTIVE_CAP") if cap is None else cap
    order = subgroup_order(p, s)
    if order > cap:
        raise CapExceeded(f"subgroup of order {order} exceeds the enumeration cap {cap}")
    result = [identity(p)]
    for h in reversed(s.gens):
        lead = h.leading()
        steps = p.rel_orders[lead] // h.exponents[lead]
        powers = [power(p, h, e, fuel) for e in range(steps)]
        result = [multiply(p, x, hp, fuel) for x in result for hp in powers]
    return result


def random_element(p: PcPresentation, gens: Sequence[PcElement], length: int,
                   rng: np.random.Generator, fuel: int | None = None) -> PcElement:
    """Случайное слово длины length в буквах gens и их обратных."""
    if not gens:
        return identity(p)
    letters = list(gens) + [invert(p, g, fuel) for g in gens]
    result = identity(p)
    for idx in rng.integers(0, len(letters), size=length):
        result = multiply(p, result, letters[int(idx)], fuel)
    return result


# =================== closures & series ===================

def normal_closure(p: PcPresentation, gens: Iterable[PcElement], ambient: Sequence[PcElement],
                   fuel: int | None = None) -> InducedSequence:
    builder = _SequenceBuilder(p, fuel)
    builder.add(gens)
    conjugators = list(ambient)
    if not p.is_finite:
        conjugators += [invert(p, g, fuel) for g in ambient]
    done: set[tuple[PcElement, PcElement]] = set()
    while True:
        fresh = []
        for h in list(builder.table.values()):
            for g in conjugators:
                if (h, g) in done:
                    continue
                done.add((h, g))
                # h^g = h [h, g]
                c = commutator(p, h, g, fuel)
                if not builder.contains(c):
                    fresh.append(c)
        if not fresh:
            return builder.sequence()
        builder.add(fresh)


def lower_central_series(p: PcPresentation, s: InducedSequence, max_class: int | None = None,
                         fuel: int | None = None) -> list[InducedSequence]:
    """gamma_1 = s, gamma_{i+1} = [gamma_i, s]; до тривиального члена."""
    max_class = sandwichlab_setting("MAX_CLASS") if max_class is None else max_class
    series = [s]
    current = s
    while not current.is_trivial():
        comms = [commutator(p, h, g, fuel) for h in current.gens for g in s.gens]
        nxt = normal_closure(p, comms, ambient=s.gens, fuel=fuel)
        logger.debug(
            "[SERIES] %s: term %d has order %s", p.name, len(series) + 1, subgroup_order(p, nxt)
        )
        if is_subgroup(p, current, nxt, fuel):
            raise NotNilpotent(
                f"lower central series of a subgroup of {p.name} stabilizes at a nontrivial term "
                f"(term {len(series)})"
            )
        series.append(nxt)
        if not nxt.is_trivial() and len(series) > max_class:
            raise ClassBoundExceeded(max_class, [format_element(p, h) for h in nxt.gens])
        current = nxt
    logger.info("[SERIES] %s: class %d", p.name, len(series) - 1)
    return series


def nilpotency_class(p: PcPresentation, s: InducedSequence, max_class: int | None = None,
                     fuel: int | None = None) -> int:
    return len(lower_central_series(p, s, max_class, fuel)) - 1


# =================== center ===================

def _exponent_p_series(p: PcPresentation, prime: int, fuel: int | None) -> list[InducedSequence]:
    # P_1 = G, P_{i+1} = [P_i, G] P_i^p
    group = full_group(p)
    series = [group]
    current = group
    while not current.is_trivial():
        gens = [commutator(p, h, g, fuel) for h in current.gens for g in group.gens]
        gens += [power(p, h, prime, fuel) for h in current.gens]
        current = normal_closure(p, gens, ambient=group.gens, fuel=fuel)
        series.append(current)
    return series


def _layer_coordinates(p: PcPresentation, upper: InducedSequence, lower: InducedSequence,
                       g: PcElement, fuel: int | None) -> list[int]:
    """Координаты g из upper в элементарно-абелевом слое upper/lower."""
    table = _table(upper)
    table.update(_table(lower))
    layer = [pos for pos in sorted(_table(upper)) if pos not in _table(lower)]
    coords = {pos: 0 for pos in layer}
    while not g.is_identity():
        lead = g.leading()
        h = table[lead]
        a = g.exponents[lead] // h.exponents[lead]
        if lead in coords:
            coords[lead] = a
        g = multiply(p, g, power(p, h, -a, fuel), fuel)
    return [coords[pos] for pos in layer]


def _center_by_layers(p: PcPresentation, prime: int, fuel: int | None) -> InducedSequence:
    series = _exponent_p_series(p, prime, fuel)
    gens = full_group(p).gens
    cent = full_group(p)
    for upper, lower in zip(series, series[1:]):
        # [c, x_j] mod lower - гомоморфизм cent -> (upper/lower)^{#gens}
        rows = []
        for h in cent.gens:
            row: list[int] = []
            for x in gens:
                row.extend(_layer_coordinates(p, upper, lower, commutator(p, h, x, fuel), fuel))
            rows.append(row)
        if not rows or not any(any(r) for r in rows):
            continue
        kernel_gens = [power(p, h, prime, fuel) for h in cent.gens]
        kernel_gens += [commutator(p, a, b, fuel) for i, a in enumerate(cent.gens) for b in cent.gens[i + 1:]]
        null = gfp_nullspace(np.array(rows, dtype=np.int64).T, prime)
        for vec in null:
            elt = identity(p)
            for h, e in zip(cent.gens, vec):
                if e:
                    elt = multiply(p, elt, power(p, h, int(e), fuel), fuel)
            kernel_gens.append(elt)
        cent = normal_closure(p, kernel_gens, ambient=cent.gens, fuel=fuel)
    return cent


def _center_brute_force(p: PcPresentation, fuel: int | None) -> InducedSequence:
    gens = full_group(p).gens
    central = [
        g for g in elements(p, full_group(p), fuel=fuel)
        if all(commutator(p, g, x, fuel).is_identity() for x in gens)
    ]
    return induced_sequence(p, central, fuel)


def center(p: PcPresentation, fuel: int | None = None) -> InducedSequence:
    if not p.is_finite:
        raise UnsupportedOperation(f"center of {p.name}: infinite relative orders are not supported")
    if p.n == 0:
        return trivial_subgroup()
    primes = set(p.rel_orders)
    if len(primes) == 1 and _is_prime(next(iter(primes))):
        return _center_by_layers(p, primes.pop(), fuel)
    if math.prod(p.rel_orders) <= sandwichlab_setting("EXHAUSTIVE_CAP"):
        return _center_brute_force(p, fuel)
    raise UnsupportedOperation(
        f"center of {p.name}: needs a prime-power presentation with all relative orders equal to p"
    )


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))
