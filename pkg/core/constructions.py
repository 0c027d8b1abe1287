# core/constructions.py
"""
Конкретные алгебры и группы:

- пример в характеристике 2 с базисом a, b, y, u_n, v_n (усечённый по индексу N);
- алгебра V = <x, u, v, w>, идеал W = <u, v, w>, базис e1..e12 обёртывающей E;
- усечённая V*(n) с индексами - непустыми подмножествами {1..n};
- унипотентная группа G(n) = <1+ad(x), 1+ad(u_A), 1+ad(v_A), 1+ad(w_A)> над GF(2);
- типы простых коммутаторов [x, a_i, ...].
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Sequence, Union

import numpy as np

from .conf import sandwichlab_setting
from .engel import SamplingPolicy, VerdictReport, _evaluate
from .exceptions import CapExceeded, ExpressionSyntaxError, LieAlgebraError, PolicyError, PreconditionViolation
from .expressions import Commutator, Name, parse_expression
from .lie_engine import (
    EndoMatrix, LieAlgebra,
    ad, compose, enveloping_closure, from_products, generated_subalgebra, is_ideal, lie_center, lie_class,
    serialize_lie_algebra, unipotent,
)
from .linalg import BitMatrix, Gf2Basis, gfp_row_basis

logger = logging.getLogger(__name__)

LETTERS = ("u", "v", "w")


# =================== characteristic-2 example ===================

def build_char2_example(N: int) -> LieAlgebra:
    """
    a, b, y, u_0..u_N, v_1..v_{N+1} над GF(2):

        ab = y,  u_n a = v_{n+1},  u_n y = u_{n+1},  v_n b = u_n,  v_n y = v_{n+1}.

    Произведения не уменьшают индекс, поэтому отбрасывание индексов > N
    (соответственно > N+1 для v) - фактор по идеалу.
    """
    cap = sandwichlab_setting("CHAR2_CAP")
    if N < 1:
        raise PreconditionViolation(f"truncation index must be >= 1, got {N}")
    if N > cap:
        raise CapExceeded(f"truncation index {N} exceeds CHAR2_CAP={cap}")
    a, b, y = 0, 1, 2

    def u(n: int) -> int | None:
        return 3 + n if 0 <= n <= N else None

    def v(n: int) -> int | None:
        return N + 3 + n if 1 <= n <= N + 1 else None

    names = ["a", "b", "y"] + [f"u_{n}" for n in range(N + 1)] + [f"v_{n}" for n in range(1, N + 2)]
    products: dict[tuple[int, int], dict[int, int]] = {(a, b): {y: 1}}

    def put(i: int, j: int, k: int | None) -> None:
        if k is not None:
            products[(i, j)] = {k: 1}

    for n in range(N + 1):
        put(u(n), a, v(n + 1))
        put(u(n), y, u(n + 1))
    for n in range(1, N + 2):
        put(v(n), b, u(n))
        put(v(n), y, v(n + 1))
    return from_products(2, names, products, name=f"char2_example({N})")


# =================== V, W, E ===================

def build_V() -> LieAlgebra:
    """u v = u, v w = w, w u = v, w x = u; u x = v x = 0."""
    x, u, v, w = range(4)
    products = {
        (u, v): {u: 1},
        (v, w): {w: 1},
        (w, u): {v: 1},
        (w, x): {u: 1},
    }
    return from_products(2, ("x", "u", "v", "w"), products, name="V")


def build_W() -> LieAlgebra:
    u, v, w = range(3)
    return from_products(2, ("u", "v", "w"), {(u, v): {u: 1}, (v, w): {w: 1}, (w, u): {v: 1}}, name="W")


# (имя, последовательность правых операторов ad(.))
ENVELOPING_WORDS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("e1", ("w",)),
    ("e2", ("w", "w")),
    ("e3", ("w", "w", "w")),
    ("e4", ("v",)),
    ("e5", ("v", "w")),
    ("e6", ("v", "w", "w")),
    ("e7", ("u",)),
    ("e8", ("u", "w")),
    ("e9", ("u", "w", "w")),
    ("e10", ("x", "v")),
    ("e11", ("x", "w")),
    ("e12", ("x", "w", "w")),
)


@dataclass
class EnvelopingBasis:
    elements: dict[str, EndoMatrix]
    rank: int
    closure_dim: int

    @property
    def is_basis(self) -> bool:
        return self.rank == len(self.elements) == self.closure_dim


def build_enveloping_basis(L: LieAlgebra | None = None) -> EnvelopingBasis:
    """e1..e12 как композиции ad; базис E, если ранг совпадает с размерностью замыкания."""
    L = L or build_V()
    adm = {name: ad(L, L.basis(name)) for name in ("x", "u", "v", "w")}
    elements = {name: compose(L, *(adm[s] for s in word)) for name, word in ENVELOPING_WORDS}
    rank = len(Gf2Basis(BitMatrix.from_array(m).flatten() for m in elements.values()))
    closure_dim = len(enveloping_closure(L, [L.basis(s) for s in ("x", "u", "v", "w")]))
    logger.info("[LIE] enveloping basis: rank %d, closure dimension %d", rank, closure_dim)
    return EnvelopingBasis(elements, rank, closure_dim)


@dataclass
class SimpleIdealReport:
    is_ideal: bool
    nonzero: bool
    subspaces_checked: int = 0
    proper_subideal: list[list[int]] | None = None
    center_dim: int = 0

    @property
    def passed(self) -> bool:
        return self.is_ideal and self.nonzero and self.proper_subideal is None

    def __bool__(self) -> bool:
        return self.passed


def _subspaces(rows: np.ndarray, p: int, width: int, cap: int) -> Iterator[np.ndarray]:
    """Все подпространства оболочки rows (BFS по размерности, дубли отсеиваются по RREF)."""
    k = len(rows)
    if p ** k > cap:
        raise CapExceeded(f"{p}^{k} vectors exceed SUBSPACE_CAP={cap}")
    vectors = [
        np.array(coeffs, dtype=np.int64) @ rows % p
        for coeffs in itertools.product(range(p), repeat=k) if any(coeffs)
    ]
    seen = {b""}
    layer = [np.zeros((0, width), dtype=np.int64)]
    count = 0
    while layer:
        nxt = []
        for basis in layer:
            count += 1
            if count > cap:
                raise CapExceeded(f"more than SUBSPACE_CAP={cap} subspaces")
            yield basis
            for vec in vectors:
                grown = gfp_row_basis(np.vstack([basis, vec]), p, width)
                if len(grown) == len(basis):
                    continue
                key = grown.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(grown)
        layer = nxt


def verify_simple_ideal(L: LieAlgebra, rows) -> SimpleIdealReport:
    """Ненулевой идеал без собственных ненулевых подидеалов (перебор всех подпространств)."""
    rows = gfp_row_basis(np.array(rows, dtype=np.int64).reshape(-1, L.dim), L.p, L.dim)
    report = SimpleIdealReport(is_ideal(L, rows), bool(len(rows)), center_dim=len(lie_center(L)))
    if not report.is_ideal or not report.nonzero:
        return report
    cap = sandwichlab_setting("SUBSPACE_CAP")
    for sub in _subspaces(rows, L.p, L.dim, cap):
        report.subspaces_checked += 1
        if 0 < len(sub) < len(rows) and is_ideal(L, sub):
            report.proper_subideal = sub.tolist()
            break
    logger.info("[LIE] simple ideal check on %s: %s after %d subspaces", L.name, report.passed,
                report.subspaces_checked)
    return report


# =================== V*(n) ===================

@dataclass(frozen=True)
class SubsetIndex:
    """Базисный элемент z_A: буква z из u, v, w и непустое A из {1..n} битовой маской."""

    n: int
    mask: int
    letter: str

    def __post_init__(self):
        if self.letter not in LETTERS:
            raise LieAlgebraError(f"letter must be one of {LETTERS}, got {self.letter!r}")
        if not 0 < self.mask < 1 << self.n:
            raise LieAlgebraError(f"index set must be a nonempty subset of 1..{self.n}")

    @property
    def subset(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.mask >> i & 1)

    @property
    def name(self) -> str:
        return f"{self.letter}_{{{','.join(map(str, self.subset))}}}"

    @property
    def position(self) -> int:
        return 1 + 3 * (self.mask - 1) + LETTERS.index(self.letter)

    @classmethod
    def of(cls, n: int, letter: str, subset: Sequence[int]) -> "SubsetIndex":
        mask = 0
        for i in subset:
            if not 1 <= i <= n:
                raise LieAlgebraError(f"index {i} outside 1..{n}")
            mask |= 1 << (i - 1)
        return cls(n, mask, letter)


def vstar_dim(n: int) -> int:
    return 3 * (2 ** n - 1) + 1


def _check_subset_cap(n: int) -> None:
    cap = sandwichlab_setting("SUBSET_CAP")
    if n < 1:
        raise PreconditionViolation(f"n must be >= 1, got {n}")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds SUBSET_CAP={cap}")


def build_Vstar(n: int) -> LieAlgebra:
    """
    x и u_A, v_A, w_A; для A, B без общих элементов
    u_A v_B = u_{A+B}, v_A w_B = w_{A+B}, w_A u_B = v_{A+B}, w_A x = u_A,
    остальные произведения базисных элементов нулевые.
    """
    _check_subset_cap(n)
    full = 1 << n
    names = ["x"]
    for mask in range(1, full):
        names.extend(SubsetIndex(n, mask, z).name for z in LETTERS)

    def pos(letter: str, mask: int) -> int:
        return SubsetIndex(n, mask, letter).position

    products: dict[tuple[int, int], dict[int, int]] = {}
    for A in range(1, full):
        products[(pos("w", A), 0)] = {pos("u", A): 1}
        for B in range(1, full):
            if A & B:
                continue
            products[(pos("u", A), pos("v", B))] = {pos("u", A | B): 1}
            products[(pos("v", A), pos("w", B))] = {pos("w", A | B): 1}
            products[(pos("w", A), pos("u", B))] = {pos("v", A | B): 1}
    return from_products(2, names, products, name=f"Vstar({n})")


def subalgebra_class_bound(generators: Sequence[str]) -> int:
    """2(r+s+t) для <x, r букв u, s букв v, t букв w>."""
    return 2 * sum(1 for g in generators if g[:1] in LETTERS)


def subalgebra_class(L: LieAlgebra, generators: Sequence[str]) -> tuple[int | None, int]:
    """(класс подалгебры, порождённой generators, её верхняя оценка)."""
    sub = generated_subalgebra(L, [L.basis(g) for g in generators])
    return lie_class(L, sub), subalgebra_class_bound(generators)


# =================== unipotent group G(n) ===================

@dataclass(frozen=True)
class UnipotentContext:
    n: int
    algebra: LieAlgebra
    names: tuple[str, ...]
    matrices: tuple[BitMatrix, ...]

    @cached_property
    def _by_name(self) -> dict[str, BitMatrix]:
        return dict(zip(self.names, self.matrices))

    @property
    def a(self) -> BitMatrix:
        return self._by_name["a"]

    @property
    def identity(self) -> BitMatrix:
        return BitMatrix.identity(self.algebra.dim)

    def generator(self, name: str) -> BitMatrix:
        try:
            return self._by_name[name]
        except KeyError:
            raise LieAlgebraError(f"G({self.n}) has no generator {name!r}") from None

    def family(self, letter: str) -> list[BitMatrix]:
        return [m for name, m in zip(self.names, self.matrices) if name.startswith(letter + "_")]

    def word(self, names: Sequence[str]) -> BitMatrix:
        acc = self.identity
        for name in names:
            acc = acc * self.generator(name)
        return acc


def build_unipotent_group(n: int) -> UnipotentContext:
    """a = 1+ad(x) и 1+ad(z_A) на V*(n); все образующие - инволюции."""
    L = build_Vstar(n)
    names = ["a"] + list(L.basis_names[1:])
    matrices = tuple(BitMatrix.from_array(unipotent(L, L.basis(i))) for i in range(L.dim))
    logger.info("[UNIPOTENT] G(%d): %d generators of degree %d", n, len(matrices), L.dim)
    return UnipotentContext(n, L, tuple(names), matrices)


def dump_context(ctx: UnipotentContext) -> str:
    """Файл алгебры Ли V*(n), затем матрицы образующих построчно (бит 0 слева)."""
    parts = [serialize_lie_algebra(ctx.algebra)]
    for name, m in zip(ctx.names, ctx.matrices):
        parts.append(f"generator {name}\n" + "\n".join(m.dump()) + "\n")
    return "".join(parts)


def matrix_commutator(g: BitMatrix, h: BitMatrix) -> BitMatrix:
    """[g, h] = g^-1 h^-1 g h."""
    return g.inverse() * h.inverse() * g * h


def matrix_conjugate(g: BitMatrix, by: BitMatrix) -> BitMatrix:
    return by.inverse() * g * by


def _random_word(ctx: UnipotentContext, rng: np.random.Generator, max_length: int) -> tuple[str, ...]:
    length = int(rng.integers(1, max_length + 1))
    return tuple(ctx.names[int(i)] for i in rng.integers(0, len(ctx.names), size=length))


def matrix_left_engel_check(ctx: UnipotentContext, n_engel: int, pol: SamplingPolicy) -> VerdictReport:
    """[g, a, ..., a] (n_engel копий a) = 1 на случайных словах g в образующих."""
    if n_engel < 1:
        raise PreconditionViolation("Engel degree must be >= 1")
    if pol.mode == "exhaustive":
        raise PolicyError("exhaustive mode not available for the unipotent group; use sampled")
    rng = pol.rng()
    a = ctx.a
    # первым всегда идёт единица
    words = itertools.chain(
        [()], (_random_word(ctx, rng, pol.max_word_length) for _ in range(pol.samples - 1))
    )

    def test(word: tuple[str, ...]) -> bool:
        acc = ctx.word(word)
        for _ in range(n_engel):
            acc = matrix_commutator(acc, a)
        return acc.is_identity()

    return _evaluate(
        "matrix-left-engel", pol, words, test,
        lambda word: "g = " + (" ".join(word) or "id"),
        {"n": ctx.n, "n_engel": n_engel},
    )


@dataclass
class WitnessReport:
    k: int
    found: bool
    attempts: int
    seed: int
    conjugators: list[list[str]] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.found else "inconclusive"


def nonnilpotence_witness(ctx: UnipotentContext, k: int, pol: SamplingPolicy,
                          attempts: int | None = None) -> WitnessReport:
    """
    Ищет g_1..g_k со словами длины <= 2n, для которых [a^{g_1}, ..., a^{g_k}] != 1.
    Найденный свидетель означает, что класс <a>^G не меньше k.
    """
    if k < 1:
        raise PreconditionViolation("witness depth must be >= 1")
    attempts = attempts or sandwichlab_setting("WITNESS_ATTEMPTS")
    rng = pol.rng()
    max_length = 2 * ctx.n
    a = ctx.a
    for attempt in range(1, attempts + 1):
        words = [_random_word(ctx, rng, max_length) for _ in range(k)]
        conjugates = [matrix_conjugate(a, ctx.word(w)) for w in words]
        acc = conjugates[0]
        for c in conjugates[1:]:
            acc = matrix_commutator(acc, c)
        if not acc.is_identity():
            logger.info("[UNIPOTENT] depth-%d witness in G(%d) after %d attempts", k, ctx.n, attempt)
            return WitnessReport(k, True, attempt, pol.seed, [list(w) for w in words], {"n": ctx.n})
    logger.warning("[UNIPOTENT] no depth-%d witness in G(%d) after %d attempts", k, ctx.n, attempts)
    return WitnessReport(k, False, attempts, pol.seed, details={"n": ctx.n})


# =================== commutator types ===================

@dataclass(frozen=True)
class Leaf:
    symbol: Union[str, int]  # "x" или индекс i у a_i

    def __post_init__(self):
        if self.symbol != "x" and not (isinstance(self.symbol, int) and self.symbol >= 1):
            raise ExpressionSyntaxError(f"leaf must be 'x' or a positive index, got {self.symbol!r}")


@dataclass(frozen=True)
class Node:
    left: "CommutatorTree"
    right: "CommutatorTree"


CommutatorTree = Union[Leaf, Node]

X = Leaf("x")


def left_normed_tree(items: Sequence[CommutatorTree]) -> CommutatorTree:
    if not items:
        raise ExpressionSyntaxError("commutator needs at least one entry")
    acc = items[0]
    for t in items[1:]:
        acc = Node(acc, t)
    return acc


def _leaf(name: str) -> Leaf:
    if name == "x":
        return X
    stem = name[1:].lstrip("_")
    if name[:1] == "a" and stem.isdigit():
        return Leaf(int(stem))
    raise ExpressionSyntaxError(f"commutator leaves are x or a<i>, got {name!r}")


def parse_commutator_tree(text: str) -> CommutatorTree:
    """'[x, a1, [a2, a3]]' -> дерево; вложенные скобки левонормированы."""
    def build(node) -> CommutatorTree:
        if isinstance(node, Name):
            return _leaf(node.name)
        if isinstance(node, Commutator):
            return left_normed_tree([build(item) for item in node.items])
        raise ExpressionSyntaxError("only commutators of x and a<i> have a type")

    return build(parse_expression(text))


def format_commutator_tree(t: CommutatorTree) -> str:
    if isinstance(t, Leaf):
        return "x" if t.symbol == "x" else f"a{t.symbol}"
    items = []
    while isinstance(t, Node):
        items.append(t.right)
        t = t.left
    items.append(t)
    return "[" + ",".join(format_commutator_tree(i) for i in reversed(items)) + "]"


def multi_weight(t: CommutatorTree) -> tuple[int, dict[int, int]]:
    """(число вхождений x, кратности a_i)."""
    m = 0
    e: Counter[int] = Counter()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Node):
            stack.extend((node.left, node.right))
        elif node.symbol == "x":
            m += 1
        else:
            e[node.symbol] += 1
    return m, dict(sorted(e.items()))


def commutator_type(t: CommutatorTree) -> int:
    m, e = multi_weight(t)
    return sum(e.values()) - 2 * m


def killed_by_type(t: CommutatorTree) -> bool:
    """True, если коммутатор убивается: t != x и |тип| >= 2."""
    return t != X and abs(commutator_type(t)) >= 2


def random_commutator_tree(rng: np.random.Generator, leaves: int, max_index: int = 4) -> CommutatorTree:
    if leaves < 1:
        raise ValueError("a tree needs at least one leaf")
    if leaves == 1:
        pick = int(rng.integers(0, max_index + 1))
        return X if pick == 0 else Leaf(pick)
    left = int(rng.integers(1, leaves))
    return Node(random_commutator_tree(rng, left, max_index), random_commutator_tree(rng, leaves - left, max_index))
