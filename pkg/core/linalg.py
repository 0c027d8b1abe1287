# core/linalg.py
"""
Линейная алгебра над GF(p).

Общий случай - numpy-массивы int64 с приведением по модулю p.
Для GF(2) строки упакованы в int (бит j = столбец j): так считаются
замыкания обёртывающей алгебры и матрицы унипотентной группы.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


# =================== GF(p), numpy ===================

def to_gfp(matrix, p: int) -> np.ndarray:
    mat = np.array(matrix, dtype=np.int64)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1)
    return mat % p


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    rank: int
    pivots: tuple[int, ...]


def gfp_row_reduce(matrix, p: int) -> RowReduceResult:
    """Приведённый ступенчатый вид (RREF) по модулю простого p."""
    mat = to_gfp(matrix, p).copy()
    m, n = mat.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(mat[row:, col])[0]
        if not len(nz):
            continue
        pivot = row + int(nz[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        inv = pow(int(mat[row, col]), -1, p)
        mat[row] = (mat[row] * inv) % p
        for r in range(m):
            if r != row and mat[r, col]:
                mat[r] = (mat[r] - mat[r, col] * mat[row]) % p
        pivots.append(col)
        row += 1
    return RowReduceResult(mat, len(pivots), tuple(pivots))


def gfp_rank(matrix, p: int) -> int:
    if np.size(matrix) == 0:
        return 0
    return gfp_row_reduce(matrix, p).rank


def gfp_row_basis(rows, p: int, width: int) -> np.ndarray:
    """Базис линейной оболочки строк (строки RREF без нулевых)."""
    if not len(rows):
        return np.zeros((0, width), dtype=np.int64)
    res = gfp_row_reduce(rows, p)
    return res.matrix[:res.rank]


def gfp_nullspace(matrix, p: int) -> np.ndarray:
    """Базис {v : M v = 0} строками."""
    mat = to_gfp(matrix, p)
    n = mat.shape[1]
    res = gfp_row_reduce(mat, p)
    free = [c for c in range(n) if c not in res.pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, pc in enumerate(res.pivots):
            basis[k, pc] = (-res.matrix[r, f]) % p
    return basis


def gfp_in_rowspan(vec, rows, p: int) -> bool:
    rows = to_gfp(rows, p) if len(rows) else np.zeros((0, np.size(vec)), dtype=np.int64)
    base = gfp_rank(rows, p)
    return gfp_rank(np.vstack([rows, to_gfp(vec, p)]), p) == base


def gfp_subspace_contains(big, small, p: int) -> bool:
    """Лежит ли оболочка строк small в оболочке строк big."""
    if not len(small):
        return True
    if not len(big):
        return not np.any(to_gfp(small, p))
    return gfp_rank(np.vstack([to_gfp(big, p), to_gfp(small, p)]), p) == gfp_rank(big, p)


# =================== GF(2), int bitsets ===================

def gf2_rank(rows: Sequence[int]) -> int:
    return len(Gf2Basis(rows))


class Gf2Basis:
    """Инкрементальный ступенчатый базис: ключ - старший бит строки."""

    def __init__(self, rows: Iterable[int] = ()):
        self._rows: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            row = self._rows.get(top)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self._rows[v.bit_length() - 1] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def vectors(self) -> list[int]:
        return [self._rows[k] for k in sorted(self._rows)]


@dataclass(frozen=True)
class BitMatrix:
    """Квадратная матрица над GF(2); rows[i] бит j = элемент (i, j)."""

    dim: int
    rows: tuple[int, ...]

    @classmethod
    def identity(cls, dim: int) -> "BitMatrix":
        return cls(dim, tuple(1 << i for i in range(dim)))

    @classmethod
    def zero(cls, dim: int) -> "BitMatrix":
        return cls(dim, (0,) * dim)

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        arr = np.array(array, dtype=np.int64) % 2
        dim = arr.shape[0]
        rows = tuple(
            sum(1 << j for j in range(dim) if arr[i, j]) for i in range(dim)
        )
        return cls(dim, rows)

    def to_array(self) -> np.ndarray:
        arr = np.zeros((self.dim, self.dim), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for j in range(self.dim):
                if (row >> j) & 1:
                    arr[i, j] = 1
        return arr

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(self.dim, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def __mul__(self, other: "BitMatrix") -> "BitMatrix":
        out = []
        for row in self.rows:
            acc = 0
            j = 0
            while row:
                if row & 1:
                    acc ^= other.rows[j]
                row >>= 1
                j += 1
            out.append(acc)
        return BitMatrix(self.dim, tuple(out))

    def is_identity(self) -> bool:
        return all(row == 1 << i for i, row in enumerate(self.rows))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def flatten(self) -> int:
        """Вся матрица одним int: строка i занимает биты [i*dim, (i+1)*dim)."""
        acc = 0
        for i, row in enumerate(self.rows):
            acc |= row << (i * self.dim)
        return acc

    def inverse(self) -> "BitMatrix":
        # Гаусс-Жордан на паре (строка, строка единичной)
        work = [[row, 1 << i] for i, row in enumerate(self.rows)]
        for col in range(self.dim):
            pivot = next((r for r in range(col, self.dim) if (work[r][0] >> col) & 1), None)
            if pivot is None:
                raise ValueError("matrix is singular over GF(2)")
            work[col], work[pivot] = work[pivot], work[col]
            for r in range(self.dim):
                if r != col and (work[r][0] >> col) & 1:
                    work[r][0] ^= work[col][0]
                    work[r][1] ^= work[col][1]
        return BitMatrix(self.dim, tuple(inv for _, inv in work))

    def dump(self) -> list[str]:
        """Построчно, бит 0 слева."""
        return ["".join("1" if (row >> j) & 1 else "0" for j in range(self.dim)) for row in self.rows]
