"""Exact integer matrices and the bimatrix type.

Conventions used throughout the package:

- A vector is a plain tuple of Python ints.  Python ints are unbounded,
  so every operation here is exact; there is no overflow to detect.
- An IntegerMatrix stores its entries row-major as a flat tuple.
- A bimatrix pairs two blocks sharing a column count t: the top block
  (r x t) is repeated across the top of the n-fold product, the bottom
  block (s x t) sits on the block diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError

IntVector = tuple[int, ...]


def as_vector(coords: Iterable[int]) -> IntVector:
    return tuple(int(c) for c in coords)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def vec_add(u: IntVector, v: IntVector) -> IntVector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: IntVector, v: IntVector) -> IntVector:
    return tuple(a - b for a, b in zip(u, v))


def vec_neg(u: IntVector) -> IntVector:
    return tuple(-a for a in u)


def vec_scale(c: int, u: IntVector) -> IntVector:
    return tuple(c * a for a in u)


def norm_1(u: Sequence[int]) -> int:
    return sum(abs(a) for a in u)


def norm_inf(u: Sequence[int]) -> int:
    return max((abs(a) for a in u), default=0)


def conforms(u: Sequence[int], v: Sequence[int]) -> bool:
    """Sign-compatible coordinatewise domination: u_i v_i >= 0 and |u_i| <= |v_i|.

    This is the partial order under which Graver bases are the minimal
    nonzero kernel elements.
    """
    for a, b in zip(u, v):
        if a * b < 0 or abs(a) > abs(b):
            return False
    return True


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense exact integer matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise InputError(
                f"matrix needs {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegerMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise InputError("ragged matrix rows")
            flat.extend(int(x) for x in r)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def row(self, i: int) -> IntVector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_list(self) -> list[IntVector]:
        cached = getattr(self, "_rows", None)
        if cached is None:
            cached = [self.row(i) for i in range(self.rows)]
            object.__setattr__(self, "_rows", cached)
        return cached

    def column(self, j: int) -> IntVector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def matvec(self, v: Sequence[int]) -> IntVector:
        if len(v) != self.cols:
            raise InputError(f"matvec: vector length {len(v)} != cols {self.cols}")
        return tuple(dot(r, v) for r in self.row_list())

    def matmul(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise InputError("matmul: inner dimensions differ")
        cols = [other.column(j) for j in range(other.cols)]
        flat = []
        for i in range(self.rows):
            r = self.row(i)
            flat.extend(dot(r, c) for c in cols)
        return IntegerMatrix(self.rows, other.cols, tuple(flat))

    def hstack(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.rows != other.rows:
            raise InputError("hstack: row counts differ")
        flat = []
        for i in range(self.rows):
            flat.extend(self.row(i))
            flat.extend(other.row(i))
        return IntegerMatrix(self.rows, self.cols + other.cols, tuple(flat))

    def vstack(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.cols:
            raise InputError("vstack: column counts differ")
        return IntegerMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def max_abs(self) -> int:
        return max((abs(e) for e in self.entries), default=0)


@dataclass(frozen=True)
class Bimatrix:
    """The fixed (r,s) x t block pair defining an n-fold family."""

    a1: IntegerMatrix
    a2: IntegerMatrix

    def __post_init__(self):
        if self.a1.cols != self.a2.cols:
            raise InputError("bimatrix blocks must share a column count")
        if self.a2.rows < 1 or self.a2.cols < 1:
            raise InputError("bottom block needs at least one row and one column")

    @property
    def r(self) -> int:
        return self.a1.rows

    @property
    def s(self) -> int:
        return self.a2.rows

    @property
    def t(self) -> int:
        return self.a1.cols

    def cache_key(self) -> tuple:
        return (self.r, self.s, self.t, self.a1.entries, self.a2.entries)


def split_bricks(x: Sequence[int], n: int, t: int) -> list[IntVector]:
    if len(x) != n * t:
        raise InputError(f"expected {n * t} coordinates, got {len(x)}")
    return [tuple(x[i * t:(i + 1) * t]) for i in range(n)]


def join_bricks(bricks: Sequence[Sequence[int]]) -> IntVector:
    out: list[int] = []
    for b in bricks:
        out.extend(b)
    return tuple(out)
