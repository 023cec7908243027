"""Rectangular matrices over Python's unbounded integers.

Everything here is exact; numpy is deliberately avoided because Smith form
intermediates outgrow 64-bit words on moderately sized inputs.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError


@dataclass(frozen=True)
class IntMatrix:
    """An immutable integer matrix with optional row and column labels."""

    rows: tuple[tuple[int, ...], ...]
    row_labels: tuple[str, ...] = field(default=(), compare=False)
    col_labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        if self.row_labels and len(self.row_labels) != len(rows):
            raise ValueError("row label count does not match")
        if self.col_labels and len(self.col_labels) != self.ncols:
            raise ValueError("column label count does not match")
        for labels in (self.row_labels, self.col_labels):
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be unique")

    @classmethod
    def of(cls, data, row_labels=(), col_labels=()) -> "IntMatrix":
        if isinstance(data, IntMatrix):
            return data
        return cls(tuple(tuple(r) for r in data), tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def from_literal(cls, text: str) -> "IntMatrix":
        """Parse ``[[0,1],[1,1]]`` style literals."""
        try:
            data = ast.literal_eval(text.strip())
        except (ValueError, SyntaxError) as exc:
            raise ParseError(f"malformed matrix literal {text!r}") from exc
        if (not isinstance(data, (list, tuple)) or not data
                or not all(isinstance(r, (list, tuple)) for r in data)
                or not all(isinstance(x, int) and not isinstance(x, bool) for r in data for x in r)):
            raise ParseError(f"matrix literal must be a nonempty list of integer lists: {text!r}")
        try:
            return cls.of(data)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)) if self.rows else (),
                         self.col_labels, self.row_labels)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other.rows))
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                               for r in self.rows))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(tuple(tuple(a - b for a, b in zip(r, s))
                               for r, s in zip(self.rows, other.rows)))

    def __pow__(self, n: int) -> "IntMatrix":
        if not self.is_square or n < 0:
            raise ValueError("power needs a square matrix and n >= 0")
        result, base = IntMatrix.identity(self.nrows), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(min(self.shape)))

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for r in self.rows for x in r)

    def permuted(self, perm: Sequence[int]) -> "IntMatrix":
        """Return P A P^T, i.e. entry (i, j) becomes A[perm[i], perm[j]]."""
        labels = tuple(self.row_labels[p] for p in perm) if self.row_labels else ()
        return IntMatrix(tuple(tuple(self.rows[p][q] for q in perm) for p in perm), labels, labels)

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            return 1
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def literal(self) -> str:
        return "[" + ",".join("[" + ",".join(str(x) for x in r) + "]" for r in self.rows) + "]"

    def __str__(self) -> str:
        return self.literal()
