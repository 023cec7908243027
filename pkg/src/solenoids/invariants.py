"""Invariants of the SFT cover: Smith form, Bowen-Franks groups, amalgamation, entropy."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from .axioms import matrix_irreducibility, natural_lengths
from .errors import PreconditionError
from .intmatrix import IntMatrix
from .presentation import PartitionLetter, Presentation, abelianization


@dataclass(frozen=True)
class SftCover:
    """Edge shift of the occurrence matrix, with the partition letters it was built from."""

    matrix: IntMatrix
    alphabet: tuple[PartitionLetter, ...]
    edges: tuple[str, ...]


def build_cover(P: Presentation) -> SftCover:
    return SftCover(abelianization(P), tuple(P.partition_letters()), P.edge_names)


def _as_matrix(A) -> IntMatrix:
    if isinstance(A, SftCover):
        return A.matrix
    if isinstance(A, Presentation):
        return abelianization(A)
    return IntMatrix.of(A)


# ---------------------------------------------------------------- Smith form

def smith_normal_form(A) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ A @ V == D`` and U, V unimodular.

    The diagonal of D is nonnegative and each entry divides the next.
    Pivots are chosen with the smallest absolute value to keep entries small.
    The certificate is re-checked before returning.
    """
    A = IntMatrix.of(A)
    m, n = A.shape
    a = [list(r) for r in A.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row dst += q * row src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(m, n)):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not nonzero:
                break
            _, i, j = min(nonzero)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]

    D, Um, Vm = IntMatrix.of(a), IntMatrix.of(U), IntMatrix.of(V)
    if Um @ A @ Vm != D:
        raise AssertionError("Smith form certificate failed")
    if abs(Um.determinant()) != 1 or abs(Vm.determinant()) != 1:
        raise AssertionError("Smith form transforms are not unimodular")
    return D, Um, Vm


def snf_diagonal(A) -> list[int]:
    D = smith_normal_form(A)[0]
    return [D[i, i] for i in range(min(D.shape))]


# ---------------------------------------------------------------- groups

@dataclass(frozen=True, order=True)
class AbelianGroup:
    """Finitely generated abelian group: invariant factors (each >= 2) and free rank."""

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        t = tuple(self.torsion)
        if any(d < 2 for d in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError("torsion must be a divisibility chain of integers >= 2")
        object.__setattr__(self, "torsion", t)

    @property
    def order(self):
        """Group order, or None when infinite."""
        return math.prod(self.torsion) if self.free_rank == 0 else None

    def __str__(self) -> str:
        parts = [f"Z{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return "+".join(parts) if parts else "0"


def cokernel(A) -> AbelianGroup:
    """Z^n modulo the row lattice of ``A`` (rows act on the right)."""
    A = IntMatrix.of(A)
    diag = snf_diagonal(A)
    zeros = A.ncols - sum(1 for d in diag if d != 0)
    return AbelianGroup(tuple(d for d in diag if d > 1), zeros)


def bf_group(A) -> AbelianGroup:
    """Bowen-Franks group coker(I - A) of a square matrix."""
    A = _as_matrix(A)
    if not A.is_square:
        raise PreconditionError("Bowen-Franks group needs a square matrix")
    return cokernel(IntMatrix.identity(A.nrows) - A)


# ---------------------------------------------------------------- amalgamation

def _first_equal_columns(a):
    n = len(a)
    cols = [tuple(r[j] for r in a) for j in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if cols[i] == cols[j]:
                return i, j
    return None


def _all_equal_columns(a):
    n = len(a)
    cols = [tuple(r[j] for r in a) for j in range(n)]
    return [(i, j) for i in range(n) for j in range(i + 1, n) if cols[i] == cols[j]]


def total_column_amalgamation(A, choose: Callable | None = None) -> IntMatrix:
    """Merge states with identical columns until all columns differ.

    Merging state j into state i adds row j to row i and deletes row and
    column j.  By default the first pair (i < j) in scan order is merged;
    ``choose`` may pick any pair from the list of candidates instead.
    """
    A = _as_matrix(A)
    if not A.is_square or not A.is_nonnegative():
        raise PreconditionError("amalgamation needs a square nonnegative matrix")
    a = [list(r) for r in A.rows]
    labels = list(A.row_labels or [str(i + 1) for i in range(A.nrows)])
    while True:
        if choose is None:
            pair = _first_equal_columns(a)
        else:
            pairs = _all_equal_columns(a)
            pair = choose(pairs) if pairs else None
        if pair is None:
            break
        i, j = pair
        a[i] = [x + y for x, y in zip(a[i], a[j])]
        del a[j]
        for r in a:
            del r[j]
        labels[i] = labels[i] + "+" + labels[j]
        del labels[j]
    return IntMatrix(tuple(map(tuple, a)), tuple(labels), tuple(labels))


def random_amalgamation(A, rng: random.Random) -> IntMatrix:
    """Amalgamate, choosing each merge pair at random."""
    def choose(pairs):
        i, j = rng.choice(pairs)
        return (i, j)
    return total_column_amalgamation(A, choose)


# ---------------------------------------------------------------- entropy, mixing

def entropy(A) -> float:
    """log of the Perron root."""
    M = _as_matrix(A)
    if not matrix_irreducibility(M)[0]:
        raise PreconditionError("entropy is computed for irreducible matrices only")
    return math.log(natural_lengths(M).lam)


def is_mixing(A) -> bool:
    return matrix_irreducibility(_as_matrix(A))[1]


# ---------------------------------------------------------------- permutation equivalence

def matrices_permutation_equivalent(A, B, max_size: int = 10):
    """Find ``perm`` with ``A[perm[i]][perm[j]] == B[i][j]`` for all i, j, or None."""
    A, B = IntMatrix.of(A), IntMatrix.of(B)
    if not (A.is_square and B.is_square):
        raise PreconditionError("square matrices expected")
    n = A.nrows
    if n > max_size or B.nrows > max_size:
        raise PreconditionError(f"permutation search limited to {max_size}x{max_size}")
    if B.nrows != n:
        return None

    def sig(M, i):
        return (M[i, i], tuple(sorted(M.rows[i])), tuple(sorted(M.column(i))))

    sa = [sig(A, i) for i in range(n)]
    sb = [sig(B, i) for i in range(n)]
    if sorted(sa) != sorted(sb):
        return None
    perm = [None] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return True
        for c in range(n):
            if used[c] or sa[c] != sb[i]:
                continue
            if all(A[c, perm[k]] == B[i, k] and A[perm[k], c] == B[k, i] for k in range(i)):
                perm[i], used[c] = c, True
                if extend(i + 1):
                    return True
                used[c] = False
        perm[i] = None
        return False

    return tuple(perm) if extend(0) else None


def count_periodic_points(A, p: int) -> int:
    """trace(A^p): points of period dividing p in the edge shift."""
    return (_as_matrix(A) ** p).trace()
