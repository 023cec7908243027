import math
import random

import numpy as np
import pytest

from solenoids import IntMatrix, PreconditionError, abelianization, bf_group, load_fixture
from solenoids.invariants import (AbelianGroup, cokernel, count_periodic_points, entropy, is_mixing,
                                  matrices_permutation_equivalent, random_amalgamation,
                                  smith_normal_form, total_column_amalgamation)

FIXTURES = ["circle_square", "swap_four_edge", "wedge_aab", "swap_fixed_point", "wedge_conjugate",
            "pair_g1", "pair_g2", "wedge_efff", "wedge_efff_refined", "eight_edge", "swap_smooth"]


def test_snf_certificates_on_random_matrices():
    rng = random.Random(500)
    for _ in range(500):
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        A = IntMatrix.of([[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        D, U, V = smith_normal_form(A)
        assert U @ A @ V == D
        assert abs(U.determinant()) == 1 and abs(V.determinant()) == 1
        diag = [D[i, i] for i in range(min(m, n))]
        assert all(D[i, j] == 0 for i in range(m) for j in range(n) if i != j)
        assert all(d >= 0 for d in diag)
        nz = [d for d in diag if d]
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        assert diag[:len(nz)] == nz


def adjugate(A):
    A = np.array(A, dtype=np.int64)
    n = len(A)
    adj = np.zeros_like(A)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(A, i, 0), j, 1)
            adj[j, i] = (-1) ** (i + j) * round(np.linalg.det(minor))
    return adj


def killed_by(A, k):
    """Brute force |{x in Z^n / rowspace(A) : kx = 0}| for nonsingular A.

    x lies in the row lattice iff x adj(A) = 0 mod det.  Every class has
    d^(n-1) representatives in (Z/d)^n, d = |det A|.
    """
    n = len(A)
    d = abs(round(np.linalg.det(np.array(A, dtype=float))))
    adj = adjugate(A)
    grid = np.stack(np.meshgrid(*[np.arange(d)] * n, indexing="ij"), -1).reshape(-1, n)
    hits = np.all((k * grid) @ adj % d == 0, axis=1).sum()
    return hits // d ** (n - 1)


def test_cokernel_matches_lattice_oracle():
    rng = random.Random(33)
    done = 0
    while done < 40:
        A = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
        d = abs(round(np.linalg.det(np.array(A, dtype=float))))
        if not 1 <= d <= 24:
            continue
        G = cokernel(A)
        assert G.free_rank == 0 and G.order == d
        for k in range(1, d + 1):
            assert killed_by(A, k) == math.prod(math.gcd(k, t) for t in G.torsion)
        done += 1


@pytest.mark.parametrize("A, expected", [
    ([[1]], "Z"),
    ([[2, 1], [1, 1]], "0"),
    ([[1, 0], [0, 1]], "Z^2"),
    ([[3]], "Z2"),
    ([[1, 1], [1, 1]], "0"),
    ([[1, 0], [0, 3]], "Z2+Z"),
    ([[3, 0], [0, 5]], "Z2+Z4"),
    ([[0, 1, 0], [3, 1, 1], [5, 3, 1]], "Z8"),
])
def test_bf_group_values(A, expected):
    assert str(bf_group(A)) == expected


def test_abelian_group_validation():
    assert str(AbelianGroup((2, 4), 1)) == "Z2+Z4+Z"
    with pytest.raises(ValueError):
        AbelianGroup((4, 2))


@pytest.mark.parametrize("name", FIXTURES)
def test_amalgamation_confluent(name):
    M = abelianization(load_fixture(name))
    base = total_column_amalgamation(M)
    rng = random.Random(name)
    for _ in range(50):
        assert matrices_permutation_equivalent(random_amalgamation(M, rng), base) is not None


def test_amalgamation_confluent_with_many_merges():
    M = IntMatrix.of([[1, 1, 0, 1, 0], [0, 0, 1, 0, 1], [1, 1, 0, 1, 0], [2, 2, 1, 2, 1], [0, 0, 1, 0, 1]])
    base = total_column_amalgamation(M)
    assert base.nrows == 2
    rng = random.Random(7)
    for _ in range(50):
        assert matrices_permutation_equivalent(random_amalgamation(M, rng), base) is not None


def test_amalgamation_result_has_distinct_columns():
    M = total_column_amalgamation([[0, 1, 1, 0], [0, 0, 0, 1], [1, 0, 0, 2], [1, 1, 1, 1]])
    cols = [M.column(j) for j in range(M.ncols)]
    assert len(set(cols)) == len(cols)
    assert M.tolist() == [[0, 1, 0], [1, 0, 3], [1, 1, 1]]


def test_permutation_equivalence():
    A = IntMatrix.of([[1, 2, 0], [0, 0, 1], [3, 0, 1]])
    perm = [2, 0, 1]
    B = A.permuted(perm)
    found = matrices_permutation_equivalent(A, B)
    assert found is not None
    assert all(A[found[i], found[j]] == B[i, j] for i in range(3) for j in range(3))
    assert matrices_permutation_equivalent(A, A.transpose()) is None


def test_entropy_and_mixing():
    assert entropy([[2]]) == pytest.approx(math.log(2))
    assert entropy([[1, 1], [1, 0]]) == pytest.approx(math.log((1 + 5 ** 0.5) / 2))
    assert is_mixing([[1, 1], [1, 0]]) and not is_mixing([[0, 1], [1, 0]])
    with pytest.raises(PreconditionError):
        entropy([[1, 1], [0, 1]])


def test_periodic_point_counts():
    assert [count_periodic_points([[1, 1], [1, 0]], p) for p in range(1, 6)] == [1, 3, 4, 7, 11]
