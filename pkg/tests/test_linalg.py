import random

import sympy

from mfcover import linalg
from mfcover.series import Field


def rand_matrix(f, rng, r, c, density=0.6):
    return [[f.random(rng) if rng.random() < density else f.zero for _ in range(c)] for _ in range(r)]


def test_rank_and_nullspace_vs_sympy():
    f = Field(None)
    rng = random.Random(1)
    for _ in range(10):
        r, c = rng.randint(1, 5), rng.randint(1, 6)
        A = [[rng.randint(-2, 2) if rng.random() < 0.6 else 0 for _ in range(c)] for _ in range(r)]
        A = [[f(v) for v in row] for row in A]
        S = sympy.Matrix(A)
        assert linalg.rank(f, A, c) == S.rank()
        N = linalg.nullspace(f, A, c)
        assert len(N) == len(S.nullspace())
        for v in N:
            assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)


def test_nullspace_mod_p():
    f = Field(32003)
    rng = random.Random(2)
    A = rand_matrix(f, rng, 4, 7)
    N = linalg.nullspace(f, A, 7)
    assert len(N) == 7 - linalg.rank(f, A, 7)
    for v in N:
        for row in A:
            acc = f.zero
            for a, b in zip(row, v):
                acc = f.add(acc, f.mul(a, b))
            assert acc == f.zero


def test_independent_subset_greedy():
    f = Field(32003)
    base = [[1, 0, 0]]
    cands = [[2, 0, 0], [0, 1, 0], [0, 3, 0], [1, 1, 1]]
    assert linalg.independent_subset(f, base, cands, 3) == [1, 3]
    assert linalg.independent_subset(f, [], [], 3) == []


def test_solve_and_inverse():
    f = Field(32003)
    A = [[2, 1], [1, 1]]
    x = linalg.solve(f, A, 2, [3, 2])
    assert x == [1, 1]
    assert linalg.solve(f, [[1, 1], [1, 1]], 2, [0, 1]) is None
    Ai = linalg.inverse(f, A)
    assert linalg.matmul(f, A, Ai) == [[1, 0], [0, 1]]


def test_crt_idempotent():
    f = Field(32003)
    # mu = (t-1)(t-2): idempotent for the factor t-1 is E = -(t-2) = 2 - t
    mu = [2, -3 % 32003, 1]
    g = [f.neg(1), 1]
    E = linalg.crt_idempotent(f, mu, g)
    assert E == [2, f.neg(1)]
    # E^2 = E mod mu
    sq = linalg.poly_power(f, E, 2)
    t = sympy.symbols("t")
    P = sympy.Poly(list(reversed(sq)), t, modulus=32003)
    Q = sympy.Poly(list(reversed(E)), t, modulus=32003)
    M = sympy.Poly(list(reversed(mu)), t, modulus=32003)
    assert (P - Q).rem(M).is_zero
