"""Small helpers for matrices of raw polynomials (lists of lists of dicts)."""

from .series import SeriesMatrix, padd, pmul, pscale, psub


def zeros(r, c):
    return [[{} for _ in range(c)] for _ in range(r)]


def identity(n, nvars, field):
    one = (0,) * nvars
    return [[{one: field.one} if i == j else {} for j in range(n)] for i in range(n)]


def mul(field, A, B):
    if not A:
        return []
    n, k = len(A), len(A[0])
    m = len(B[0]) if B else 0
    out = zeros(n, m)
    for i in range(n):
        Ai = A[i]
        for t in range(k):
            a = Ai[t]
            if not a:
                continue
            Bt = B[t]
            for j in range(m):
                b = Bt[j]
                if b:
                    out[i][j] = padd(field, out[i][j], pmul(field, a, b))
    return out


def add(field, A, B):
    return [[padd(field, a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(field, A, B):
    return [[psub(field, a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(field, A, c):
    return [[pscale(field, a, c) for a in r] for r in A]


def const(field, A, nvars):
    z = (0,) * nvars
    return [[a.get(z, field.zero) for a in r] for r in A]


def is_zero(A):
    return all(not a for r in A for a in r)


def to_series(A, ring, prec):
    n = len(A)
    m = len(A[0]) if A else 0
    return SeriesMatrix.from_raw(A, ring, prec, shape=(n, m))


def submatrix(A, rows, cols):
    return [[A[i][j] for j in cols] for i in rows]


def columns(A, cols):
    return [[r[j] for j in cols] for r in A]
