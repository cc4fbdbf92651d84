"""Exact dense linear algebra over Q or F_p, backed by python-flint."""

from fractions import Fraction

import flint


def _to_flint(field, rows, ncols):
    nrows = len(rows)
    flat = [v for r in rows for v in r]
    if field.p is None:
        return flint.fmpq_mat(nrows, ncols, [flint.fmpq(v.numerator, v.denominator) if isinstance(v, Fraction) else v for v in flat])
    return flint.nmod_mat(nrows, ncols, flat, field.p)


def _from_flint(field, m):
    out = []
    for r in m.tolist():
        if field.p is None:
            out.append([Fraction(int(v.p), int(v.q)) for v in r])
        else:
            out.append([int(v) for v in r])
    return out


def rref(field, rows, ncols):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    if not rows or ncols == 0:
        return [], []
    m, rank = _to_flint(field, rows, ncols).rref()
    red = _from_flint(field, m)[:rank]
    pivots = []
    for r in red:
        for j, v in enumerate(r):
            if v:
                pivots.append(j)
                break
    return red, pivots


def rank(field, rows, ncols):
    if not rows or ncols == 0:
        return 0
    return _to_flint(field, rows, ncols).rank()


def nullspace(field, rows, ncols):
    """Basis (list of vectors) of {v : A v = 0} where A has the given rows."""
    red, pivots = rref(field, rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [field.zero] * ncols
        v[free] = field.one
        for r, pc in zip(red, pivots):
            if r[free]:
                v[pc] = field.neg(r[free])
        basis.append(v)
    return basis


def sparse_nullspace(field, columns, nrows):
    """Nullspace of a matrix given as a list of sparse columns {row: value}."""
    ncols = len(columns)
    if ncols == 0:
        return []
    if nrows == 0:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    rows = [[field.zero] * ncols for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows[i][j] = v
    # drop zero rows early; they carry no constraint
    rows = [r for r in rows if any(r)]
    if not rows:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    return nullspace(field, rows, ncols)


def span_basis(field, vectors, ncols):
    """Row-reduced basis of the span of the given vectors."""
    red, _ = rref(field, [list(v) for v in vectors], ncols)
    return red


def extend_basis(field, base, candidates, ncols):
    """Indices of candidates that extend span(base), chosen greedily in order."""
    chosen = []
    current = [list(v) for v in base]
    r = rank(field, current, ncols) if current else 0
    for idx, v in enumerate(candidates):
        trial = current + [list(v)]
        r2 = rank(field, trial, ncols)
        if r2 > r:
            current = trial
            r = r2
            chosen.append(idx)
    return chosen


def independent_subset(field, base, candidates, ncols):
    """Indices of candidates extending span(base), chosen greedily in order.

    Greedy choice equals the pivot columns of the matrix whose columns are the base
    vectors followed by the candidates."""
    if not candidates or ncols == 0:
        return []
    vecs = [list(v) for v in base] + [list(v) for v in candidates]
    cols = [[v[i] for v in vecs] for i in range(ncols)]
    _, pivots = rref(field, cols, len(vecs))
    nb = len(base)
    return [p - nb for p in pivots if p >= nb]


def solve(field, rows, ncols, rhs):
    """One solution x of A x = rhs, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(field, aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for r, pc in zip(red, pivots):
        x[pc] = r[ncols]
    return x


def matmul(field, a, b):
    if not a or not b:
        return [[field.zero] * (len(b[0]) if b else 0) for _ in a]
    n = len(b[0])
    A = _to_flint(field, a, len(a[0]))
    B = _to_flint(field, b, n)
    return _from_flint(field, A * B)


def det(field, a):
    if not a:
        return field.one
    v = _to_flint(field, a, len(a)).det()
    if field.p is None:
        return Fraction(int(v.p), int(v.q))
    return int(v)


def inverse(field, a):
    m = _to_flint(field, a, len(a))
    return _from_flint(field, m.inv())


def charpoly_factors(field, a):
    """Distinct irreducible factors (coefficient lists, low degree first) of the characteristic polynomial."""
    m = _to_flint(field, a, len(a))
    cp = m.charpoly()
    return poly_factors(field, [_coef(field, c) for c in cp.coeffs()])


def _coef(field, c):
    if field.p is None:
        return Fraction(int(c.p), int(c.q))
    return int(c)


def poly_factors(field, coeffs):
    """Factor a univariate polynomial; returns list of (monic factor coeffs, multiplicity)."""
    if field.p is None:
        P = flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) if isinstance(c, Fraction) else c for c in coeffs])
        _, facs = P.factor()
        out = []
        for fac, e in facs:
            cs = [Fraction(int(c.p), int(c.q)) for c in flint.fmpq_poly(fac).coeffs()]
            lead = cs[-1]
            out.append(([c / lead for c in cs], int(e)))
        return out
    P = flint.nmod_poly([c % field.p for c in coeffs], field.p)
    _, facs = P.factor()
    return [([int(c) for c in fac.coeffs()], int(e)) for fac, e in facs]


def _flint_poly(field, coeffs):
    if field.p is None:
        return flint.fmpq_poly([flint.fmpq(c.numerator, c.denominator) if isinstance(c, Fraction) else c for c in coeffs])
    return flint.nmod_poly([c % field.p for c in coeffs], field.p)


def _poly_coeffs(field, P):
    return [_coef(field, c) for c in P.coeffs()]


def crt_idempotent(field, mu, g):
    """Coefficients of E mod mu with E = 1 mod g and E = 0 mod mu/g (g, mu/g coprime)."""
    M = _flint_poly(field, mu)
    G = _flint_poly(field, g)
    H = M // G
    d, u, v = G.xgcd(H)
    # u G + v H = d (a nonzero constant)
    E = (v * H) % M
    out = _poly_coeffs(field, E)
    dc = _coef(field, d.coeffs()[0])
    inv = field.inv(dc)
    return [field.mul(c, inv) for c in out]


def poly_power(field, coeffs, e):
    return _poly_coeffs(field, _flint_poly(field, coeffs) ** e)
