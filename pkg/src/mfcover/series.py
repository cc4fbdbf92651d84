"""Exact coefficient fields and truncated multivariate power series.

Everything here is immutable. A series lives in a ring (ordered variable names over
a field) and carries a total-degree precision D; only monomials of total degree <= D
are stored.
"""

import random
import re
from fractions import Fraction
from functools import reduce

from sympy import isprime

from . import linalg

DEFAULT_PRIME = 32003
DEFAULT_PREC = 30


class Field:
    """Either the rationals (p is None) or the prime field F_p."""

    def __init__(self, p=None):
        if p is not None:
            p = int(p)
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = 0 if p else Fraction(0)
        self.one = 1 if p else Fraction(1)

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text in ("q", "qq", "rational", "rationals"):
            return cls(None)
        if text.startswith("fp:"):
            return cls(int(text[3:]))
        raise ValueError(f"unknown field {text!r}; use 'q' or 'fp:P'")

    @property
    def name(self):
        return "q" if self.p is None else f"fp:{self.p}"

    def __repr__(self):
        return f"Field({self.name})"

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __call__(self, v):
        if self.p is None:
            return Fraction(v)
        if isinstance(v, Fraction):
            return (v.numerator * pow(v.denominator, -1, self.p)) % self.p
        return int(v) % self.p

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p) if self.p else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def random(self, rng, small=False):
        if self.p is None or small:
            return self(rng.randint(-9, 9))
        return rng.randrange(self.p)

    def check_unit(self, n):
        """Reject characteristics dividing n (needed for cover exponents)."""
        if self.p is not None and n % self.p == 0:
            raise ValueError(f"characteristic {self.p} divides {n}")

    def fmt(self, c):
        if self.p is None:
            return str(c)
        return str(c - self.p if c > self.p // 2 else c)


class Ring:
    """Ring descriptor: ordered variable names over a field."""

    def __init__(self, names, field=None):
        if isinstance(names, str):
            names = [n.strip() for n in names.split(",") if n.strip()]
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("repeated variable name")
        for n in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise ValueError(f"bad variable name {n!r}")
        self.field = field if field is not None else Field(DEFAULT_PRIME)

    @property
    def nvars(self):
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names and self.field == other.field

    def __hash__(self):
        return hash((self.names, self.field))

    def __repr__(self):
        return f"Ring({','.join(self.names)}; {self.field.name})"

    def index(self, name):
        return self.names.index(name)

    def union(self, other):
        if set(self.names) & set(other.names):
            raise ValueError("overlapping variable names")
        if self.field != other.field:
            raise ValueError("field mismatch")
        return Ring(self.names + other.names, self.field)

    def with_var(self, name):
        return Ring(self.names + (name,), self.field)

    def embed_monomial(self, mono, target):
        """Re-key a monomial of this ring into a ring containing all its variables."""
        out = [0] * target.nvars
        for n, e in zip(self.names, mono):
            if e:
                out[target.index(n)] = e
        return tuple(out)


# ---------------------------------------------------------------- raw polynomials
# A raw polynomial is a dict {exponent tuple: nonzero coefficient}; these are the
# work-horse of the higher modules and never truncated implicitly.

def padd(field, a, b):
    out = dict(a)
    for m, c in b.items():
        v = field.add(out.get(m, field.zero), c)
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def psub(field, a, b):
    return padd(field, a, {m: field.neg(c) for m, c in b.items()})


def pscale(field, a, c):
    if not c:
        return {}
    return {m: field.mul(v, c) for m, v in a.items()}


def pmul(field, a, b, maxdeg=None):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            if maxdeg is not None and sum(m) > maxdeg:
                continue
            v = field.add(out.get(m, field.zero), field.mul(c1, c2))
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def pmono(a, mono, c, field):
    """Multiply raw polynomial a by c*mono."""
    return {tuple(x + y for x, y in zip(m, mono)): field.mul(v, c) for m, v in a.items() if field.mul(v, c)}


def wdeg(mono, weights):
    return sum(e * w for e, w in zip(mono, weights))


def homogeneous_degree(poly, weights):
    """Weighted degree if poly is weighted homogeneous and nonzero, else None."""
    degs = {wdeg(m, weights) for m in poly}
    return degs.pop() if len(degs) == 1 else None


_MONO_CACHE = {}


def monomials_of_weight(weights, d):
    """All exponent tuples of weighted degree exactly d (weights positive integers)."""
    key = (tuple(weights), d)
    if key in _MONO_CACHE:
        return _MONO_CACHE[key]
    out = []

    def rec(i, rem, acc):
        if i == len(weights) - 1:
            if rem % weights[i] == 0:
                out.append(tuple(acc + [rem // weights[i]]))
            return
        for e in range(rem // weights[i] + 1):
            rec(i + 1, rem - e * weights[i], acc + [e])

    if d >= 0 and weights:
        rec(0, d, [])
    elif d == 0:
        out.append(())
    out.sort(key=grevlex_key, reverse=True)
    _MONO_CACHE[key] = out
    return out


def monomials_up_to(nvars, D):
    return [m for d in range(D + 1) for m in monomials_of_weight([1] * nvars, d)]


def grevlex_key(mono):
    return (sum(mono), tuple(-e for e in reversed(mono)))


# ---------------------------------------------------------------- series

class TruncatedSeries:
    """Element of k[[x_1..x_v]] known exactly up to total degree prec."""

    __slots__ = ("ring", "prec", "terms")

    def __init__(self, ring, prec, terms=None):
        if prec < 0:
            raise ValueError("precision must be non-negative")
        self.ring = ring
        self.prec = int(prec)
        f = ring.field
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != ring.nvars:
                raise ValueError("monomial length does not match ring")
            if sum(m) > prec:
                continue
            c = f(c) if not isinstance(c, (int, Fraction)) or (f.p and not 0 <= c < f.p) else c
            if f.p is None and not isinstance(c, Fraction):
                c = Fraction(c)
            if c:
                clean[m] = c
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, ring, prec=DEFAULT_PREC):
        return cls(ring, prec, {})

    @classmethod
    def constant(cls, ring, c, prec=DEFAULT_PREC):
        return cls(ring, prec, {(0,) * ring.nvars: ring.field(c)})

    @classmethod
    def one(cls, ring, prec=DEFAULT_PREC):
        return cls.constant(ring, 1, prec)

    @classmethod
    def var(cls, ring, name, prec=DEFAULT_PREC, power=1):
        m = [0] * ring.nvars
        m[ring.index(name)] = power
        return cls(ring, prec, {tuple(m): 1})

    @classmethod
    def parse(cls, text, ring, prec=DEFAULT_PREC):
        return cls(ring, prec, parse_poly(text, ring))

    # basic protocol
    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        if self.prec != other.prec:
            raise ValueError("precision mismatch")

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.constant(self.ring, other, self.prec)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.ring, self.prec, padd(self.ring.field, self.terms, other.terms))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return TruncatedSeries(self.ring, self.prec, psub(self.ring.field, self.terms, other.terms))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        f = self.ring.field
        return TruncatedSeries(self.ring, self.prec, {m: f.neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        return TruncatedSeries(self.ring, self.prec, pmul(self.ring.field, self.terms, other.terms, self.prec))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = TruncatedSeries.one(self.ring, self.prec)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c):
        return TruncatedSeries(self.ring, self.prec, pscale(self.ring.field, self.terms, self.ring.field(c)))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.constant(self.ring, other, self.prec)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ring == other.ring and self.prec == other.prec and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.prec, frozenset(self.terms.items())))

    def __repr__(self):
        return f"TruncatedSeries({self}, prec={self.prec})"

    def __str__(self):
        return format_poly(self.terms, self.ring)

    # queries
    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def valuation(self):
        """Lowest total degree present (prec+1 for zero)."""
        return min((sum(m) for m in self.terms), default=self.prec + 1)

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def weighted_degree(self, weights):
        return homogeneous_degree(self.terms, weights)

    def truncate(self, D):
        if D > self.prec:
            raise ValueError("cannot raise precision by truncation")
        return TruncatedSeries(self.ring, D, self.terms)

    def with_prec(self, D):
        """Change precision; only legal when no information is lost or invented."""
        if D < self.prec:
            return self.truncate(D)
        return TruncatedSeries(self.ring, D, self.terms)

    def is_polynomial_exact(self):
        return self.degree() < self.prec

    def embed(self, ring):
        return TruncatedSeries(ring, self.prec, {self.ring.embed_monomial(m, ring): c for m, c in self.terms.items()})

    def subs_zero(self, name):
        """Set one variable to zero."""
        i = self.ring.index(name)
        return TruncatedSeries(self.ring, self.prec, {m: c for m, c in self.terms.items() if m[i] == 0})

    def drop_var(self, name):
        """Restrict to the ring without `name` after setting it to zero."""
        i = self.ring.index(name)
        names = tuple(n for n in self.ring.names if n != name)
        r = Ring(names, self.ring.field)
        return TruncatedSeries(r, self.prec, {m[:i] + m[i + 1:]: c for m, c in self.terms.items() if m[i] == 0})


# ---------------------------------------------------------------- text format

_TERM = re.compile(r"[+-]?[^+-]+")


def parse_poly(text, ring):
    """Parse `c*x^a*y^b` terms joined by +/-; returns a raw polynomial."""
    f = ring.field
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    out = {}
    pos = 0
    for tok in _TERM.finditer(s):
        if tok.start() != pos:
            raise ValueError(f"cannot parse {text!r}")
        pos = tok.end()
        t = tok.group()
        sign = 1
        if t[0] in "+-":
            sign = -1 if t[0] == "-" else 1
            t = t[1:]
        if not t:
            raise ValueError(f"dangling sign in {text!r}")
        coef = Fraction(1)
        mono = [0] * ring.nvars
        for factor in t.split("*"):
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coef *= Fraction(factor)
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(\^(\d+))?", factor)
            if not m:
                raise ValueError(f"bad factor {factor!r}")
            name = m.group(1)
            if name not in ring.names:
                raise ValueError(f"unknown variable {name!r}")
            mono[ring.index(name)] += int(m.group(3)) if m.group(3) else 1
        if f.p is not None and coef.denominator % f.p == 0:
            raise ValueError("coefficient denominator vanishes in the field")
        c = f(sign * coef)
        key = tuple(mono)
        v = f.add(out.get(key, f.zero), c)
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    if pos != len(s):
        raise ValueError(f"cannot parse {text!r}")
    return out


def format_poly(terms, ring):
    if not terms:
        return "0"
    f = ring.field
    parts = []
    for m in sorted(terms, key=grevlex_key, reverse=True):
        c = f.fmt(terms[m])
        neg = c.startswith("-")
        if neg:
            c = c[1:]
        factors = []
        for n, e in zip(ring.names, m):
            if e == 1:
                factors.append(n)
            elif e > 1:
                factors.append(f"{n}^{e}")
        if c != "1" or not factors:
            factors.insert(0, c)
        body = "*".join(factors)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("-" if neg else "+") + body)
    return "".join(parts)


# ---------------------------------------------------------------- operations

def series_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def invert_unit(a):
    """Inverse of a series with nonzero constant term, up to its precision."""
    f = a.ring.field
    c = a.constant_term()
    if not c:
        raise ValueError("not a unit: constant term is zero")
    cinv = f.inv(c)
    # a = c (1 - g) with g of positive order; 1/a = c^-1 sum g^k
    g = (TruncatedSeries.one(a.ring, a.prec) - a.scale(cinv))
    out = TruncatedSeries.one(a.ring, a.prec)
    power = TruncatedSeries.one(a.ring, a.prec)
    for _ in range(a.prec):
        power = power * g
        if power.is_zero():
            break
        out = out + power
    return out.scale(cinv)


class SeriesMatrix:
    """Rectangular matrix of TruncatedSeries over one ring and precision."""

    __slots__ = ("ring", "prec", "rows", "cols", "entries")

    def __init__(self, entries, ring=None, prec=None, shape=None):
        entries = [list(r) for r in entries]
        if shape is not None:
            nr, nc = shape
        else:
            nr = len(entries)
            nc = len(entries[0]) if entries else 0
        for r in entries:
            if len(r) != nc:
                raise ValueError("ragged matrix")
        if ring is None or prec is None:
            if not entries or not entries[0]:
                raise ValueError("empty matrix needs ring and precision")
            ring = entries[0][0].ring
            prec = entries[0][0].prec
        for r in entries:
            for e in r:
                if e.ring != ring or e.prec != prec:
                    raise ValueError("entries must share ring and precision")
        self.ring = ring
        self.prec = prec
        self.rows = nr
        self.cols = nc
        self.entries = tuple(tuple(r) for r in entries)

    @classmethod
    def from_raw(cls, raw, ring, prec, shape=None):
        return cls([[TruncatedSeries(ring, prec, e) for e in r] for r in raw], ring, prec,
                   shape=shape if shape is not None else (len(raw), len(raw[0]) if raw else 0))

    @classmethod
    def parse(cls, rows, ring, prec=DEFAULT_PREC):
        return cls([[TruncatedSeries.parse(s, ring, prec) for s in r] for r in rows], ring, prec)

    @classmethod
    def identity(cls, n, ring, prec=DEFAULT_PREC):
        return cls([[TruncatedSeries.constant(ring, 1 if i == j else 0, prec) for j in range(n)] for i in range(n)],
                   ring, prec, shape=(n, n))

    @classmethod
    def zeros(cls, r, c, ring, prec=DEFAULT_PREC):
        z = TruncatedSeries.zero(ring, prec)
        return cls([[z] * c for _ in range(r)], ring, prec, shape=(r, c))

    def raw(self):
        return [[e.terms for e in r] for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (isinstance(other, SeriesMatrix) and self.ring == other.ring and self.prec == other.prec
                and self.entries == other.entries)

    def __hash__(self):
        return hash(self.entries)

    def __matmul__(self, other):
        return matrix_product(self, other)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return SeriesMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
                            self.ring, self.prec, shape=(self.rows, self.cols))

    def __neg__(self):
        return SeriesMatrix([[-a for a in r] for r in self.entries], self.ring, self.prec, shape=(self.rows, self.cols))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return SeriesMatrix([[a * s for a in r] for r in self.entries], self.ring, self.prec,
                            shape=(self.rows, self.cols))

    def transpose(self):
        return SeriesMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
                            self.ring, self.prec, shape=(self.cols, self.rows))

    def truncate(self, D):
        return SeriesMatrix([[a.truncate(D) for a in r] for r in self.entries], self.ring, D,
                            shape=(self.rows, self.cols))

    def to_strings(self):
        return [[str(e) for e in r] for r in self.entries]

    def __repr__(self):
        return "SeriesMatrix(" + repr(self.to_strings()) + ")"


def matrix_product(A, B):
    if A.cols != B.rows:
        raise ValueError("dimension mismatch")
    if A.ring != B.ring or A.prec != B.prec:
        raise ValueError("ring or precision mismatch")
    f = A.ring.field
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = {}
            for k in range(A.cols):
                a = A.entries[i][k].terms
                b = B.entries[k][j].terms
                if a and b:
                    acc = padd(f, acc, pmul(f, a, b, A.prec))
            row.append(TruncatedSeries(A.ring, A.prec, acc))
        out.append(row)
    return SeriesMatrix(out, A.ring, A.prec, shape=(A.rows, B.cols))


def block_matrix(blocks, ring, prec):
    """Assemble a matrix from a grid of SeriesMatrix blocks."""
    rows = []
    for brow in blocks:
        h = brow[0].rows
        for i in range(h):
            row = []
            for b in brow:
                if b.rows != h:
                    raise ValueError("block heights differ")
                row.extend(b.entries[i])
            rows.append(row)
    nc = sum(b.cols for b in blocks[0]) if blocks else 0
    return SeriesMatrix(rows, ring, prec, shape=(len(rows), nc))


def graded_solve(constraints, ring, D, nunknowns=None, weights=None, degrees=None, modulo=(), prec=None):
    """k-basis of solutions of a linear system in unknown series.

    Each constraint is a dict {unknown index: TruncatedSeries coefficient} meaning
    sum(coeff * u_i) = 0. Unknown u_i ranges over polynomials of total degree <= D,
    or over weighted-homogeneous polynomials of degree degrees[i] when weights are
    given. Monomials in the monomial ideal `modulo` are set to zero in both the
    unknowns and the products; otherwise products are exact.
    """
    f = ring.field
    if nunknowns is None:
        nunknowns = 1 + max((i for c in constraints for i in c), default=-1)
    ideal = [tuple(m) if not isinstance(m, TruncatedSeries) else next(iter(m.terms)) for m in modulo]

    def killed(m):
        return any(all(a >= b for a, b in zip(m, g)) for g in ideal)

    supports = []
    for i in range(nunknowns):
        if weights is not None:
            mons = monomials_of_weight(weights, degrees[i])
        else:
            mons = monomials_up_to(ring.nvars, D)
        supports.append([m for m in mons if not killed(m)])
    columns = []
    rowkeys = {}
    for i, mons in enumerate(supports):
        for m in mons:
            col = {}
            for ci, con in enumerate(constraints):
                coeff = con.get(i)
                if coeff is None:
                    continue
                for mm, c in coeff.terms.items():
                    prod = tuple(a + b for a, b in zip(mm, m))
                    if killed(prod):
                        continue
                    key = rowkeys.setdefault((ci, prod), len(rowkeys))
                    v = f.add(col.get(key, f.zero), c)
                    if v:
                        col[key] = v
                    else:
                        col.pop(key, None)
            columns.append(col)
    basis = linalg.sparse_nullspace(f, columns, len(rowkeys))
    out_prec = prec if prec is not None else max(D, max((sum(m) for s in supports for m in s), default=0))
    sols = []
    for vec in basis:
        pos = 0
        sol = []
        for mons in supports:
            terms = {}
            for m in mons:
                if vec[pos]:
                    terms[m] = vec[pos]
                pos += 1
            sol.append(TruncatedSeries(ring, out_prec, terms))
        sols.append(tuple(sol))
    return sols


def random_series(ring, prec, rng, density=0.5, maxdeg=None, small=True):
    maxdeg = prec if maxdeg is None else maxdeg
    terms = {}
    for m in monomials_up_to(ring.nvars, maxdeg):
        if rng.random() < density:
            terms[m] = ring.field.random(rng, small=small)
    return TruncatedSeries(ring, prec, terms)


def make_rng(seed):
    return random.Random(seed)


def prod(xs, start):
    return reduce(lambda a, b: a * b, xs, start)
