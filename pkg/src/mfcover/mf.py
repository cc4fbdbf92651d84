"""Matrix factorizations: validation, syzygy, sums, Yoshino's tensor product,
branched covers, extension blocks and quotient presentations.
"""

from dataclasses import dataclass, field as dc_field

from . import graded
from .series import (DEFAULT_PREC, Field, Ring, SeriesMatrix, TruncatedSeries, block_matrix,
                     format_poly, invert_unit, matrix_product, parse_poly, pmul, padd)


class MatrixFactorization:
    """Pair (phi, psi) of square matrices with phi*psi = psi*phi = f*I."""

    def __init__(self, phi, psi, potential, name=None):
        if (phi.rows, phi.cols) != (psi.cols, psi.rows) or phi.rows != phi.cols:
            raise ValueError("phi and psi must be square of the same size")
        if phi.ring != psi.ring or phi.ring != potential.ring:
            raise ValueError("ring mismatch")
        if phi.prec != psi.prec or phi.prec != potential.prec:
            raise ValueError("precision mismatch")
        if potential.is_zero() or potential.constant_term():
            raise ValueError("potential must be a nonzero non-unit")
        self.phi = phi
        self.psi = psi
        self.potential = potential
        self.name = name
        self._grading = None

    @property
    def ring(self):
        return self.phi.ring

    @property
    def field(self):
        return self.phi.ring.field

    @property
    def prec(self):
        return self.phi.prec

    @property
    def size(self):
        return self.phi.rows

    @property
    def reduced(self):
        return all(not e.constant_term() for m in (self.phi, self.psi) for r in m.entries for e in r)

    def __eq__(self, other):
        return (isinstance(other, MatrixFactorization) and self.phi == other.phi and self.psi == other.psi
                and self.potential == other.potential)

    def __hash__(self):
        return hash((self.phi, self.psi))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<MF{label} size={self.size} f={self.potential}>"

    def named(self, name):
        X = MatrixFactorization(self.phi, self.psi, self.potential, name)
        X._grading = self._grading
        return X

    @classmethod
    def from_strings(cls, phi, psi, potential, ring, prec=DEFAULT_PREC, name=None):
        if isinstance(ring, str):
            ring = Ring(ring)
        n = len(phi)
        P = SeriesMatrix.parse(phi, ring, prec) if n else SeriesMatrix.zeros(0, 0, ring, prec)
        Q = SeriesMatrix.parse(psi, ring, prec) if n else SeriesMatrix.zeros(0, 0, ring, prec)
        return cls(P, Q, TruncatedSeries.parse(potential, ring, prec), name)

    @classmethod
    def zero_size(cls, potential):
        z = SeriesMatrix.zeros(0, 0, potential.ring, potential.prec)
        return cls(z, z, potential)

    @classmethod
    def trivial(cls, potential, free=True):
        """(f,1) when free (cokernel R) else (1,f) (cokernel zero)."""
        one = TruncatedSeries.one(potential.ring, potential.prec)
        a, b = (potential, one) if free else (one, potential)
        return cls(SeriesMatrix([[a]]), SeriesMatrix([[b]]), potential)

    # grading -------------------------------------------------------------
    def weights(self):
        return potential_weights(self.potential)

    def grading(self):
        """(weights, deg f, row degrees a, column degrees b) of phi; raises NotGraded."""
        if self._grading is None:
            w, wf = self.weights()
            a, b = graded.infer_degrees(self.phi.raw(), self.psi.raw(), w, wf)
            self._grading = (w, wf, a, b)
        return self._grading

    def is_graded(self):
        try:
            self.grading()
            return True
        except graded.NotGraded:
            return False

    def to_text(self):
        return format_mf(self)


_WEIGHT_CACHE = {}


def potential_weights(potential):
    key = (potential.ring.names, frozenset(potential.terms.items()))
    if key not in _WEIGHT_CACHE:
        _WEIGHT_CACHE[key] = graded.infer_weights(potential.terms, potential.ring.nvars)
    return _WEIGHT_CACHE[key]


@dataclass
class ValidationReport:
    valid: bool
    reduced: bool
    failures: list = dc_field(default_factory=list)

    def as_dict(self):
        return {"valid": self.valid, "reduced": self.reduced, "failures": self.failures}


@dataclass
class ModulePresentation:
    """cok P over S/(potential): rows are generators, columns relations."""
    matrix: SeriesMatrix
    potential: TruncatedSeries
    label: str = ""

    @property
    def ring(self):
        return self.matrix.ring

    @property
    def prec(self):
        return self.matrix.prec

    @property
    def generators(self):
        return self.matrix.rows

    def eliminate(self, name):
        """Set one variable to zero; the result lives over the smaller ring."""
        P = self.matrix
        cols = []
        for j in range(P.cols):
            col = [P.entries[i][j].drop_var(name) for i in range(P.rows)]
            if any(not c.is_zero() for c in col):
                cols.append(col)
        f = self.potential.drop_var(name)
        ring = f.ring
        if cols:
            M = SeriesMatrix([[cols[j][i] for j in range(len(cols))] for i in range(P.rows)], ring, P.prec)
        else:
            M = SeriesMatrix.zeros(P.rows, 0, ring, P.prec)
        return ModulePresentation(M, f, self.label + f"|{name}=0")


@dataclass(frozen=True)
class BranchedCoverSpec:
    base_potential: TruncatedSeries
    n: int
    var: str = "y"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("cover exponent must be at least 2")
        self.base_potential.ring.field.check_unit(self.n)
        if self.var in self.base_potential.ring.names:
            raise ValueError("cover variable already in the base ring")

    @property
    def cover_ring(self):
        return self.base_potential.ring.with_var(self.var)

    @property
    def cover_potential(self):
        R = self.cover_ring
        f = self.base_potential.embed(R)
        return f + TruncatedSeries.var(R, self.var, f.prec, self.n)


# ---------------------------------------------------------------- operations

def validate(X):
    f = X.field
    n = X.size
    failures = []
    fI = X.potential.terms
    for name, A, B in (("phi*psi", X.phi, X.psi), ("psi*phi", X.psi, X.phi)):
        prod = matrix_product(A, B)
        for i in range(n):
            for j in range(n):
                want = fI if i == j else {}
                got = prod.entries[i][j].terms
                if got != want:
                    diff = {m: c for m, c in padd(f, got, {m: f.neg(c) for m, c in want.items()}).items()}
                    deg = min(sum(m) for m in diff)
                    failures.append({"identity": name, "entry": [i, j], "degree": deg,
                                     "difference": format_poly(diff, X.ring)})
    return ValidationReport(not failures, X.reduced, failures)


def syzygy_mf(X):
    Y = MatrixFactorization(X.psi, X.phi, X.potential)
    if X._grading is not None:
        w, wf, a, b = X._grading
        Y._grading = (w, wf, [x - wf for x in b], a)
    return Y


def _blockdiag(A, B, ring, prec):
    n1, n2 = A.rows, B.rows
    z = TruncatedSeries.zero(ring, prec)
    rows = []
    for i in range(n1):
        rows.append(list(A.entries[i]) + [z] * B.cols)
    for i in range(n2):
        rows.append([z] * A.cols + list(B.entries[i]))
    return SeriesMatrix(rows, ring, prec, shape=(n1 + n2, A.cols + B.cols))


def direct_sum_mf(X, Y):
    if X.potential != Y.potential:
        raise ValueError("potential mismatch")
    return MatrixFactorization(_blockdiag(X.phi, Y.phi, X.ring, X.prec), _blockdiag(X.psi, Y.psi, X.ring, X.prec),
                               X.potential)


def direct_sum_all(items, potential):
    out = MatrixFactorization.zero_size(potential)
    for X in items:
        out = direct_sum_mf(out, X)
    return out


def _kron(A, B, ring, prec):
    """Kronecker product with index (i, k) -> i * B.rows + k."""
    f = ring.field
    rows = []
    for i in range(A.rows):
        for k in range(B.rows):
            row = []
            for j in range(A.cols):
                for l in range(B.cols):
                    row.append(TruncatedSeries(ring, prec, pmul(f, A.entries[i][j].terms, B.entries[k][l].terms, prec)))
            rows.append(row)
    return SeriesMatrix(rows, ring, prec, shape=(A.rows * B.rows, A.cols * B.cols))


def _embed_matrix(M, ring):
    return SeriesMatrix([[e.embed(ring) for e in r] for r in M.entries], ring, M.prec, shape=(M.rows, M.cols))


def tensor_hat(X, Y):
    """Yoshino's tensor product of factorizations of f and g, a factorization of f+g."""
    ring = X.ring.union(Y.ring)
    prec = X.prec
    if Y.prec != prec:
        raise ValueError("precision mismatch")
    phi, psi = _embed_matrix(X.phi, ring), _embed_matrix(X.psi, ring)
    phi2, psi2 = _embed_matrix(Y.phi, ring), _embed_matrix(Y.psi, ring)
    In = SeriesMatrix.identity(X.size, ring, prec)
    Im = SeriesMatrix.identity(Y.size, ring, prec)
    big_phi = block_matrix([[_kron(phi, Im, ring, prec), _kron(In, phi2, ring, prec)],
                            [-_kron(In, psi2, ring, prec), _kron(psi, Im, ring, prec)]], ring, prec)
    big_psi = block_matrix([[_kron(psi, Im, ring, prec), -_kron(In, phi2, ring, prec)],
                            [_kron(In, psi2, ring, prec), _kron(phi, Im, ring, prec)]], ring, prec)
    return MatrixFactorization(big_phi, big_psi, X.potential.embed(ring) + Y.potential.embed(ring))


def cover_factor(spec, prec):
    """The factorization (y, y^(n-1)) of y^n over k[[y]]."""
    R = Ring((spec.var,), spec.base_potential.ring.field)
    y = TruncatedSeries.var(R, spec.var, prec)
    yn1 = TruncatedSeries.var(R, spec.var, prec, spec.n - 1)
    return MatrixFactorization(SeriesMatrix([[y]]), SeriesMatrix([[yn1]]), TruncatedSeries.var(R, spec.var, prec, spec.n))


def branched_cover(X, spec):
    """Factorization of f + y^n whose cokernel is the cover syzygy of cok X."""
    if not X.reduced:
        raise ValueError("branched_cover needs a reduced factorization")
    if X.potential != spec.base_potential:
        raise ValueError("factorization is not over the cover's base potential")
    return syzygy_mf(tensor_hat(X, cover_factor(spec, X.prec)))


def _yk_identity(ring, prec, n, var, k, sign=1):
    yk = TruncatedSeries.var(ring, var, prec, k).scale(sign)
    z = TruncatedSeries.zero(ring, prec)
    return SeriesMatrix([[yk if i == j else z for j in range(n)] for i in range(n)], ring, prec, shape=(n, n))


def extension_block(N, k, var="y"):
    """([[psi, y^k I],[0, phi]], [[phi, -y^k I],[0, psi]]): the middle term of the
    sequence 0 -> Omega N -> . -> N -> 0 with class y^k times the tautological one."""
    if k < 1:
        raise ValueError("k must be positive")
    n = N.size
    ring, prec = N.ring, N.prec
    Z = SeriesMatrix.zeros(n, n, ring, prec)
    A = block_matrix([[N.psi, _yk_identity(ring, prec, n, var, k)], [Z, N.phi]], ring, prec)
    B = block_matrix([[N.phi, _yk_identity(ring, prec, n, var, k, -1)], [Z, N.psi]], ring, prec)
    return MatrixFactorization(A, B, N.potential)


def extension_mf(X, Y, gamma, delta):
    """Middle term of an extension 0 -> cok Y -> . -> cok X -> 0 given by raw gamma, delta
    with phi_Y delta + gamma psi_X = 0 and psi_Y gamma + delta phi_X = 0."""
    ring, prec = X.ring, X.prec
    G = SeriesMatrix.from_raw(gamma, ring, prec, shape=(Y.size, X.size))
    Dl = SeriesMatrix.from_raw(delta, ring, prec, shape=(Y.size, X.size))
    Z = SeriesMatrix.zeros(X.size, Y.size, ring, prec)
    A = block_matrix([[Y.phi, G], [Z, X.phi]], ring, prec)
    B = block_matrix([[Y.psi, Dl], [Z, X.psi]], ring, prec)
    return MatrixFactorization(A, B, X.potential)


def quotient_presentation(N, j, var="y", i=0):
    """Presentation of y^i N / y^j N, which is isomorphic to N / y^(j-i) N since y is
    a non-zerodivisor on N."""
    if j < 1 or not 0 <= i < j:
        raise ValueError("need 0 <= i < j and j >= 1")
    n = N.size
    P = block_matrix([[N.phi, _yk_identity(N.ring, N.prec, n, var, j - i)]], N.ring, N.prec)
    label = f"y^{i}N/y^{j}N" if i else f"N/y^{j}N"
    return ModulePresentation(P, N.potential, label)


def cokernel_presentation(X):
    return ModulePresentation(X.phi, X.potential, "cok")


# ---------------------------------------------------------------- stripping

def _eliminate_unit(A, B, i, j):
    """A has a unit at (i, j). Returns (A', B') with row i/col j of A and row j/col i
    of B removed after clearing, so that (A', B') is equivalent to the input minus the
    trivial summand carried by the pivot."""
    ring, prec = A.ring, A.prec
    f = ring.field
    n = A.rows
    u_inv = invert_unit(A.entries[i][j])
    one = TruncatedSeries.one(ring, prec)
    zero = TruncatedSeries.zero(ring, prec)
    # c_k = A_kj u^-1 (row ops), d_l = u^-1 A_il (column ops)
    c = [A.entries[k][j] * u_inv if k != i else zero for k in range(n)]
    d = [u_inv * A.entries[i][l] if l != j else zero for l in range(n)]
    # A' = (I - c e_i^T) A (I - e_j d^T)
    P = SeriesMatrix([[(one if r == s else zero) - (c[r] if s == i else zero) for s in range(n)] for r in range(n)], ring, prec)
    Q = SeriesMatrix([[(one if r == s else zero) - (d[s] if r == j else zero) for s in range(n)] for r in range(n)], ring, prec)
    Pinv = SeriesMatrix([[(one if r == s else zero) + (c[r] if s == i else zero) for s in range(n)] for r in range(n)], ring, prec)
    Qinv = SeriesMatrix([[(one if r == s else zero) + (d[s] if r == j else zero) for s in range(n)] for r in range(n)], ring, prec)
    A2 = matrix_product(matrix_product(P, A), Q)
    B2 = matrix_product(matrix_product(Qinv, B), Pinv)
    keep_r = [r for r in range(n) if r != i]
    keep_c = [s for s in range(n) if s != j]
    A3 = SeriesMatrix([[A2.entries[r][s] for s in keep_c] for r in keep_r], ring, prec, shape=(n - 1, n - 1))
    B3 = SeriesMatrix([[B2.entries[s][r] for r in keep_r] for s in keep_c], ring, prec, shape=(n - 1, n - 1))
    del f
    return A3, B3


def _find_unit(M):
    best = None
    for i, r in enumerate(M.entries):
        for j, e in enumerate(r):
            c = e.constant_term()
            if c:
                # prefer pivots with short entries to keep things tidy
                score = len(e.terms)
                if best is None or score < best[0]:
                    best = (score, i, j)
    return best


def strip_with_rank(X):
    """Remove trivial summands; returns (reduced factorization, free rank, removed (1,f) count)."""
    phi, psi = X.phi, X.psi
    free = 0
    zeros = 0
    while True:
        hit = _find_unit(phi)
        if hit is not None:
            _, i, j = hit
            phi, psi = _eliminate_unit(phi, psi, i, j)
            zeros += 1
            continue
        hit = _find_unit(psi)
        if hit is not None:
            _, i, j = hit
            psi, phi = _eliminate_unit(psi, phi, i, j)
            free += 1
            continue
        break
    Y = MatrixFactorization(phi, psi, X.potential, X.name)
    return Y, free, zeros


def strip_trivial_summands(X):
    return strip_with_rank(X)[0]


# ---------------------------------------------------------------- file format

def format_mf(X):
    lines = [f"ring {','.join(X.ring.names)}", f"prec {X.prec}", f"field {X.field.name}",
             f"potential {X.potential}", "phi"]
    for r in X.phi.entries:
        lines.append("[" + ", ".join(str(e) for e in r) + "]")
    lines.append("psi")
    for r in X.psi.entries:
        lines.append("[" + ", ".join(str(e) for e in r) + "]")
    return "\n".join(lines) + "\n"


def parse_mf(text, field=None, name=None):
    """Parse the line-oriented MF format."""
    header = {}
    phi_rows, psi_rows = [], []
    target = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "phi":
            target = phi_rows
            continue
        if line == "psi":
            target = psi_rows
            continue
        if line.startswith("["):
            if target is None:
                raise ValueError("matrix row before 'phi'")
            if not line.endswith("]"):
                raise ValueError(f"unterminated row: {line}")
            target.append([c.strip() for c in line[1:-1].split(",")])
            continue
        key, _, val = line.partition(" ")
        if key not in ("ring", "prec", "field", "potential", "name"):
            raise ValueError(f"unknown header {key!r}")
        header[key] = val.strip()
    for k in ("ring", "prec", "field", "potential"):
        if k not in header:
            raise ValueError(f"missing header {k!r}")
    fld = Field.parse(header["field"])
    if field is not None and field != fld:
        fld = field
    ring = Ring(header["ring"], fld)
    prec = int(header["prec"])
    if len(phi_rows) != len(psi_rows):
        raise ValueError("phi and psi sizes differ")
    X = MatrixFactorization.from_strings(phi_rows, psi_rows, header["potential"], ring, prec,
                                         name=name or header.get("name"))
    return X


def load_mf(path, field=None):
    with open(path) as fh:
        return parse_mf(fh.read(), field)


def change_field(X, field):
    """Re-read a factorization over another field (coefficients must make sense there)."""
    return parse_mf(format_mf(X).replace(f"field {X.field.name}", f"field {field.name}"), field, X.name)


# ---------------------------------------------------------------- random graded changes of basis

def _graded_automorphism(field, weights, degs, rng):
    """(U, U^-1) raw: a random degree-preserving automorphism of the free module with
    generators in degrees degs.  U = C (I + N) with C constant on equal degrees and N
    strictly raising degree, hence nilpotent."""
    from . import linalg, rawmat
    from .series import monomials_of_weight
    n = len(degs)
    nv = len(weights)
    C = [[field.zero] * n for _ in range(n)]
    groups = {}
    for i, d in enumerate(degs):
        groups.setdefault(d, []).append(i)
    for idx in groups.values():
        while True:
            block = [[field.random(rng, small=True) for _ in idx] for _ in idx]
            if linalg.det(field, block) != field.zero:
                break
        for r, i in enumerate(idx):
            for c, j in enumerate(idx):
                C[i][j] = block[r][c]
    Cinv = linalg.inverse(field, C)
    N = rawmat.zeros(n, n)
    for i2 in range(n):
        for i in range(n):
            e = degs[i] - degs[i2]
            if e > 0:
                for m in monomials_of_weight(weights, e):
                    c = field.random(rng, small=True)
                    if c and rng.random() < 0.5:
                        N[i2][i][m] = c
    I = rawmat.identity(n, nv, field)
    inv = I
    term = I
    negN = rawmat.scale(field, N, field.neg(field.one))
    for _ in range(n):
        term = rawmat.mul(field, term, negN)
        inv = rawmat.add(field, inv, term)
    const = lambda M: [[{(0,) * nv: v} if v else {} for v in r] for r in M]
    U = rawmat.mul(field, const(C), rawmat.add(field, I, N))
    Uinv = rawmat.mul(field, inv, const(Cinv))
    return U, Uinv


def random_graded_conjugate(X, rng):
    """(U phi V^-1, V psi U^-1) for random graded automorphisms U, V: isomorphic to X."""
    from . import rawmat
    w, _, a, b = X.grading()
    f = X.field
    U, Ui = _graded_automorphism(f, w, a, rng)
    V, Vi = _graded_automorphism(f, w, b, rng)
    phi = rawmat.mul(f, rawmat.mul(f, U, X.phi.raw()), Vi)
    psi = rawmat.mul(f, rawmat.mul(f, V, X.psi.raw()), Ui)
    return MatrixFactorization(rawmat.to_series(phi, X.ring, X.prec), rawmat.to_series(psi, X.ring, X.prec),
                               X.potential, X.name)
