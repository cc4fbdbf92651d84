"""Approximation sequences, splitting verdicts, Sigma_k membership and generation witnesses."""

import random
from dataclasses import dataclass, field as dc_field

from . import homalg
from .mf import (MatrixFactorization, ModulePresentation, direct_sum_mf, extension_block, quotient_presentation,
                 strip_with_rank, syzygy_mf, tensor_hat, cover_factor, BranchedCoverSpec)
from .series import Ring, SeriesMatrix, TruncatedSeries, block_matrix


def _cover_exponent(N, var):
    v = N.ring.index(var)
    ys = [m[v] for m in N.potential.terms if sum(m) == m[v]]
    if not ys:
        raise ValueError(f"potential has no pure power of {var}")
    return max(ys)


def _label(D):
    return D.as_dict() if D is not None else None


def same_up_to_free(X, Y):
    """Pieces of X and Y agree as multisets once free summands are ignored."""
    A = homalg.decompose(X).pieces()
    B = homalg.decompose(Y).pieces()
    return _match_pieces(A, B)


def _match_pieces(A, B):
    if len(A) != len(B):
        return False
    left = list(B)
    for P in A:
        for i, Q in enumerate(left):
            if P.size == Q.size and homalg.is_isomorphic(P, Q).isomorphic:
                del left[i]
                break
        else:
            return False
    return True


def is_summand(N, M):
    """Is every indecomposable piece of N (with multiplicity) a piece of M? Frees ignored."""
    A = homalg.decompose(N).pieces()
    left = homalg.decompose(M).pieces()
    for P in A:
        for i, Q in enumerate(left):
            if P.size == Q.size and homalg.is_isomorphic(P, Q).isomorphic:
                del left[i]
                break
        else:
            return False
    return True


# ---------------------------------------------------------------- approximations

@dataclass
class ApproximationWitness:
    side: str
    k: int
    target: MatrixFactorization
    kernel: MatrixFactorization
    middle: homalg.DecompositionMultiset
    split: bool
    minimal: bool = None
    free_rank: int = 0
    names: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {"side": self.side, "k": self.k, "target": self.names.get("target"),
                "kernel": self.names.get("kernel"), "middle": _label(self.middle), "split": self.split,
                "minimal": self.minimal, "free_rank": self.free_rank}


def _name(X, catalog):
    if catalog is None:
        return None
    return catalog.match(X)


def _is_indecomposable(N):
    d = homalg.decompose(N)
    return len(d.items) == 1 and d.items[0][1] == 1 and d.free_rank == 0


def right_approximation(N, k, catalog=None, var="y"):
    """0 -> Omega N -> E -> N -> 0 with E = Omega(N/y^k N), a right Sigma_k-approximation."""
    n = _cover_exponent(N, var)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    E = extension_block(N, k, var)
    D = homalg.decompose(E, catalog)
    K = syzygy_mf(N)
    split = homalg.is_isomorphic(E, direct_sum_mf(N, K)).isomorphic
    minimal = None
    if not split and _is_indecomposable(N):
        minimal = True
    W = ApproximationWitness("right", k, N, K, D, split, minimal, D.free_rank)
    if catalog is not None:
        W.names = {"target": _name(N, catalog), "kernel": _name(K, catalog)}
    return W


def left_approximation(N, k, catalog=None, var="y"):
    """0 -> N -> E' -> Omega N -> 0, obtained from the right approximation of Omega N."""
    W = right_approximation(syzygy_mf(N), k, catalog, var)
    out = ApproximationWitness("left", k, N, W.target, W.middle, W.split, None, W.free_rank)
    if not out.split and _is_indecomposable(N):
        out.minimal = True
    if catalog is not None:
        # for the left side "kernel" is the cokernel Omega N
        out.names = {"target": _name(N, catalog), "kernel": W.names.get("target")}
    return out


# ---------------------------------------------------------------- Sigma_k

@dataclass
class SigmaReport:
    module: str
    n: int
    annihilator_power: int
    membership: dict = dc_field(default_factory=dict)
    split: dict = dc_field(default_factory=dict)
    ext_dim: int = None

    def as_dict(self):
        return {"module": self.module, "n": self.n, "annihilator_power": self.annihilator_power,
                "membership": {str(k): v for k, v in self.membership.items()},
                "split": {str(k): v for k, v in self.split.items()}, "ext_dim": self.ext_dim}


def sigma_membership(N, k, var="y"):
    """N in Sigma_k iff y^k kills Ext^1(N, Omega N)."""
    return homalg.annihilator_power(N, var) <= k


def sigma_report(N, catalog=None, var="y", cross_check=True):
    n = _cover_exponent(N, var)
    p = homalg.annihilator_power(N, var)
    X0, _, _ = strip_with_rank(N)
    rep = SigmaReport(_name(N, catalog) or "input", n, p)
    rep.ext_dim = homalg.ext1(X0, syzygy_mf(X0), actions=False).dim if X0.size else 0
    for k in range(1, n + 1):
        rep.membership[k] = p <= k
        if cross_check and k < n:
            rep.split[k] = right_approximation(N, k, var=var).split
            if rep.split[k] != rep.membership[k]:
                raise RuntimeError(f"split verdict disagrees with Ext annihilation at k={k}")
    return rep


def _y_power_kills_ext(N, k, var):
    """Use the variable-action tables of Ext^1(N, Omega N)."""
    X0, _, _ = strip_with_rank(N)
    if X0.size == 0:
        return True
    E = homalg.ext1(X0, syzygy_mf(X0))
    if E.dim == 0:
        return True
    f = X0.field
    from . import linalg
    Y = E.actions[var]
    P = Y
    for _ in range(k - 1):
        P = linalg.matmul(f, Y, P)
    return all(not v for r in P for v in r)


def equivalence_verdicts(N, k, var="y"):
    """The five equivalent conditions, each computed by its own route."""
    K = syzygy_mf(N)
    S = homalg.syzygy_module(quotient_presentation(N, k, var))
    if S.status != "ok" or not S.mcm:
        raise homalg.Inconclusive("syzygy of N/y^kN did not produce a factorization")
    member = is_summand(N, S.mf) if strip_with_rank(N)[0].size else True
    split22 = homalg.is_isomorphic(extension_block(N, k, var), direct_sum_mf(N, K)).isomorphic
    split23 = homalg.is_isomorphic(extension_block(K, k, var), direct_sum_mf(K, N)).isomorphic
    omega_member = homalg.annihilator_power(K, var) <= k
    kills = _y_power_kills_ext(N, k, var)
    return {"member": member, "split_right": split22, "split_left": split23,
            "omega_member": omega_member, "ext_killed": kills}


# ---------------------------------------------------------------- Herzog-Popescu

@dataclass
class HPVerdict:
    passed: bool
    middle: dict
    expected: dict

    def as_dict(self):
        return {"passed": self.passed, "middle": self.middle, "expected": self.expected}


def verify_knorrer_hp(N, catalog=None, var="y"):
    n = _cover_exponent(N, var)
    N.field.check_unit(n)
    E = extension_block(N, n - 1, var)
    want = direct_sum_mf(N, syzygy_mf(N))
    got = homalg.decompose(E, catalog)
    exp = homalg.decompose(want, catalog)
    ok = _match_pieces(got.pieces(), exp.pieces())
    if not ok:
        raise RuntimeError("Omega(N/y^(n-1)N) is not N + Omega N: splitting theorem violated")
    return HPVerdict(True, got.as_dict(), exp.as_dict())


# ---------------------------------------------------------------- Sigma_k = Sigma_{k-j} * Sigma_j

@dataclass
class SigmaWitness:
    j: int
    k: int
    left: dict
    middle: dict
    right: dict
    free_rank: int
    contains_target: bool
    left_in: bool
    right_in: bool
    degenerate: bool = False
    rank_balance: bool = True

    def as_dict(self):
        return {"j": self.j, "k": self.k, "left": self.left, "middle": self.middle, "right": self.right,
                "free_rank": self.free_rank, "contains_target": self.contains_target,
                "left_in_sigma": self.left_in, "right_in_sigma": self.right_in,
                "degenerate": self.degenerate, "rank_balance": self.rank_balance}


def _total_rank(X):
    X0, free, _ = strip_with_rank(X)
    return (homalg.graded_rank(X0) if X0.size else 0) + free


def sigma_factorization_witness(N, j, k, catalog=None, var="y"):
    """Apply Omega to 0 -> y^j X -> X -> X/y^j X -> 0 with X = N/y^k N."""
    n = _cover_exponent(N, var)
    if not 1 <= j < k <= n:
        raise ValueError("need 1 <= j < k <= n")
    if homalg.annihilator_power(N, var) <= j:
        D = homalg.decompose(N, catalog).as_dict()
        return SigmaWitness(j, k, {}, D, D, 0, True, True, True, degenerate=True)
    Sl = homalg.syzygy_module(quotient_presentation(N, k, var, i=j))
    Sm = homalg.syzygy_module(quotient_presentation(N, k, var))
    Sr = homalg.syzygy_module(quotient_presentation(N, j, var))
    for S in (Sl, Sm, Sr):
        if S.status != "ok" or not S.mcm:
            raise homalg.Inconclusive("syzygies in the witness are not factorizations")
    # horseshoe: mu(left) + mu(right) - mu(middle) extra free summands, and all three equal N.size
    F = N.size
    left = homalg.decompose(Sl.mf, catalog)
    right = homalg.decompose(Sr.mf, catalog)
    mid = homalg.decompose(Sm.mf, catalog)
    left_in = all(homalg.annihilator_power(P, var) <= k - j for P in left.pieces())
    right_in = all(homalg.annihilator_power(P, var) <= j for P in right.pieces())
    contains = is_summand(N, Sm.mf)
    balance = (_total_rank(Sl.mf) + Sl.free_rank + _total_rank(Sr.mf) + Sr.free_rank
               == _total_rank(Sm.mf) + Sm.free_rank + F)
    mdict = mid.as_dict()
    if F:
        mdict["free"] = mdict.get("free", 0) + F
    return SigmaWitness(j, k, _with_free(left, Sl.free_rank), mdict, _with_free(right, Sr.free_rank), F + Sm.free_rank,
                        contains, left_in, right_in, False, balance)


def _with_free(D, extra):
    d = D.as_dict()
    if extra:
        d["free"] = d.get("free", 0) + extra
    return d


def sequence_witness(start, middle_name, end, catalog, j=1, k=2, var="y"):
    """Check a known sequence 0 -> start -> middle -> end -> 0 as a Sigma_{k-j} * Sigma_j witness."""
    from .catalog import extension_middles
    A, C = catalog.get(start), catalog.get(end)
    found = any(homalg.decompose(E, catalog).as_dict() == {middle_name: 1} for E in extension_middles(C, A))
    return SigmaWitness(j, k, {start: 1}, {middle_name: 1}, {end: 1}, 0, found,
                        homalg.annihilator_power(A, var) <= k - j, homalg.annihilator_power(C, var) <= j)


# ---------------------------------------------------------------- iterated covers

@dataclass
class TakahashiVerdict:
    passed: bool
    got: dict
    expected: dict
    free_rank: int

    def as_dict(self):
        return {"passed": self.passed, "got": self.got, "expected": self.expected, "free_rank": self.free_rank}


def iterated_cover(X, exponents, names=None):
    """X tensor (y_1, y_1^(a_1-1)) tensor ... : a factorization of f + sum y_i^(a_i)."""
    names = names or [f"y{i + 1}" for i in range(len(exponents))]
    N = X
    for a, v in zip(exponents, names):
        X.field.check_unit(a)
        spec = BranchedCoverSpec(N.potential, a, v)
        N = tensor_hat(N, cover_factor(spec, N.prec))
    return N, names


def _multi_quotient(N, names, exponents):
    n = N.size
    ring, prec = N.ring, N.prec
    blocks = [N.phi]
    z = TruncatedSeries.zero(ring, prec)
    for v, a in zip(names, exponents):
        t = TruncatedSeries.var(ring, v, prec, a - 1)
        blocks.append(SeriesMatrix([[t if i == jj else z for jj in range(n)] for i in range(n)], ring, prec,
                                   shape=(n, n)))
    return ModulePresentation(block_matrix([blocks], ring, prec), N.potential, "N/(y^(a-1))N")


def takahashi_check(X, exponents, names=None):
    """Omega^r(N/(y_i^(a_i-1))N) against the binomial pattern of syzygies of N."""
    from math import comb
    r = len(exponents)
    if r > 2:
        raise ValueError("only r <= 2 is supported")
    N, names = iterated_cover(X, exponents, names)
    S = homalg.syzygy_module(_multi_quotient(N, names, exponents), times=r)
    if S.status != "ok" or not S.mcm:
        raise homalg.Inconclusive("iterated syzygy is not a factorization")
    got = homalg.decompose(S.mf)
    parts = []
    cur = N
    for jj in range(r + 1):
        parts.extend([cur] * comb(r, jj))
        cur = syzygy_mf(cur)
    exp = MatrixFactorization.zero_size(N.potential)
    for P in parts:
        exp = direct_sum_mf(exp, P)
    want = homalg.decompose(exp)
    ok = _match_pieces(got.pieces(), want.pieces())
    return TakahashiVerdict(ok, got.as_dict(), want.as_dict(), S.free_rank)


# ---------------------------------------------------------------- bounds

@dataclass
class BoundsRecord:
    exponents: tuple
    cover_exponents: tuple
    loewy: int
    bfk: int
    cover_sum: int
    m: int

    def as_dict(self):
        return {"exponents": list(self.exponents), "cover_exponents": list(self.cover_exponents),
                "loewy": self.loewy, "bfk": self.bfk, "cover_sum": self.cover_sum, "m": self.m}


def bph_bounds(exponents, cover_exponents=None):
    """Loewy length, the 2l-1 bound and the sum of (a_i - 2) over the cover exponents.
    The first exponent is the base variable; the others are cover exponents by default."""
    ex = tuple(int(a) for a in exponents)
    if not ex or any(a < 2 for a in ex):
        raise ValueError("all exponents must be at least 2")
    cov = tuple(ex[1:]) if cover_exponents is None else tuple(int(a) for a in cover_exponents)
    loewy = sum(a - 2 for a in ex) + 1
    return BoundsRecord(ex, cov, loewy, 2 * loewy - 1, sum(a - 2 for a in cov), loewy)


def random_exponent_sweep(count=100, seed=0, max_len=5, max_a=9):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        length = rng.randint(2, max_len)
        out.append(bph_bounds([rng.randint(2, max_a) for _ in range(length)]))
    return out


def probe_annihilator_threshold(catalog, threshold, var="y"):
    """Experimental: catalog modules whose annihilator power exceeds the threshold."""
    return [e.name for e in catalog.entries if homalg.annihilator_power(e.mf, var) > threshold]
