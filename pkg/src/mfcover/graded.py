"""Weighted gradings: potential weights and generator degrees of factorizations.

All worked examples are quasi-homogeneous, so the homological engine runs degree by
degree. This module finds the weights and the degree shifts that make a matrix
factorization graded.
"""

from fractions import Fraction
from math import gcd, lcm

from . import linalg
from .series import Field, homogeneous_degree


class NotGraded(ValueError):
    pass


def infer_weights(potential_terms, nvars):
    """Positive integer weights making the potential weighted homogeneous."""
    monos = list(potential_terms)
    if not monos:
        raise NotGraded("zero potential")
    # pure powers give the weights directly (Brieskorn-Pham and friends)
    pure = {}
    for m in monos:
        nz = [i for i, e in enumerate(m) if e]
        if len(nz) == 1:
            pure[nz[0]] = m[nz[0]]
    present = {i for m in monos for i, e in enumerate(m) if e}
    if set(pure) == present:
        L = lcm(*pure.values())
        w = [L // pure[i] if i in pure else 0 for i in range(nvars)]
    else:
        q = Field(None)
        rows = [[Fraction(a - b) for a, b in zip(m, monos[0])] for m in monos[1:]]
        basis = linalg.nullspace(q, rows, nvars) if rows else [[Fraction(int(i == j)) for i in range(nvars)] for j in range(nvars)]
        # look for a positive vector among small combinations of the basis
        w = None
        for v in ([sum(col) for col in zip(*basis)], *basis):
            if all(x > 0 for x in (v[i] for i in present)):
                w = v
                break
        if w is None:
            raise NotGraded("potential is not quasi-homogeneous with positive weights")
        den = lcm(*[Fraction(x).denominator for x in w])
        w = [int(Fraction(x) * den) if i in present else 0 for i, x in enumerate(w)]
    # variables absent from the potential get weight 1 scaled to the common unit
    g = 0
    for x in w:
        g = gcd(g, x)
    w = [x // g if x else 0 for x in w] if g else w
    w = [x if x else 1 for x in w]
    degs = {sum(e * x for e, x in zip(m, w)) for m in monos}
    if len(degs) != 1:
        raise NotGraded("potential is not quasi-homogeneous")
    return tuple(w), degs.pop()


def infer_degrees(phi_raw, psi_raw, weights, wf):
    """Row/column degrees (a, b) with deg phi_ij = b_j - a_i and deg psi_ji = a_i + wf - b_j."""
    n = len(phi_raw)
    m = len(phi_raw[0]) if n else 0
    a = [None] * n
    b = [None] * m
    edges_row = [[] for _ in range(n)]
    edges_col = [[] for _ in range(m)]
    for i in range(n):
        for j in range(m):
            e = phi_raw[i][j]
            if e:
                d = homogeneous_degree(e, weights)
                if d is None:
                    raise NotGraded(f"phi entry ({i},{j}) is not weighted homogeneous")
                edges_row[i].append((j, d))
                edges_col[j].append((i, d))
    for j in range(len(psi_raw)):
        for i in range(len(psi_raw[0]) if psi_raw else 0):
            e = psi_raw[j][i]
            if e:
                d = homogeneous_degree(e, weights)
                if d is None:
                    raise NotGraded(f"psi entry ({j},{i}) is not weighted homogeneous")
                # b_j - a_i = wf - d
                edges_row[i].append((j, wf - d))
                edges_col[j].append((i, wf - d))
    for start in range(n):
        if a[start] is not None:
            continue
        a[start] = 0
        stack = [("r", start)]
        while stack:
            kind, idx = stack.pop()
            if kind == "r":
                for j, d in edges_row[idx]:
                    want = a[idx] + d
                    if b[j] is None:
                        b[j] = want
                        stack.append(("c", j))
                    elif b[j] != want:
                        raise NotGraded("inconsistent degrees")
            else:
                for i, d in edges_col[idx]:
                    want = b[idx] - d
                    if a[i] is None:
                        a[i] = want
                        stack.append(("r", i))
                    elif a[i] != want:
                        raise NotGraded("inconsistent degrees")
    for j in range(m):
        if b[j] is None:
            b[j] = 0
    return a, b
