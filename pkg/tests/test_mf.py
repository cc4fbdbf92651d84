import random

import pytest

from mfcover import homalg
from mfcover.catalog import cover_spec
from mfcover.mf import (BranchedCoverSpec, MatrixFactorization, branched_cover, direct_sum_mf, extension_block,
                        format_mf, parse_mf, quotient_presentation, random_graded_conjugate, strip_with_rank,
                        syzygy_mf, tensor_hat, validate)
from mfcover.series import Field, Ring


def mf(phi, psi, f, names, field):
    return MatrixFactorization.from_strings(phi, psi, f, Ring(names, field))


def test_catalog_entries_valid(e6, e8):
    for cat in (e6, e8):
        for e in cat.entries:
            rep = validate(e.mf)
            assert rep.valid and rep.reduced, e.name


def test_broken_factorization_located(e6):
    X = e6.get("N1")
    bad = MatrixFactorization(X.psi, X.psi, X.potential)
    rep = validate(bad)
    assert not rep.valid
    assert rep.failures[0]["identity"] == "phi*psi"
    assert set(rep.failures[0]) >= {"entry", "degree", "difference"}


def test_syzygy_involution(e6):
    for e in e6.entries:
        X = e.mf
        assert syzygy_mf(syzygy_mf(X)).phi == X.phi
        assert e6.match(syzygy_mf(X)) == e6.omega(e.name)


def test_omega_n1_is_m1(e6):
    assert e6.omega("N1") == "M1"
    assert e6.omega("M1") == "N1"


def test_direct_sum(e6):
    S = direct_sum_mf(e6.get("N1"), e6.get("M2"))
    assert S.size == 4 and validate(S).valid
    assert homalg.decompose(S, e6).as_dict() == {"M2": 1, "N1": 1}
    with pytest.raises(ValueError):
        direct_sum_mf(e6.get("N1"), mf([["x"]], [["x"]], "x^2", "x,y", Field(32003)))


def test_tensor_hat_e6(F, e6):
    X = mf([["x"]], [["x^3"]], "x^4", "x", F)
    Y = mf([["y"]], [["y^2"]], "y^3", "y", F)
    T = tensor_hat(X, Y)
    assert T.size == 2 and validate(T).valid
    assert str(T.potential) == str(e6.potential)
    assert e6.match(T) == "M1"
    # Omega commutes with the tensor product
    assert homalg.is_isomorphic(syzygy_mf(T), tensor_hat(syzygy_mf(X), Y)).isomorphic
    assert homalg.is_isomorphic(syzygy_mf(T), tensor_hat(X, syzygy_mf(Y))).isomorphic


def test_tensor_hat_rationals(Q):
    X = mf([["x"]], [["x"]], "x^2", "x", Q)
    Y = mf([["1/2*u"]], [["2*u"]], "u^2", "u", Q)
    assert validate(tensor_hat(X, Y)).valid


@pytest.mark.parametrize("e,want", [(1, "N1"), (2, "M2"), (3, "M1")])
def test_branched_cover_e6(F, e6, e, want):
    X = mf([[f"x^{e}"]], [[f"x^{4 - e}"]], "x^4", "x", F)
    C = branched_cover(X, cover_spec(e6))
    assert validate(C).valid
    assert e6.match(C) == want


def test_branched_cover_rejects(F):
    X = mf([["x"]], [["x^3"]], "x^4", "x", F)
    with pytest.raises(ValueError):
        branched_cover(X, BranchedCoverSpec(mf([["x"]], [["x^2"]], "x^3", "x", F).potential, 3, "y"))
    with pytest.raises(ValueError):
        F.check_unit(32003 * 2)


def test_extension_block(e6):
    for e in e6.entries:
        for k in (1, 2, 3):
            E = extension_block(e.mf, k)
            assert validate(E).valid
    # N1 is killed by y in the stable category: the k = 1 block splits
    D = homalg.decompose(extension_block(e6.get("N1"), 1), e6)
    assert D.as_dict() == {"M1": 1, "N1": 1}
    with pytest.raises(ValueError):
        extension_block(e6.get("N1"), 0)


def test_quotient_presentation(e6):
    N = e6.get("A")
    P = quotient_presentation(N, 2)
    assert P.matrix.rows == N.size and P.matrix.cols == 2 * N.size
    assert quotient_presentation(N, 3, i=1).label == "y^1N/y^3N"
    with pytest.raises(ValueError):
        quotient_presentation(N, 1, i=1)


def test_strip_trivial(e6):
    X = e6.get("N1")
    f = X.potential.ring
    triv = MatrixFactorization.from_strings([["1"]], [[str(X.potential)]], str(X.potential), f, prec=X.prec)
    zero = MatrixFactorization.from_strings([[str(X.potential)]], [["1"]], str(X.potential), f, prec=X.prec)
    Y, free, zeros = strip_with_rank(direct_sum_mf(direct_sum_mf(X, triv), zero))
    assert (Y.size, free, zeros) == (2, 1, 1)
    assert homalg.is_isomorphic(Y, X).isomorphic
    assert not direct_sum_mf(X, triv).reduced


def test_file_round_trip(e6, e8):
    for cat in (e6, e8):
        for e in cat.entries:
            text = format_mf(e.mf)
            Y = parse_mf(text)
            assert Y.phi == e.mf.phi and Y.psi == e.mf.psi
            assert format_mf(Y) == text


@pytest.mark.parametrize("text", [
    "ring x\nprec 5\nfield fp:7\npotential x^2\nphi\n[x]\n",
    "ring x\nprec 5\npotential x^2\nphi\n[x]\npsi\n[x]\n",
    "ring x\nprec 5\nfield fp:7\npotential x^2\n[x]\n",
    "ring x\nprec 5\nfield fp:7\npotential x^2\nbogus 1\n",
])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_mf(text)


def test_random_conjugate_keeps_class(e6):
    rng = random.Random(4)
    for e in e6.entries:
        Y = random_graded_conjugate(e.mf, rng)
        assert validate(Y).valid
        assert e6.match(Y) == e.name
