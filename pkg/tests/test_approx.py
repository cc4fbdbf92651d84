import pytest

from mfcover import approx, homalg
from mfcover.catalog import load_catalog
from mfcover.mf import MatrixFactorization, direct_sum_mf, syzygy_mf
from mfcover.series import Ring


def test_right_approximation_e6(e6):
    W = approx.right_approximation(e6.get("A"), 1, e6)
    assert W.as_dict()["kernel"] == "B" and W.middle.as_dict() == {"M1": 2, "M2": 1}
    assert not W.split and W.minimal


def test_left_approximation_e6(e6):
    W = approx.left_approximation(e6.get("B"), 1, e6)
    assert W.names == {"target": "B", "kernel": "A"}
    assert W.middle.as_dict() == {"M1": 2, "M2": 1}


def test_approximation_of_member_splits(e6):
    for name in ("M1", "N1", "M2"):
        W = approx.right_approximation(e6.get(name), 1, e6)
        assert W.split
        assert W.middle.as_dict() == {name: 1, e6.omega(name): 1} or W.middle.as_dict() == {name: 2}


def test_approximation_k_range(e6):
    with pytest.raises(ValueError):
        approx.right_approximation(e6.get("A"), 4, e6)
    with pytest.raises(ValueError):
        approx.right_approximation(e6.get("A"), 0, e6)


def test_middles_lie_in_sigma_k(e6, e8):
    for cat in (e6, e8):
        for e in cat.entries:
            W = approx.right_approximation(e.mf, 1, cat)
            assert all(homalg.annihilator_power(P) <= 1 for P in W.middle.pieces())


def test_sigma_monotone(e6):
    for e in e6.entries:
        rep = approx.sigma_report(e.mf, e6)
        flags = [rep.membership[k] for k in sorted(rep.membership)]
        assert flags == sorted(flags)
        assert rep.membership[rep.n]
        assert rep.ext_dim > 0


def test_sigma_report_names(e6):
    rep = approx.sigma_report(e6.get("X"), e6)
    assert rep.as_dict()["module"] == "X"
    assert rep.annihilator_power == 2
    assert rep.split == {1: False, 2: True}


def test_equivalence_single(e6):
    assert set(approx.equivalence_verdicts(e6.get("B"), 1).values()) == {False}
    assert set(approx.equivalence_verdicts(e6.get("B"), 2).values()) == {True}


def test_knorrer_hp_on_sums(e6):
    S = direct_sum_mf(e6.get("A"), e6.get("N1"))
    v = approx.verify_knorrer_hp(S, e6)
    assert v.middle == {"A": 1, "B": 1, "M1": 1, "N1": 1}


def test_same_up_to_free_and_summand(e6):
    A, B = e6.get("A"), e6.get("B")
    assert approx.same_up_to_free(direct_sum_mf(A, B), direct_sum_mf(B, A))
    assert approx.is_summand(A, direct_sum_mf(B, A))
    assert not approx.is_summand(A, direct_sum_mf(B, B))


def test_sigma_witness_e8(e8):
    W = approx.sigma_factorization_witness(e8.get("A2"), 1, 2, e8)
    assert W.left == {"N1": 1, "N2": 2} and W.right == {"N1": 1, "N2": 2}
    assert W.middle == {"A2": 1, "B2": 1, "free": 3}
    assert W.contains_target and W.left_in and W.right_in and W.rank_balance


def test_sigma_witness_degenerate(e6):
    W = approx.sigma_factorization_witness(e6.get("N1"), 1, 2, e6)
    assert W.degenerate
    with pytest.raises(ValueError):
        approx.sigma_factorization_witness(e6.get("A"), 2, 2, e6)


def test_sequence_witness(e6):
    W = approx.sequence_witness("M1", "A", "N1", e6)
    assert W.contains_target and W.left_in and W.right_in


def test_takahashi_single_exponent(F):
    X = MatrixFactorization.from_strings([["x"]], [["x^2"]], "x^3", Ring("x", F))
    v = approx.takahashi_check(X, [3])
    assert v.passed


def test_takahashi_rejects_long(F):
    X = MatrixFactorization.from_strings([["x"]], [["x"]], "x^2", Ring("x", F))
    with pytest.raises(ValueError):
        approx.takahashi_check(X, [2, 2, 2])


def test_bounds_examples():
    r = approx.bph_bounds([4, 3])
    assert (r.loewy, r.bfk, r.cover_sum) == (4, 7, 1)
    assert approx.bph_bounds([4, 3], cover_exponents=[4, 3]).cover_sum == 3
    with pytest.raises(ValueError):
        approx.bph_bounds([1, 3])
    sweep = approx.random_exponent_sweep(30, seed=5)
    assert sweep == approx.random_exponent_sweep(30, seed=5)
    assert all(r.cover_sum <= r.bfk for r in sweep)


def test_probe_threshold(e6, e8):
    assert sorted(approx.probe_annihilator_threshold(e6, 1)) == ["A", "B", "X"]
    assert approx.probe_annihilator_threshold(e8, 2) == []


def test_a_type_catalog():
    cat = load_catalog("A:4")
    assert cat.names == ["R/(x^1)", "R/(x^2)", "R/(x^3)"]
    assert cat.match(syzygy_mf(cat.get("R/(x^1)"))) == "R/(x^3)"
