import itertools
import random

import pytest

from mfcover.repro import sigma_ideals
from mfcover.semigroup import (R_SHARP, FractionalIdeal, SemigroupRing, TPowerMap, colon, colon_bruteforce,
                               complete_resolution_check, ideal_mf, irreducible_arrows, kernel_of_map,
                               relation_hints, simple_resolution)


@pytest.fixture(scope="module")
def s34():
    return SemigroupRing(3, 4)


def test_semigroup_basics(s34):
    assert s34.gaps() == [1, 2, 5]
    assert s34.conductor == 6
    assert SemigroupRing(5, 3).gaps() == [1, 2, 4, 7]
    with pytest.raises(ValueError):
        SemigroupRing(4, 6)


def test_ideal_normalisation(s34):
    I = FractionalIdeal(s34, [3, 6, 8])
    assert I.gens == (3, 8)
    assert I.is_isomorphic(FractionalIdeal(s34, [0, 5]))
    assert not I.is_isomorphic(FractionalIdeal(s34, [0, 1]))


def test_colon_vs_bruteforce():
    rng = random.Random(3)
    for a, b in [(3, 4), (3, 5), (4, 5), (2, 7)]:
        S = SemigroupRing(a, b)
        for _ in range(15):
            I = FractionalIdeal(S, rng.sample(range(-3, 12), rng.randint(1, 3)))
            J = FractionalIdeal(S, rng.sample(range(-3, 12), rng.randint(1, 3)))
            C = colon(J, I)
            got = [m for m in range(-20, 41) if C.contains(m)]
            assert got == colon_bruteforce(J, I), (a, b, I, J)


def _e6_ideals(s34):
    return {"M1": FractionalIdeal(s34, [3, 8]), "N1": FractionalIdeal(s34, [3, 4]),
            "M2": FractionalIdeal(s34, [6, 8]), R_SHARP: FractionalIdeal(s34, [0])}


def test_e6_quiver(s34):
    Q = irreducible_arrows(_e6_ideals(s34))
    assert sorted(Q.arrows) == sorted([
        ("N1", "M2", 5), ("N1", "M1", 4), ("N1", R_SHARP, 0), (R_SHARP, "M1", 3), ("M1", "M2", 3),
        ("M1", "N1", 0), ("M2", "N1", -2), ("M2", "M1", 0), ("M2", "M2", 2)])


def test_e6_relations(s34):
    Q = irreducible_arrows(_e6_ideals(s34))
    groups = {(g[0][0][0], g[0][-1][1], e): g for g, e in relation_hints(Q)}
    one = [[(a[0], a[1]) for a in p] for p in groups[("M2", "N1", 0)]]
    assert [("M2", "M1"), ("M1", "N1")] in one and [("M2", "M2"), ("M2", "N1")] in one
    three = [[(a[0], a[1]) for a in p] for p in groups[("N1", "N1", 3)]]
    assert [("N1", R_SHARP), (R_SHARP, "M1"), ("M1", "N1")] in three and [("N1", "M2"), ("M2", "N1")] in three


def test_e8_double_arrows(e8):
    Q = irreducible_arrows(sigma_ideals(e8))
    assert len(Q.arrows) == 12
    assert sorted(e for s, t, e in Q.arrows if (s, t) == ("M2", "N2")) == [-1, 0]
    assert sorted(e for s, t, e in Q.arrows if (s, t) == ("N2", "M2")) == [4, 5]


def test_quiver_exports(s34):
    Q = irreducible_arrows(_e6_ideals(s34))
    dot = Q.to_dot()
    assert dot.startswith("digraph") and dot.count("->") == 9
    assert len(Q.to_text().splitlines()) >= 9
    assert Q.as_dict()["arrows"]


def test_ideal_mf_matches_catalog(e6, e8):
    for cat in (e6, e8):
        for name, I in sigma_ideals(cat).items():
            if name == R_SHARP:
                continue
            assert cat.match(ideal_mf(I, cat)) == name


def _map_into(ideals, target, arrows):
    srcs = [a for a in arrows if a[1] == target]
    S = ideals[target].ring
    return TPowerMap(S, [ideals[a[0]] for a in srcs], [ideals[target]], [[{a[2]: 1} for a in srcs]])


@pytest.mark.parametrize("vertex,kernel", [("M2", "X"), ("N1", "B"), ("M1", "A")])
def test_kernels_e6(e6, vertex, kernel):
    ideals = sigma_ideals(e6)
    Q = irreducible_arrows(ideals)
    K = kernel_of_map(_map_into(ideals, vertex, Q.arrows), e6)
    assert K.name == kernel


def test_kernel_of_zero_map(e6, s34):
    ideals = _e6_ideals(s34)
    d = TPowerMap(s34, [ideals["M1"]], [ideals["N1"]], [[{}]])
    assert kernel_of_map(d, e6).name == "M1"


def test_kernel_rejects_bad_map(e6, s34):
    ideals = _e6_ideals(s34)
    # t^0 does not send N1 = (t^3, t^4) into M2 = (t^6, t^8)
    d = TPowerMap(s34, [ideals["N1"]], [ideals["M2"]], [[{0: 1}]])
    with pytest.raises(ValueError):
        kernel_of_map(d, e6)


def test_resolutions_e6(e6):
    ideals = sigma_ideals(e6)
    tr = simple_resolution(ideals, "N1", 6, e6)
    assert tr.steps[:4] == [{"N1": 1}, {"M1": 1, "M2": 1}, {"N1": 2, "M2": 1}, {"M1": 2, "M2": 1}]
    assert tr.kernel == "B" and tr.period == 2
    tr = simple_resolution(ideals, R_SHARP, 4, e6)
    assert tr.terminates
    with pytest.raises(KeyError):
        simple_resolution(ideals, "Z", 4, e6)
    with pytest.raises(ValueError):
        simple_resolution(ideals, "N1", 1, e6)
    assert " <- " in simple_resolution(ideals, "M2", 4, e6).text()


def test_complete_resolution(e6):
    sig = ["M1", "N1", "M2", "free"]
    for name in ("A", "B", "X"):
        v = complete_resolution_check(e6.get(name), e6, sig)
        assert not v.projective and v.exact and v.composes_to_zero
        assert v.period in (1, 2)
    assert complete_resolution_check(e6.get("M1"), e6, sig).projective
    # negative control: a test object outside Sigma_1 breaks exactness
    assert not complete_resolution_check(e6.get("A"), e6, ["A"]).exact
