"""The thirteen acceptance criteria, exact equality throughout."""
import random

import pytest

from conftest import record
from mfcover import approx, homalg, semigroup
from mfcover.catalog import load_catalog
from mfcover.mf import (BranchedCoverSpec, MatrixFactorization, branched_cover, direct_sum_all, direct_sum_mf,
                        extension_block, quotient_presentation, random_graded_conjugate, syzygy_mf, tensor_hat,
                        validate)
from mfcover.repro import check_fact, load_golden, sigma_ideals
from mfcover.series import Ring, SeriesMatrix, TruncatedSeries, random_series


def facts(label, kind=None, ids=None):
    out = load_golden(label)["facts"]
    return [f for f in out if (kind is None or f["kind"] == kind) and (ids is None or f["id"] in ids)]


def run_facts(cat, fs):
    ctx = {}
    return [check_fact(cat, f, ctx) for f in fs]


def test_c01_e6_cover_syzygies(e6):
    res = run_facts(e6, facts("E6", "cover_syzygy"))
    want = {"omega R/(x) = N1", "omega R/(x^3) = M1", "omega R/(x^2) = M2"}
    ok = want <= {r.id for r in res} and all(r.passed for r in res)
    record(1, ok, "; ".join(f"{r.id}: {r.got}" for r in res))
    assert ok


def test_c02_e6_approximations(e6):
    res = run_facts(e6, facts("E6", "approximation"))
    ok = len(res) == 6 and all(r.passed for r in res)
    record(2, ok, f"{sum(r.passed for r in res)}/{len(res)} sequences")
    assert ok


@pytest.mark.xfail(strict=True, reason="two displayed E8 sequences conflict with the displayed matrices")
def test_c03_e8_syzygies_and_approximations(e8):
    res = run_facts(e8, facts("E8", "cover_syzygy") + facts("E8", "approximation"))
    bad = [r for r in res if not r.passed]
    x1 = [r for r in res if r.id.startswith("0 -> Y1")]
    detail = f"{len(res) - len(bad)}/{len(res)} facts; X1 middle {x1[0].got['middle']}; " + \
             "; ".join(f"{r.id} got {r.got['middle']}" for r in bad)
    record(3, not bad, detail)
    assert not bad


def test_c04_herzog_popescu(e6, e8):
    count = 0
    for cat in (e6, e8):
        for e in cat.entries:
            assert approx.verify_knorrer_hp(e.mf, cat).passed
            count += 1
    for a in (3, 4, 5):
        cat = load_catalog(f"A:{a}")
        for e in cat.entries:
            N = branched_cover(e.mf, BranchedCoverSpec(cat.potential, 2, "y"))
            assert validate(N).valid
            assert approx.verify_knorrer_hp(N).passed
            count += 1
    record(4, True, f"{count} modules")


def test_c05_equivalence_coherence(e6, e8):
    bad = []
    count = 0
    for cat in (e6, e8):
        for e in cat.entries:
            for k in (1, 2):
                v = approx.equivalence_verdicts(e.mf, k)
                count += 1
                if len(set(v.values())) != 1:
                    bad.append((cat.label, e.name, k, v))
    record(5, not bad, f"{count} (module, k) pairs agree" if not bad else str(bad))
    assert not bad


def test_c06_sigma1(e6, e8):
    res = run_facts(e6, facts("E6", "sigma1")) + run_facts(e8, facts("E8", "sigma1"))
    ok = all(r.passed for r in res)
    record(6, ok, "; ".join(str(r.got) for r in res))
    assert ok


def test_c07_cross_oracle(e6):
    count = 0
    for e in e6.entries:
        for k in (1, 2):
            S = homalg.syzygy_module(quotient_presentation(e.mf, k))
            assert S.status == "ok" and S.mcm
            assert approx.same_up_to_free(extension_block(e.mf, k), S.mf)
            count += 1
    record(7, True, f"{count} pairs isomorphic")


def test_c08_quivers(e6, e8):
    Q6 = semigroup.irreducible_arrows(sigma_ideals(e6))
    assert Q6.labels() == sorted([3, 0, 4, 5, 3, 0, -2, 2, 0])
    res = run_facts(e6, facts("E6", "quiver")) + run_facts(e8, facts("E8", "quiver"))
    Q8 = semigroup.irreducible_arrows(sigma_ideals(e8))
    doubles = sorted(k for k, c in Q8.counts().items() if c == 2)
    ok = all(r.passed for r in res) and doubles == [("M2", "N2"), ("N2", "M2")]
    record(8, ok, f"E6 {len(Q6.arrows)} arrows, E8 {len(Q8.arrows)} arrows, doubles {doubles}")
    assert ok


def test_c09_resolutions(e6, e8):
    res = run_facts(e6, facts("E6", "resolution"))
    assert len(res) == 2 and all(r.passed for r in res)
    summary = []
    for cat in (e6, e8):
        ideals = sigma_ideals(cat)
        Q = semigroup.irreducible_arrows(ideals)
        for v in ideals:
            tr = semigroup.simple_resolution(ideals, v, 6, cat, Q, cat.cover["var"])
            assert tr.composes_to_zero
            assert tr.terminates or (tr.period in (1, 2) and tr.onset <= 2), (cat.label, v, tr.as_dict())
            summary.append(f"{cat.label}:{v}={'fin' if tr.terminates else tr.period}")
    record(9, True, " ".join(summary))


def test_c10_sigma_witness(e8):
    res = run_facts(e8, facts("E8", "witness"))
    W = approx.sigma_factorization_witness(e8.get("A2"), 1, 2, e8)
    ok = all(r.passed for r in res) and W.free_rank == 3 and W.rank_balance
    record(10, ok, f"middle {W.middle}, free rank {W.free_rank}")
    assert ok


@pytest.mark.slow
def test_c11_takahashi(F):
    X = MatrixFactorization.from_strings([["x"]], [["x"]], "x^2", Ring("x", F))
    v = approx.takahashi_check(X, [2, 2])
    record(11, v.passed, f"got {v.got}, expected {v.expected}, free {v.free_rank}")
    assert v.passed


def test_c12_bounds():
    want = {(4, 3): (4, 7, 1), (5, 3): (5, 9, 1), (2, 2, 2): (1, 1, 0)}
    got = {ex: (r.loewy, r.bfk, r.cover_sum) for ex in want for r in [approx.bph_bounds(ex)]}
    sweep = approx.random_exponent_sweep(100, seed=0)
    ok = got == want and len(sweep) == 100 and all(r.cover_sum <= r.bfk for r in sweep)
    record(12, ok, f"{got}; sweep of {len(sweep)} ok")
    assert ok


def _random_invertible(ring, n, rng, prec):
    f = ring.field
    while True:
        C = [[f.random(rng, small=True) for _ in range(n)] for _ in range(n)]
        from mfcover import linalg
        if linalg.det(f, C):
            break
    t = TruncatedSeries.var(ring, "t", prec)
    return SeriesMatrix([[TruncatedSeries.constant(ring, C[i][j], prec) + t * random_series(ring, prec, rng, 0.3)
                          for j in range(n)] for i in range(n)])


def test_c13_property_suites(e6, e8, F):
    rng = random.Random(13)
    # MF identity on constructed factorizations
    built = []
    for cat in (e6, e8):
        for e in cat.entries:
            built += [e.mf, syzygy_mf(e.mf), extension_block(e.mf, 1), extension_block(e.mf, 2)]
    xs = Ring("u", F)
    built.append(tensor_hat(e6.get("N1"), MatrixFactorization.from_strings([["u"]], [["u^2"]], "u^3", xs)))
    for e in load_catalog("A:5").entries:
        built.append(branched_cover(e.mf, BranchedCoverSpec(e.mf.potential, 3, "y")))
    assert all(validate(X).valid for X in built)
    # decompose and recompose on random direct sums
    names = e6.names
    for _ in range(50):
        pick = [rng.choice(names) for _ in range(rng.randint(1, 3))]
        X = direct_sum_all([random_graded_conjugate(e6.get(n), rng) for n in pick], e6.potential)
        D = homalg.decompose(X, e6, rng)
        want = {}
        for n in pick:
            want[n] = want.get(n, 0) + 1
        assert D.as_dict() == want
        assert homalg.is_isomorphic(D.recompose(e6.potential), X, rng).isomorphic
    # Smith invariance under conjugation
    T = Ring("t", F)
    for _ in range(50):
        n = rng.randint(1, 4)
        exps = sorted(rng.randint(0, 6) for _ in range(n))
        z = TruncatedSeries.zero(T, 20)
        Dg = SeriesMatrix([[TruncatedSeries.var(T, "t", 20, exps[i]) if i == j else z for j in range(n)]
                           for i in range(n)])
        from mfcover.series import matrix_product
        M = matrix_product(matrix_product(_random_invertible(T, n, rng, 20), Dg), _random_invertible(T, n, rng, 20))
        assert homalg.smith_over_dvr(M) == exps
    # precision coherence
    xy = e6.potential.ring
    for _ in range(10):
        a, b = random_series(xy, 12, rng, 0.3), random_series(xy, 12, rng, 0.3)
        assert (a * b).truncate(7) == a.truncate(7) * b.truncate(7)
    record(13, True, f"{len(built)} factorizations, 50 sums, 50 Smith conjugations")
