"""Reproduce the worked curve examples and diff them against the golden facts."""

import json
from dataclasses import dataclass, field as dc_field

from . import approx, homalg, semigroup
from .catalog import DATA, cover_spec, load_catalog
from .mf import MatrixFactorization, branched_cover, syzygy_mf
from .series import Ring


@dataclass
class FactResult:
    id: str
    passed: bool
    expected: object
    got: object
    note: str = None

    def as_dict(self):
        d = {"id": self.id, "passed": self.passed, "expected": self.expected, "got": self.got}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class ReproReport:
    label: str
    facts: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return all(f.passed for f in self.facts)

    def first_failure(self):
        for f in self.facts:
            if not f.passed:
                return f
        return None

    def as_dict(self):
        bad = self.first_failure()
        return {"label": self.label, "passed": self.passed, "total": len(self.facts),
                "failed": sum(not f.passed for f in self.facts), "facts": [f.as_dict() for f in self.facts],
                "first_failure": bad.as_dict() if bad else None}


def load_golden(label, path=None):
    base = path or DATA / label.lower()
    return json.loads((base / "golden.json").read_text())


def sigma_ideals(cat):
    S = semigroup.SemigroupRing(*cat.semigroup)
    ideals = {e.name: semigroup.FractionalIdeal(S, e.ideal) for e in cat.entries if e.ideal}
    ideals[semigroup.R_SHARP] = semigroup.FractionalIdeal(S, [0])
    return ideals


def _cover_syzygy(cat, fact):
    spec = cover_spec(cat)
    ring = Ring(cat.cover["base_ring"], cat.potential.ring.field)
    X = MatrixFactorization.from_strings([[fact["phi"]]], [[fact["psi"]]], fact["base"], ring,
                                         prec=cat.potential.prec)
    return cat.match(branched_cover(X, spec))


def _approximation(cat, fact, var):
    N = cat.get(fact["module"])
    fn = approx.right_approximation if fact["side"] == "right" else approx.left_approximation
    W = fn(N, 1, cat, var)
    return {"other": W.names.get("kernel"), "middle": W.middle.as_dict()}


def check_fact(cat, fact, ctx):
    var = cat.cover["var"]
    kind = fact["kind"]
    note = fact.get("note")
    if kind == "cover_syzygy":
        got = _cover_syzygy(cat, fact)
        return FactResult(fact["id"], got == fact["expect"], fact["expect"], got, note)
    if kind == "syzygy":
        got = cat.match(syzygy_mf(cat.get(fact["of"])))
        return FactResult(fact["id"], got == fact["expect"], fact["expect"], got, note)
    if kind == "approximation":
        got = _approximation(cat, fact, var)
        want = {"other": fact["other"], "middle": fact["middle"]}
        return FactResult(fact["id"], got == want, want, got, note)
    if kind == "sigma1":
        got = sorted([e.name for e in cat.entries if homalg.annihilator_power(e.mf, var) <= 1] + ["free"])
        return FactResult(fact["id"], got == sorted(fact["expect"]), sorted(fact["expect"]), got, note)
    if kind == "quiver":
        Q = ctx.setdefault("quiver", semigroup.irreducible_arrows(sigma_ideals(cat)))
        got = sorted(list(a) for a in Q.arrows)
        want = sorted(fact["arrows"])
        return FactResult(fact["id"], got == want, want, got, note)
    if kind == "resolution":
        ideals = sigma_ideals(cat)
        Q = ctx.setdefault("quiver", semigroup.irreducible_arrows(ideals))
        tr = semigroup.simple_resolution(ideals, fact["vertex"], len(fact["steps"]) + 2, cat, Q, var)
        got = {"steps": [dict(sorted(s.items())) for s in tr.steps[:len(fact["steps"])]], "period": tr.period}
        want = {"steps": [dict(sorted(s.items())) for s in fact["steps"]], "period": fact["period"]}
        return FactResult(fact["id"], got == want, want, got, note)
    if kind == "witness":
        W = approx.sigma_factorization_witness(cat.get(fact["module"]), fact["j"], fact["k"], cat, var)
        got = {"left": W.left, "middle": W.middle, "right": W.right}
        want = {k: fact[k] for k in ("left", "middle", "right")}
        return FactResult(fact["id"], got == want and W.rank_balance, want, got, note)
    raise ValueError(f"unknown fact kind {kind!r}")


def run_repro(label, field=None, path=None):
    cat = load_catalog(label, field, path)
    golden = load_golden(label, path)
    rep = ReproReport(golden["label"])
    ctx = {}
    for fact in golden["facts"]:
        rep.facts.append(check_fact(cat, fact, ctx))
    return rep
