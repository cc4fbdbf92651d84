"""Catalogs of indecomposable matrix factorizations and matching against them."""

import json
import threading
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from . import homalg
from .mf import (MatrixFactorization, BranchedCoverSpec, extension_block, extension_mf, parse_mf,
                 quotient_presentation, strip_with_rank, syzygy_mf, validate)
from .series import Field, Ring, TruncatedSeries, make_rng

DATA = Path(__file__).parent / "data"


@dataclass
class CatalogEntry:
    name: str
    mf: MatrixFactorization
    rank: int
    ideal: tuple = None
    provenance: str = "fixture"


@dataclass
class SingularityCatalog:
    label: str
    potential: TruncatedSeries
    entries: list
    ar_quiver: dict = dc_field(default_factory=dict)
    cover: dict = None
    semigroup: tuple = None
    sigma1: list = dc_field(default_factory=list)
    facts: dict = dc_field(default_factory=dict)

    def __hash__(self):
        return id(self)

    @property
    def names(self):
        return [e.name for e in self.entries]

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def get(self, name):
        return self.entry(name).mf

    def match(self, X):
        """Name of the unique entry isomorphic to X, "free" for R, or "unmatched"."""
        if X.potential != self.potential:
            raise ValueError("potential mismatch")
        X0, free, _ = strip_with_rank(X)
        if X0.size == 0:
            return "free" if free == 1 else ("zero" if free == 0 else "unmatched")
        if free:
            return "unmatched"
        rank = homalg.graded_rank(X0)
        hits = [e.name for e in self.entries
                if e.mf.size == X0.size and e.rank == rank and homalg.is_isomorphic(e.mf, X0).isomorphic]
        if len(hits) > 1:
            raise RuntimeError(f"catalog corruption: {hits} all match")
        return hits[0] if hits else "unmatched"

    def omega(self, name):
        return self.match(syzygy_mf(self.get(name)))


_LOADED = {}
_LOCK = threading.Lock()


def _a_type(a, field):
    ring = Ring("x", field)
    f = f"x^{a}"
    entries = []
    for e in range(1, a):
        X = MatrixFactorization.from_strings([[f"x^{e}"]], [[f"x^{a - e}"]], f, ring, name=f"R/(x^{e})")
        entries.append(CatalogEntry(f"R/(x^{e})", X, 0, None, "generated"))
    return SingularityCatalog(f"A:{a}", TruncatedSeries.parse(f, ring), entries)


def load_catalog(label, field=None, path=None, check=True):
    """Load a catalog by label: "E6", "E8" or "A:a" for k[[x]]/(x^a)."""
    field = field or Field(32003)
    key = (label.upper(), field.name, str(path))
    with _LOCK:
        if key in _LOADED:
            return _LOADED[key]
    if label.upper().startswith("A:"):
        cat = _a_type(int(label.split(":")[1]), field)
    else:
        base = Path(path) if path else DATA / label.lower()
        if not (base / "manifest.json").exists():
            raise KeyError(f"unknown catalog {label!r}")
        man = json.loads((base / "manifest.json").read_text())
        ring = Ring(man["ring"], field)
        pot = TruncatedSeries.parse(man["potential"], ring)
        entries = []
        for item in man["entries"]:
            X = parse_mf((base / item["file"]).read_text(), field, name=item["name"])
            if X.potential != pot:
                raise ValueError(f"entry {item['name']} has the wrong potential")
            rep = validate(X)
            if not rep.valid:
                raise ValueError(f"entry {item['name']} is not a matrix factorization: {rep.failures[0]}")
            ideal = tuple(item["ideal"]) if item.get("ideal") else None
            entries.append(CatalogEntry(item["name"], X, item["rank"], ideal, item["provenance"]))
        cat = SingularityCatalog(man["label"], pot, entries, man.get("ar_quiver", {}), man.get("cover"),
                                 tuple(man["semigroup"]) if man.get("semigroup") else None,
                                 man.get("sigma1", []), man.get("facts", {}))
        if check:
            for i, e in enumerate(cat.entries):
                for e2 in cat.entries[i + 1:]:
                    if e.mf.size == e2.mf.size and homalg.is_isomorphic(e.mf, e2.mf).isomorphic:
                        raise ValueError(f"catalog entries {e.name} and {e2.name} are isomorphic")
    with _LOCK:
        return _LOADED.setdefault(key, cat)


def cover_spec(cat):
    c = cat.cover
    ring = Ring(c["base_ring"], cat.potential.ring.field)
    return BranchedCoverSpec(TruncatedSeries.parse(c["base"], ring), c["n"], c["var"])


# ---------------------------------------------------------------- validation

@dataclass
class CatalogReport:
    label: str
    passed: bool
    checked: list = dc_field(default_factory=list)
    failures: list = dc_field(default_factory=list)

    def as_dict(self):
        return {"label": self.label, "passed": self.passed, "checked": self.checked, "failures": self.failures}


def quotient_decomposition(N, var="y"):
    """Cyclic decomposition of N/yN over k[[x]]/(x^a) as {exponent: multiplicity}."""
    P = quotient_presentation(N, 1, var).eliminate(var)
    return homalg.decompose_artinian(P)


def extension_middles(end, start, rng=None, extra=3):
    """Decompositions of middle terms of extensions 0 -> start -> E -> end -> 0, over the
    homogeneous basis elements of Ext^1 and a few random combinations."""
    rng = rng or make_rng(0)
    f = end.field
    OZ = syzygy_mf(end)
    outs = []
    reps = []
    for d in homalg.stable_hom_dims(OZ, start):
        hd = homalg._hom_degree(OZ, start, d)
        _, alphas, _, _ = homalg.stable_hom_degree(OZ, start, d)
        for al, be in zip(hd.alphas, hd.betas):
            reps.append((al, be))
    from . import rawmat
    for al, be in reps:
        outs.append(extension_mf(end, start, al, rawmat.scale(f, be, f.neg(f.one))))
    for _ in range(extra if len(reps) > 1 else 0):
        al = rawmat.zeros(start.size, end.size)
        be = rawmat.zeros(start.size, end.size)
        for a2, b2 in reps:
            c = f.random(rng, small=True)
            al = rawmat.add(f, al, rawmat.scale(f, a2, c))
            be = rawmat.add(f, be, rawmat.scale(f, b2, c))
        outs.append(extension_mf(end, start, al, rawmat.scale(f, be, f.neg(f.one))))
    return outs


def _ms(d):
    return {k: v for k, v in sorted(d.items()) if v}


def validate_catalog(cat, deep=True):
    rep = CatalogReport(cat.label, True)

    def check(entry, fact, ok, detail=None):
        rep.checked.append(fact)
        if not ok:
            rep.passed = False
            rep.failures.append({"entry": entry, "fact": fact, "detail": detail})

    for e in cat.entries:
        v = validate(e.mf)
        check(e.name, "factorization identity", v.valid, v.failures[:1])
        check(e.name, "reduced", v.reduced)
        if cat.entries and cat.cover:
            check(e.name, f"rank {e.rank}", homalg.graded_rank(e.mf) == e.rank, homalg.graded_rank(e.mf))
    for i, e in enumerate(cat.entries):
        for e2 in cat.entries[i + 1:]:
            if e.mf.size == e2.mf.size:
                iso = homalg.is_isomorphic(e.mf, e2.mf).isomorphic
                check(f"{e.name},{e2.name}", "pairwise non-isomorphic", not iso)
    if not deep:
        return rep
    for e in cat.entries:
        d = homalg.decompose(e.mf).as_dict()
        check(e.name, "indecomposable", len(d) == 1 and list(d.values()) == [1], d)
        om = cat.match(syzygy_mf(e.mf))
        check(e.name, "closed under syzygy", om not in ("unmatched",), om)
    facts = cat.facts
    var = cat.cover["var"] if cat.cover else "y"
    for name, want in facts.get("quotients", {}).items():
        got = quotient_decomposition(cat.get(name), var)
        want = {int(k): v for k, v in want.items()}
        check(name, f"{name}/y{name} = {want}", got == want, got)
    for name, want in facts.get("syzygy", {}).items():
        got = cat.omega(name)
        check(name, f"Omega({name}) = {want}", got == want, got)
    for seq in facts.get("almost_split", []):
        start, middle, end = seq["start"], seq["middle"], seq["end"]
        found = False
        for E in extension_middles(cat.get(end), cat.get(start)):
            if homalg.decompose(E, cat).as_dict() == middle:
                found = True
                break
        check(end, f"0 -> {start} -> {middle} -> {end} -> 0", found)
    for seq in facts.get("approximations", []):
        N = cat.get(seq["end"])
        D = homalg.decompose(extension_block(N, 1, var), cat).as_dict()
        check(seq["end"], f"0 -> {seq['start']} -> {seq['middle']} -> {seq['end']} -> 0",
              D == seq["middle"] and cat.omega(seq["end"]) == seq["start"], D)
    return rep
