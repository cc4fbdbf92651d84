"""Name the indecomposables found by explore_catalog.py and write catalog fixtures."""
import json, sys
from pathlib import Path
from mfcover.series import Field, Ring, TruncatedSeries
from mfcover.mf import MatrixFactorization, parse_mf, syzygy_mf, format_mf, extension_block
from mfcover import homalg
from mfcover.catalog import SingularityCatalog, CatalogEntry, quotient_decomposition

label = sys.argv[1]
F = Field(None)
R = Ring("x,y", F)
found = [parse_mf(t, F) for t in Path(f"/tmp/{label}_q.txt").read_text().split("===\n") if t.strip()]


def mf(phi, psi, pot):
    return MatrixFactorization.from_strings(phi, psi, pot, R)


def find(X):
    hits = [Y for Y in found if Y.size == X.size and homalg.is_isomorphic(X, Y).isomorphic]
    assert len(hits) == 1, X
    return hits[0]


if label == "e6":
    pot = "x^4+y^3"
    named = {"N1": (mf([["x^3", "-y"], ["y^2", "x"]], [["x", "y"], ["-y^2", "x^3"]], pot), "published"),
             "M2": (mf([["x^2", "-y"], ["y^2", "x^2"]], [["x^2", "y"], ["-y^2", "x^2"]], pot), "published")}
    named["M1"] = (syzygy_mf(named["N1"][0]), "published")
    sigma = ["M1", "N1", "M2"]
else:
    pot = "x^5+y^3"
    named = {"N1": (mf([["x^4", "-y"], ["y^2", "x"]], [["x", "y"], ["-y^2", "x^4"]], pot), "published"),
             "N2": (mf([["x^3", "-y"], ["y^2", "x^2"]], [["x^2", "y"], ["-y^2", "x^3"]], pot), "published")}
    named["M1"] = (syzygy_mf(named["N1"][0]), "published")
    named["M2"] = (syzygy_mf(named["N2"][0]), "published")
    # A2 from its displayed presentation; psi = f * phi^-1
    phi = [["x", "-y", "0"], ["0", "x^2", "-y"], ["y", "0", "x^2"]]
    import sympy
    x, y = sympy.symbols("x y")
    P = sympy.Matrix([[sympy.sympify(e.replace("^", "**")) for e in r] for r in phi])
    Q = sympy.simplify((x**5 + y**3) * P.inv())
    psi = [[str(sympy.expand(Q[i, j])).replace("**", "^").replace(" ", "") for j in range(3)] for i in range(3)]
    named["A2"] = (mf(phi, psi, pot), "published")
    sigma = ["M1", "N1", "M2", "N2"]

pf = TruncatedSeries.parse(pot, R)
cat = SingularityCatalog(label.upper(), pf, [CatalogEntry(k, v[0], homalg.graded_rank(v[0]), None, v[1])
                                            for k, v in named.items()])
rest = [Y for Y in found if all(not (Y.size == v[0].size and homalg.is_isomorphic(Y, v[0]).isomorphic)
                                for v in named.values())]


def middle(Y):
    return homalg.decompose(extension_block(Y, 1), cat).as_dict()


for Y in rest:
    print(Y.size, homalg.graded_rank(Y), middle(Y), quotient_decomposition(Y))


def pick(size, rank, mid):
    hits = [Y for Y in rest if Y.size == size and homalg.graded_rank(Y) == rank and middle(Y) == mid]
    return hits


def om(Y):
    O = syzygy_mf(Y)
    return [Z for Z in rest if Z.size == O.size and homalg.is_isomorphic(Z, O).isomorphic][0]


if label == "e6":
    A, = pick(3, 2, {"M1": 2, "M2": 1})
    B, = pick(3, 1, {"N1": 2, "M2": 1})
    X, = pick(4, 2, {"M1": 1, "N1": 1, "M2": 2})
    extra = {"A": A, "B": B, "X": X}
    order = ["M1", "N1", "M2", "A", "B", "X"]
    ideals = {"M1": [3, 8], "N1": [3, 4], "M2": [6, 8]}
    cover = {"base_ring": "x", "base": "x^4", "n": 3, "var": "y"}
    semigroup = [3, 4]
    param = {"x": [1, 3], "y": [-1, 4]}
    ar = {"M2": ["X"], "X": ["M2", "B", "A"], "B": ["X", "M1"], "A": ["X", "N1"], "M1": ["A"],
          "N1": ["B", "R"], "R": ["M1"]}
else:
    A1, = pick(3, 2, {"M1": 2, "N2": 1})
    B1 = om(A1)
    B2 = [Y for Y in rest if Y.size == 3 and homalg.is_isomorphic(syzygy_mf(Y), named["A2"][0]).isomorphic][0]
    C2, = pick(4, 2, {"M1": 1, "N2": 3})
    D2 = om(C2)
    C1 = pick(4, 2, {"M1": 1, "M2": 1, "N1": 1, "N2": 1})[0]
    D1 = om(C1)
    X1 = pick(6, 3, {"M1": 1, "M2": 2, "N1": 1, "N2": 2})[0]
    Y1 = om(X1)
    X2, = pick(5, 3, {"M1": 2, "M2": 1, "N2": 2})
    Y2 = om(X2)
    extra = dict(A1=A1, B1=B1, B2=B2, C1=C1, D1=D1, C2=C2, D2=D2, X1=X1, Y1=Y1, X2=X2, Y2=Y2)
    order = ["M1", "N1", "M2", "N2", "A1", "B1", "A2", "B2", "C1", "D1", "C2", "D2", "X1", "Y1", "X2", "Y2"]
    ideals = {"M1": [3, 10], "N1": [3, 5], "M2": [6, 10], "N2": [5, 6]}
    cover = {"base_ring": "x", "base": "x^5", "n": 3, "var": "y"}
    semigroup = [3, 5]
    param = {"x": [1, 3], "y": [-1, 5]}
    ar = {}

allmods = {k: v[0] for k, v in named.items()}
allmods.update(extra)
assert len(allmods) == len(order) == len(found), (len(allmods), len(found))
out = Path("src/mfcover/data") / label
out.mkdir(parents=True, exist_ok=True)
entries = []
for name in order:
    X = allmods[name]
    (out / f"{name}.mf").write_text(format_mf(X))
    entries.append({"name": name, "file": f"{name}.mf", "rank": homalg.graded_rank(X),
                    "ideal": ideals.get(name), "provenance": named[name][1] if name in named else "fixture"})
full = SingularityCatalog(label.upper(), pf, [CatalogEntry(e["name"], allmods[e["name"]], e["rank"]) for e in entries])
facts = {"quotients": {}, "syzygy": {}, "approximations": [], "almost_split": []}
for name in order:
    X = allmods[name]
    facts["quotients"][name] = {str(k): v for k, v in quotient_decomposition(X).items()}
    facts["syzygy"][name] = full.match(syzygy_mf(X))
    if name not in sigma:
        facts["approximations"].append({"end": name, "start": facts["syzygy"][name],
                                        "middle": homalg.decompose(extension_block(X, 1), full).as_dict()})
from mfcover.catalog import extension_middles
for z in sigma:
    Z = allmods[z]
    mids = [homalg.decompose(E, full).as_dict() for E in extension_middles(Z, syzygy_mf(Z), extra=0)]
    facts["almost_split"].append({"end": z, "start": full.match(syzygy_mf(Z)), "middle": mids[-1]})
man = {"label": label.upper(), "ring": "x,y", "potential": pot, "cover": cover, "semigroup": semigroup,
       "parametrization": param, "sigma1": sigma, "ar_quiver": ar, "entries": entries, "facts": facts}
(out / "manifest.json").write_text(json.dumps(man, indent=1) + "\n")
print(json.dumps(facts, indent=1))
