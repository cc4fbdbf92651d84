"""Close a set of indecomposables under extensions (used to author catalog fixtures)."""
import sys, time
from mfcover.series import Field, Ring, TruncatedSeries
from mfcover.mf import *
from mfcover.homalg import *
from mfcover.homalg import _hom_degree, _null_alphas, stable_hom_degree, graded_rank
from mfcover import rawmat

label = sys.argv[1]
fieldname = sys.argv[2] if len(sys.argv) > 2 else "q"
F = Field.parse(fieldname)
a = {"e6": 4, "e8": 5}[label]
Rx = Ring("x", F)
base = TruncatedSeries.parse(f"x^{a}", Rx)
spec = BranchedCoverSpec(base, 3)
covers = []
for e in range(1, a):
    X = MatrixFactorization.from_strings([[f"x^{a-e}"]], [[f"x^{e}"]], f"x^{a}", Rx)
    covers.append(strip_trivial_summands(branched_cover(X, spec)))
known = []
def add(P):
    for K in known:
        if is_isomorphic(K, P).isomorphic:
            return False
    known.append(P); return True
for C in covers:
    add(C); add(syzygy_mf(C))
def dump():
    with open(f"/tmp/{label}_{F.name.replace(':','')}.txt", "w") as fh:
        for K in known:
            fh.write(format_mf(K) + "===\n")
print("start", len(known))
done = set()
changed = True
while changed:
    changed = False
    for i, Z in enumerate(list(known)):
        for j, W in enumerate(list(known)):
            if (i, j) in done: continue
            done.add((i, j))
            OZ = syzygy_mf(Z)
            _, wf, aa, _ = OZ.grading()
            for d in range(-40, 40):
                dim, reps, nullb, lay = stable_hom_degree(OZ, W, d)
                if not dim: continue
                hd = _hom_degree(OZ, W, d)
                for al, be in zip(hd.alphas, hd.betas):
                    E = extension_mf(Z, W, al, rawmat.scale(F, be, F.neg(F.one)))
                    assert validate(E).valid
                    for P in decompose(E).pieces():
                        if add(P):
                            changed = True
                            print("new", len(known), "size", P.size, "rank", graded_rank(P), flush=True)
                            dump()
print("total", len(known))
import pickle
with open(f"/tmp/{label}_{F.name.replace(':','')}.txt", "w") as fh:
    for K in known:
        fh.write(format_mf(K) + "===\n")
