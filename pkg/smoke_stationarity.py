import sys, time

sys.path.insert(0, "src")
from fractions import Fraction as Fr

from polystat.geometry import ConvexPolyhedron, PolyUnion
from polystat.mappings import PolyMapping
from polystat import stationarity as st

t0 = time.time()

# Example: F(z) = {0} for z >= 0 and {1} for z <= 0; G(z, l) = [-z-l, inf);
# f(z) = z; M = R.  n = m = s = 1.
p1 = ConvexPolyhedron(2, ineq=[((-1, 0), 0)], eq=[((0, 1), 0)])
p2 = ConvexPolyhedron(2, ineq=[((1, 0), 0)], eq=[((0, 1), 1)])
F = PolyMapping(1, 1, PolyUnion(2, [p1, p2]))
g1 = ConvexPolyhedron(3, ineq=[((-1, -1, -1), 0)])
G = PolyMapping(2, 1, PolyUnion(3, [g1]))
M = PolyUnion(1, [ConvexPolyhedron(1)])
obj = st.Objective.affine([1])
prog = st.ImplicitProgram(1, 1, 1, obj, F, G, M, structure="difference", name="ex-a")

derived = st.build_derived(prog)
print("H pieces:", len(derived.H.graph.pieces), "calH pieces:", len(derived.cal_H.graph.pieces))

# dom K should be [-1, inf)
domk = derived.K.domain()
assert domk.contains((-1,)) and domk.contains((5,)) and not domk.contains((Fr(-11, 10),))
assert derived.Z.contains((-1,)) and not derived.Z.contains((-2,))

# ---- at z = -1 (global minimizer of the implicit problem) ----
z = (-1,)
reps = st.K_stratum_representatives(prog, z, derived)
print("strata at -1:", reps)
assert len(reps) == 1 and reps[0]["point"] == (1,)

vi = st.check_stationarity(prog, z, "implicit", derived=derived)
print("implicit@-1:", vi.holds, vi.witnesses)
assert vi.holds and vi.witnesses["nu"] == (1,)
assert st.reverify_stationarity(prog, derived, z, vi)

rf = st.check_stationarity(prog, z, "fuzzy", derived=derived)
assert isinstance(rf, st.StationarityReport) and rf.exists_holds and rf.forall_holds
fv = rf.per_stratum[0]
print("fuzzy@-1:", fv.holds, fv.witnesses)
assert fv.witnesses["mu"] == (-1,) and fv.witnesses["nu"] == (1,)
assert st.reverify_stationarity(prog, derived, z, fv)

re_ = st.check_stationarity(prog, z, "explicit", lam=(1,), derived=derived)
print("explicit@-1:", re_.holds, re_.witnesses)
assert re_.holds and re_.witnesses["mu"] == (-1,) and re_.witnesses["nu"] == (1,)
assert st.reverify_stationarity(prog, derived, z, re_)

for kind, expect in [
    ("mordukhovich_i", True),
    ("sigma", True),
]:
    v = st.check_cq(prog, z, kind, derived=derived)
    print(kind, "@-1:", v.holds, v.certificates)
    assert v.holds is expect
for kind in ("mordukhovich_ii", "mordukhovich_iii", "abstract_cq", "mr_cq", "strong_cq", "inc_lambda"):
    v = st.check_cq(prog, z, kind, lam=(1,), derived=derived)
    print(kind, "@-1:", v.holds, v.certificates)
    assert v.holds, kind
inc = st.check_cq(prog, z, "inc_lambda", lam=(1,), derived=derived)
assert "structured-equality-fuzzy-explicit" in inc.certificates

# ---- at z = 0 (stationary for the implicit condition, not a minimum) ----
z0 = (0,)
reps0 = st.K_stratum_representatives(prog, z0, derived)
pts = sorted(r["point"] for r in reps0)
print("strata at 0:", reps0)
assert pts == [(0,), (1,)]

vi0 = st.check_stationarity(prog, z0, "implicit", derived=derived)
print("implicit@0:", vi0.holds, vi0.witnesses)
assert vi0.holds and vi0.witnesses["nu"] == (1,)
assert st.reverify_stationarity(prog, derived, z0, vi0)

rf0 = st.check_stationarity(prog, z0, "fuzzy", derived=derived)
by_lam = {r.witnesses["lambda"]: r for r in rf0.per_stratum}
print("fuzzy@0:", {k: v.holds for k, v in by_lam.items()})
assert by_lam[(0,)].holds and not by_lam[(1,)].holds
assert rf0.exists_holds and not rf0.forall_holds

re0 = st.check_stationarity(prog, z0, "explicit", derived=derived)
by_lam_e = {r.witnesses["lambda"]: r for r in re0.per_stratum}
print("explicit@0:", {k: v.holds for k, v in by_lam_e.items()})
assert by_lam_e[(0,)].holds and not by_lam_e[(1,)].holds

# pipeline wiring
rep = st.pipeline(prog, z0, derived=derived)
print("pipeline keys:", sorted(rep))
assert rep["stationarity"]["implicit"]["holds"]
assert rep["stationarity"]["fuzzy"]["exists_holds"]
assert not rep["stationarity"]["fuzzy"]["forall_holds"]
assert rep["intermediate_locally_bounded"] is True
assert all(c["sound"] for c in rep["consistency"])
assert [b["certified"] for b in rep["branches"]] == [True, True, True, True]
print("edges:", rep["edges"][0])

# convex precondition: gph F has two pieces, so this must refuse
try:
    st.convex_sufficiency(prog, z, derived=derived)
    raise AssertionError("expected PreconditionError")
except st.PreconditionError:
    pass

print("ALL STATIONARITY SMOKE OK in %.2fs" % (time.time() - t0))
