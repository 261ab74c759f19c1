import sys, time

sys.path.insert(0, "src")
from fractions import Fraction as Fr

from polystat import problems as pb
from polystat import stationarity as st
from polystat.geometry import EMPTY, ConvexPolyhedron, PolyUnion, limiting_normal_cone, union_equal

t0 = time.time()

# ---------------- CCMP n=2 kappa=1, f = z1 + z2, M free ----------------
inst = pb.CcmpInstance(2, 1, st.Objective.affine([1, 1]))
prog, forms = pb.build_ccmp(inst)
der = st.build_derived(prog)

# K((1,0)) = {(0,1)}
k10 = forms.multiplier_set((1, 0))
assert k10 is not EMPTY and k10.contains((0, 1))
eng10 = der.K.image_at((1, 0))
ok, wit = union_equal(eng10, k10)
assert ok, wit
p = eng10.pieces[0]
for i in range(2):
    import polystat.stationarity as _st
    c = _st._unit_row(2, [(i, 1)])
    hi = p.lp(c, maximize=True); lo = p.lp(c, maximize=False)
    assert hi.value == lo.value == (0, 1)[i]
print("K((1,0)) == {(0,1)} ok")

# N_{D_k}(0) = axes; N at (-1,0) = span(e2)
n0 = forms.normal_cone((0, 0))
assert len(n0.pieces) == 2
assert n0.contains((5, 0)) and n0.contains((0, -3)) and not n0.contains((1, 1))
nm = forms.normal_cone((-1, 0))
assert nm.contains((0, 7)) and not nm.contains((1, 0))
print("closed-form cones ok")

# engine cone equality at all feasible sweep points
feas = [z for z in [(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1)]
        if sum(1 for v in z if v != 0) <= 1]
assert len(feas) == 5
for z in feas:
    eng = limiting_normal_cone(forms.d_kappa, z)
    ok, wit = union_equal(eng, forms.normal_cone(z))
    assert ok, (z, wit)
print("cone equality on n=2 sweep ok (%d points)" % len(feas))

# strata of K(0): 7 cells, explicit holds on each; implicit fails at 0
reps = st.K_stratum_representatives(prog, (0, 0), der)
print("strata at 0:", [r["stratum"] for r in reps], [r["point"] for r in reps])
assert len(reps) == 7
rep_exp = st.check_stationarity(prog, (0, 0), "explicit", derived=der)
assert rep_exp.forall_holds, [(v.stratum, v.holds) for v in rep_exp.per_stratum]
for v in rep_exp.per_stratum:
    assert st.reverify_stationarity(prog, der, (0, 0), v)
print("explicit holds on all 7 strata at 0, witnesses re-substitute")

vi0 = st.check_stationarity(prog, (0, 0), "implicit", derived=der)
assert not vi0.holds
vim = st.check_stationarity(prog, (-1, 0), "implicit", derived=der)
assert not vim.holds
print("implicit fails at 0 and at (-1,0)")

# closed-form explicit agrees
ce0 = forms.explicit_stationarity((0, 0))
cem = forms.explicit_stationarity((-1, 0))
assert ce0.holds and not cem.holds
rep_m = st.check_stationarity(prog, (-1, 0), "explicit", derived=der)
assert not rep_m.exists_holds
print("closed-form explicit matches engine at 0 and (-1,0)")

# pattern check: with objective z2 the implicit condition holds at (-1,0)
# with nu supported off the first coordinate
inst2 = pb.CcmpInstance(2, 1, st.Objective.affine([0, 1]))
prog2, forms2 = pb.build_ccmp(inst2)
der2 = st.build_derived(prog2)
vi2 = st.check_stationarity(prog2, (-1, 0), "implicit", derived=der2)
assert vi2.holds, vi2.witnesses
assert vi2.witnesses["nu"][0] == 0
assert st.reverify_stationarity(prog2, der2, (-1, 0), vi2)
print("implicit holds at (-1,0) for f=z2 with nu pattern", vi2.witnesses["nu"])

# full cross-check
cc = pb.ccmp_cross_check(inst, (0, 0))
assert cc["ok"], cc
cc2 = pb.ccmp_cross_check(inst, (-1, 0))
assert cc2["ok"], cc2
print("ccmp_cross_check ok at (0,0) and (-1,0):", time.time() - t0, "s")

# n=3 spec example: z = (1,0,0) -> cone = {nu: nu_1 = 0} single piece
inst3 = pb.CcmpInstance(3, 1, st.Objective.affine([1, 1, 1]))
_, forms3 = pb.build_ccmp(inst3)
n3 = forms3.normal_cone((1, 0, 0))
assert len(n3.pieces) == 1
assert n3.contains((0, 4, -5)) and not n3.contains((1, 0, 0))
eng3 = limiting_normal_cone(forms3.d_kappa, (1, 0, 0))
ok, wit = union_equal(eng3, n3)
assert ok, wit
print("n=3 cone at (1,0,0) ok", time.time() - t0, "s")

# mordukhovich_i fails at 0 with a nonzero witness (composed H)
cq = st.check_cq(prog, (0, 0), "mordukhovich_i", derived=der)
assert not cq.holds and any(v != 0 for v in cq.witnesses["nu"] + cq.witnesses["xi"])
print("mordukhovich_i fails at 0 with witness", cq.witnesses)

print("CCMP BLOCK OK", time.time() - t0, "s")

# ---------------- bilevel ----------------
# 1-D toy: lower level min_y (1/2)y^2 + x*y s.t. y <= 0; K(x, y) at
# (x, y) = (0, 0): stationarity y + x + lam = 0 -> lam = 0. Singleton.
bi = pb.BilevelLqInstance(
    1, 1, 1,
    q=[[1]], p=[[1]], c=[0], a=[[1]], b=[0],
    upper=st.Objective.quadratic([[2, 0], [0, 2]], [0, 0]),
)
bprog, bforms = pb.build_bilevel_lq(bi)
kset = bforms.multiplier_set((0,), (0,))
assert kset is not EMPTY and kset.contains((0,))
cond = pb.bilevel_multiplier_conditions(bi, (0,), (0,), (0,))
print("bilevel 1-D:", cond)
assert cond["licq"] and cond["mfc"] and cond["singleton"]

# duplicated rows: LICQ fails, multiplier set is a segment (non-singleton)
bi2 = pb.BilevelLqInstance(
    1, 1, 2,
    q=[[1]], p=[[1]], c=[-1], a=[[1], [1]], b=[0, 0],
    upper=st.Objective.affine([1, 1]),
)
# at x=0, y=0: stationarity y + x - 1 + l1 + l2 = 0 -> l1 + l2 = 1
cond2 = pb.bilevel_multiplier_conditions(bi2, (0,), (0,), (Fr(1, 2), Fr(1, 2)))
print("bilevel duplicated:", cond2)
assert not cond2["licq"] and not cond2["mfc"] and not cond2["singleton"]
assert cond2["mfc_witness"] is not None

# fully explicit check vs engine explicit at the 1-D toy point
v_full = bforms.fully_explicit((0,), (0,), (0,))
bder = st.build_derived(bprog)
v_eng = st.check_stationarity(bprog, (0, 0), "explicit", lam=(0,), derived=bder)
print("bilevel fully-explicit:", v_full.holds, "engine:", v_eng.holds)
assert v_full.holds == v_eng.holds
print("BILEVEL BLOCK OK", time.time() - t0, "s")

# ---------------- EMOP ----------------
square = ConvexPolyhedron.from_box([(0, 1), (0, 1)])
eprog, eforms = pb.build_emop_linear([[1, 0], [0, 1]], square)
eder = st.build_derived(eprog)

# Psi((1,0)) = left edge {0} x [0,1]
psi = eforms.solution_set((1, 0))
assert psi.contains((0, 0)) and psi.contains((0, 1)) and psi.contains((0, Fr(1, 2)))
assert not psi.contains((Fr(1, 10), 0))

# dom K = lower-left edges
domk = eder.K.domain()
for pt, inside in [
    ((0, 0), True), ((0, 1), True), ((1, 0), True), ((0, Fr(1, 3)), True),
    ((Fr(1, 3), 0), True), ((Fr(1, 2), Fr(1, 2)), False), ((1, 1), False),
    ((Fr(1, 10), Fr(1, 10)), False),
]:
    assert domk.contains(pt) is inside, (pt, inside)
print("EMOP dom K = two lower edges ok")

# identical objective rows: scalarization constant in lambda -> Psi is one face
eprog2, eforms2 = pb.build_emop_linear([[1, 1], [1, 1]], square)
psi_a = eforms2.solution_set((1, 0))
psi_b = eforms2.solution_set((Fr(1, 2), Fr(1, 2)))
ok, wit = union_equal(psi_a, psi_b)
assert ok, wit
assert psi_a.contains((0, 0)) and not psi_a.contains((0, Fr(1, 2)))
print("EMOP identical rows -> single face ok")

# grid weak-efficiency oracle matches dom K on the square grid
pts, flags = pb.emop_weak_efficiency_grid([[1, 0], [0, 1]], square, Fr(1, 10))
mismatch = []
for pt, flag in zip(pts, flags):
    if domk.contains(pt) is not flag:
        mismatch.append((pt, flag))
assert not mismatch, mismatch[:5]
print("EMOP grid oracle matches dom K (%d grid points)" % len(pts))
print("EMOP BLOCK OK", time.time() - t0, "s")

# ---------------- examples + grid oracle ----------------
ea = pb.build_example("a")
cfg = pb.GridOracleConfig([(-3, 3)], Fr(1, 100), 2)
t1 = time.time()
rep = pb.oracle_relate(ea, cfg)
t_rel = time.time() - t1
print("oracle_relate(a) in %.2fs" % t_rel)
assert not rep["no_data"]
red = rep["reduced"]
p_locals = [r["point"] for r in red["points"] if r["local_min"]]
p_globals = [r["point"] for r in red["points"] if r["global_min"]]
assert p_locals == [["-1"]] and p_globals == [["-1"]], (p_locals, p_globals)
q_rows = {tuple(r["point"]): r for r in rep["lifted"]["points"]}
assert q_rows[("0", "0")]["local_min"] is True
assert q_rows[("0", "1")]["local_min"] is False
assert rep["correspondence"]["globals_agree"]
assert rep["descent"]["holds"]
# the spurious pair (0,0) is lifted-local; z=0 is not reduced-local
assert {"z": ["0"], "lambda": ["0"]} in rep["gaps"]
print("example (a) oracle relations ok", time.time() - t0, "s")

eb = pb.build_example("b")
cfg2 = pb.GridOracleConfig([(-3, 3)], Fr(1, 100), 2)
t1 = time.time()
rep_b = pb.oracle_relate(eb, cfg2)
t_rel_b = time.time() - t1
print("oracle_relate(b) in %.2fs" % t_rel_b)
qb = {tuple(r["point"]): r for r in rep_b["lifted"]["points"]}
neg = [k for k in qb if k[0].startswith("-")]
assert sorted(neg) == sorted(
    [("-2/5", "5/2"), ("-1/2", "2"), ("-4/5", "5/4"), ("-1", "1")]
), sorted(neg)
assert qb[("0", "0")]["local_min"] is True
pb_rows = {tuple(r["point"]): r for r in rep_b["reduced"]["points"]}
assert pb_rows[("0",)]["local_min"] is False
assert {"z": ["0"], "lambda": ["0"]} in rep_b["gaps"]
assert rep_b["descent"]["holds"]
print("example (b) oracle relations ok", time.time() - t0, "s")

# ---------------- instance json ----------------
progj, formsj = pb.instance_from_json(
    {"type": "ccmp", "n": 2, "kappa": 1,
     "objective": {"kind": "affine", "c": ["1", "1"], "c0": "0"}}
)
assert progj.name == "ccmp-2-1"
try:
    pb.instance_from_json({"type": "ccmp", "n": 2, "kappa": 1,
                           "objective": {"kind": "affine", "c": ["1", "1"], "c0": "0"},
                           "extra": 1})
    raise AssertionError("unknown field accepted")
except pb.PolystatError as exc:
    assert "extra" in str(exc)
print("instance json ok")

print("ALL PROBLEMS SMOKE OK in %.2fs" % (time.time() - t0))
