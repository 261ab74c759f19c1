"""Seeded property suites.

Five families, all with a fixed seed and exact arithmetic, so a failure
is a real bug rather than noise: polar biduality, projection membership,
stratification soundness (limiting normals are nearby regular normals),
witness re-verification of every holds verdict, and strata sufficiency
(a stratum representative speaks for random points of its stratum).
"""

import random
from fractions import Fraction as Fr

from polystat import problems as pb
from polystat import stationarity as st
from polystat.geometry import (
    ConvexPolyhedron,
    PolyUnion,
    contains_union,
    limiting_normal_cone,
    polar_cone,
    regular_normal_cone,
)
from polystat.geometry.ddm import cone_from_generators

SEED = 20240817


def _rand_rat(rng, span=4, denom=6):
    return Fr(rng.randint(-span, span), rng.randint(1, denom))


# ----------------------------------------------------------------- biduality


def test_polar_biduality_on_random_cones():
    rng = random.Random(SEED)
    cases = [
        ConvexPolyhedron.singleton((0, 0)),
        ConvexPolyhedron(2),
        ConvexPolyhedron(2, ineq=[((1, 0), 0)]),
        ConvexPolyhedron(2, eq=[((1, -1), 0)]),
    ]
    for _ in range(25):
        dim = rng.randint(1, 4)
        rays = [
            tuple(rng.randint(-3, 3) for _ in range(dim))
            for _ in range(rng.randint(0, 3))
        ]
        lines = [
            tuple(rng.randint(-3, 3) for _ in range(dim))
            for _ in range(rng.randint(0, 2))
        ]
        rays = [r for r in rays if any(r)]
        lines = [l for l in lines if any(l)]
        cases.append(cone_from_generators(dim, rays=rays, lines=lines))
    for cone in cases:
        double = polar_cone(polar_cone(cone))
        assert cone.same_set(double), cone.to_json()


# ------------------------------------------------- projection membership


def _random_polyhedron(rng, dim):
    ineq = []
    for _ in range(rng.randint(1, dim + 2)):
        coeffs = tuple(rng.randint(-2, 2) for _ in range(dim))
        ineq.append((coeffs, rng.randint(-2, 3)))
    box = []
    for i in range(dim):
        e = [0] * dim
        e[i] = 1
        box.append((tuple(e), 3))
        e2 = [0] * dim
        e2[i] = -1
        box.append((tuple(e2), 3))
    eq = []
    if rng.random() < 0.4:
        coeffs = tuple(rng.randint(-2, 2) for _ in range(dim))
        if any(coeffs):
            eq.append((coeffs, rng.randint(-1, 1)))
    return ConvexPolyhedron(dim, ineq=ineq + box, eq=eq)


def test_projection_membership_equivalence():
    rng = random.Random(SEED)
    samples = 0
    while samples < 1000:
        dim = rng.randint(3, 5)
        poly = _random_polyhedron(rng, dim)
        n_drop = rng.randint(1, dim - 1)
        dropped = sorted(rng.sample(range(dim), n_drop))
        kept = [i for i in range(dim) if i not in dropped]
        proj = poly.eliminate(dropped)
        for _ in range(40):
            y = tuple(_rand_rat(rng) for _ in kept)
            lifted = poly.slice(dict(zip(kept, y)))
            assert proj.contains(y) is (not lifted.is_empty()), (
                poly.to_json(),
                dropped,
                y,
            )
            samples += 1
    assert samples >= 1000


# ------------------------------------------- stratification soundness


def _soundness_cases():
    kink = PolyUnion(
        2,
        [
            ConvexPolyhedron(2, ineq=[((1, 0), 0)], eq=[((0, 1), 0)]),
            ConvexPolyhedron(2, ineq=[((0, 1), 0)], eq=[((1, 0), 0)]),
        ],
    )
    inst = pb.CcmpInstance(2, 1, st.Objective.affine([1, 1]))
    _, forms = pb.build_ccmp(inst)
    quad = ConvexPolyhedron(2, ineq=[((-1, 0), 0), ((0, -1), 0)])
    tri = ConvexPolyhedron(
        2, ineq=[((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)]
    )
    return [
        (kink, (0, 0)),
        (kink, (-1, 0)),
        (forms.d_kappa, (0, 0)),
        (forms.d_kappa, (-1, 0)),
        (PolyUnion(2, [quad]), (0, 0)),
        (PolyUnion(2, [tri, ConvexPolyhedron.singleton((2, 2))]), (0, 0)),
    ]


def _near_points(union, x_bar, radius):
    """Points of the union within ``radius`` of x_bar in the max norm.

    One candidate per piece whose closure touches x_bar: walk from x_bar
    toward the piece's relative-interior point, staying on the segment
    (which the piece contains) and inside the ball.
    """
    outs = [tuple(x_bar)] if union.contains(x_bar) else []
    for piece in union.pieces:
        if not piece.contains(x_bar):
            continue
        rel = piece.relint_point()
        direction = [r - x for r, x in zip(rel, x_bar)]
        span = max((abs(d) for d in direction), default=0)
        if span == 0:
            continue
        t = min(Fr(1), Fr(radius) / span)
        outs.append(tuple(x + t * d for x, d in zip(x_bar, direction)))
    return outs


def test_stratification_soundness():
    for union, x_bar in _soundness_cases():
        x_bar = tuple(Fr(v) for v in x_bar)
        limiting = limiting_normal_cone(union, x_bar)
        for normal_piece in limiting.pieces:
            v = normal_piece.relint_point()
            for k in range(1, 11):
                radius = Fr(1, 2 ** k)
                witnesses = _near_points(union, x_bar, radius)
                assert any(
                    regular_normal_cone(union, x).contains(v) for x in witnesses
                ), (x_bar, v, k)


def test_regular_normals_are_limiting_normals():
    for union, x_bar in _soundness_cases():
        regular = regular_normal_cone(union, x_bar)
        limiting = limiting_normal_cone(union, x_bar)
        wrapped = PolyUnion(regular.dim, [regular])
        inside, missing = contains_union(wrapped, limiting)
        assert inside, (x_bar, missing)


# ------------------------------------------- witness re-verification


def _verdict_stream():
    progs = []
    prog_a = pb.build_example("a")
    progs.append((prog_a, [(-1,), (0,), (2,)]))
    for c in ([1, 1], [0, 1]):
        inst = pb.CcmpInstance(2, 1, st.Objective.affine(c))
        prog, _ = pb.build_ccmp(inst)
        feas = [
            (a, b)
            for a in (-1, 0, 1)
            for b in (-1, 0, 1)
            if sum(1 for u in (a, b) if u != 0) <= 1
        ]
        progs.append((prog, feas))
    for prog, points in progs:
        derived = st.build_derived(prog)
        for z in points:
            for kind in ("implicit", "fuzzy", "explicit"):
                res = st.check_stationarity(prog, z, kind, derived=derived)
                if isinstance(res, st.StationarityReport):
                    for v in res.per_stratum:
                        yield prog, derived, z, v
                else:
                    yield prog, derived, z, res


def test_every_holds_verdict_reverifies():
    seen_holds = 0
    for prog, derived, z, verdict in _verdict_stream():
        if verdict.holds:
            seen_holds += 1
            assert st.reverify_stationarity(prog, derived, z, verdict), (
                prog.name,
                z,
                verdict.kind,
                verdict.stratum,
            )
    assert seen_holds >= 20


# ---------------------------------------------- strata sufficiency


def _graph_signature(program, z_bar, lam):
    """What the coderivatives see: piece membership and active rows."""
    sig = []
    zf = tuple(z_bar) + tuple(lam)
    zg = tuple(z_bar) + tuple(lam) + (Fr(0),) * program.G.n_out
    for mapping, probe in ((program.F, zf), (program.G, zg)):
        for piece in mapping.graph.pieces:
            if not piece.contains(probe):
                sig.append(None)
                continue
            active = tuple(
                idx
                for idx, (row, rhs) in enumerate(piece.ineq)
                if sum(a * p for a, p in zip(row, probe)) == rhs
            )
            sig.append(active)
    return tuple(sig)


def test_strata_sufficiency_sampling():
    rng = random.Random(SEED)
    inst = pb.CcmpInstance(2, 1, st.Objective.affine([1, 1]))
    prog, _ = pb.build_ccmp(inst)
    derived = st.build_derived(prog)
    z_bar = (Fr(0), Fr(0))
    k_set = derived.K.image_at(z_bar)

    reps = st.K_stratum_representatives(prog, z_bar, derived)
    rep_cache = {}
    for rep in reps:
        lam = tuple(rep["point"])
        verdict = st.check_stationarity(prog, z_bar, "explicit", lam=lam, derived=derived)
        rep_cache[_graph_signature(prog, z_bar, lam)] = (rep["stratum"], verdict.holds)

    def _sample():
        # mix interior draws with boundary-biased ones so low-dimensional
        # strata actually get hit
        mode = rng.random()
        a = Fr(rng.randint(0, 12), 12)
        b = Fr(rng.randint(0, 12), 12)
        if mode < Fr(1, 4):
            a = Fr(rng.choice((0, 1)))
        elif mode < Fr(1, 2):
            b = Fr(rng.choice((0, 1)))
        elif mode < Fr(5, 8):
            b = 1 - a
        return (a, b)

    checked = 0
    while checked < 100:
        lam = _sample()
        if not k_set.contains(lam):
            continue
        sig = _graph_signature(prog, z_bar, lam)
        assert sig in rep_cache, lam
        stratum, rep_holds = rep_cache[sig]
        verdict = st.check_stationarity(prog, z_bar, "explicit", lam=lam, derived=derived)
        assert verdict.holds == rep_holds, (lam, stratum)
        checked += 1
    assert checked == 100
