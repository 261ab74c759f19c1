"""Acceptance gate: ten exact reproduction criteria.

Every criterion is one test function, so a verbose pytest run emits one
pass/fail line per criterion; the bodies also print "criterion N: PASS"
or "criterion N: FAIL". Everything is exact rational arithmetic; the
only tolerances are wall-clock budgets, asserted where the criterion
carries one.
"""

import time
from fractions import Fraction as Fr

import test_properties as props

from polystat import problems as pb
from polystat import stationarity as st
from polystat.geometry import (
    ConvexPolyhedron,
    PolyUnion,
    contains_union,
    limiting_normal_cone,
    union_equal,
)
from polystat.geometry.ddm import cone_from_generators, generators
from polystat.mappings import PolyMapping, compose, product

ZERO, ONE = Fr(0), Fr(1)


def _stamped(number, body):
    try:
        body()
    except BaseException:
        print("criterion %d: FAIL" % number)
        raise
    print("criterion %d: PASS" % number)


# ---------------------------------------------------------------- 1 and 2


def test_criterion_01_first_example_grid():
    def body():
        start = time.monotonic()
        prog = pb.build_example("a")
        cfg = pb.GridOracleConfig([(-3, 3)], Fr(1, 100), 2)
        rep = pb.oracle_relate(prog, cfg)
        reduced = rep["reduced"]["points"]
        locals_ = [r["point"] for r in reduced if r["local_min"]]
        globals_ = [r["point"] for r in reduced if r["global_min"]]
        assert locals_ == [["-1"]]
        assert globals_ == [["-1"]]
        lifted = {tuple(r["point"]): r["local_min"] for r in rep["lifted"]["points"]}
        assert lifted[("0", "0")] is True
        assert lifted[("0", "1")] is False
        elapsed = time.monotonic() - start
        assert elapsed < 5, "took %.2fs" % elapsed

    _stamped(1, body)


def test_criterion_02_second_example_grid():
    def body():
        start = time.monotonic()
        prog = pb.build_example("b")
        cfg = pb.GridOracleConfig([(-3, 3)], Fr(1, 100), 2)
        rep = pb.oracle_relate(prog, cfg)
        reduced = {tuple(r["point"]): r for r in rep["reduced"]["points"]}
        assert reduced[("0",)]["local_min"] is False
        lifted = {tuple(r["point"]): r for r in rep["lifted"]["points"]}
        assert lifted[("0", "0")]["local_min"] is True
        elapsed = time.monotonic() - start
        assert elapsed < 30, "took %.2fs" % elapsed

    _stamped(2, body)


# ------------------------------------------------------------------- 3


def test_criterion_03_sparsity_cone_equality():
    def body():
        start = time.monotonic()
        checked = 0
        for n in (2, 3):
            grid = [()]
            for _ in range(n):
                grid = [g + (v,) for g in grid for v in (-1, 0, 1)]
            for kappa in range(1, n):
                inst = pb.CcmpInstance(
                    n, kappa, st.Objective.affine([1] * n)
                )
                _, forms = pb.build_ccmp(inst)
                for z in grid:
                    if sum(1 for v in z if v != 0) > kappa:
                        continue
                    engine = limiting_normal_cone(forms.d_kappa, z)
                    ok, wit = union_equal(engine, forms.normal_cone(z))
                    assert ok, (n, kappa, z, wit)
                    checked += 1
        assert checked == 31, checked
        elapsed = time.monotonic() - start
        assert elapsed < 60, "took %.2fs" % elapsed

    _stamped(3, body)


# ------------------------------------------------------------------- 4


def test_criterion_04_stationarity_contrast():
    def body():
        inst = pb.CcmpInstance(2, 1, st.Objective.affine([1, 1]))
        prog, forms = pb.build_ccmp(inst)
        derived = st.build_derived(prog)

        report = st.check_stationarity(prog, (0, 0), "explicit", derived=derived)
        assert len(report.per_stratum) == 7
        assert report.forall_holds
        for verdict in report.per_stratum:
            assert st.reverify_stationarity(prog, derived, (0, 0), verdict)

        assert not st.check_stationarity(prog, (0, 0), "implicit", derived=derived).holds

        # at (-1, 0) the cone is span(e2); with f = z1 + z2 no multiplier
        # exists and the closed form agrees
        v_m = st.check_stationarity(prog, (-1, 0), "implicit", derived=derived)
        assert not v_m.holds
        assert not forms.explicit_stationarity((-1, 0)).holds
        # the multiplier pattern, exercised positively: f = z2 admits
        # nu = (0, 1), vanishing on the support, and re-substitutes
        inst2 = pb.CcmpInstance(2, 1, st.Objective.affine([0, 1]))
        prog2, _ = pb.build_ccmp(inst2)
        derived2 = st.build_derived(prog2)
        v_p = st.check_stationarity(prog2, (-1, 0), "implicit", derived=derived2)
        assert v_p.holds
        assert v_p.witnesses["nu"][0] == 0
        assert st.reverify_stationarity(prog2, derived2, (-1, 0), v_p)

    _stamped(4, body)


# ------------------------------------------------------------------- 5


def _active_normal_cone(piece, point):
    """Regular normal cone of one piece from its active rows alone."""
    rays = [
        row
        for row, rhs in piece.ineq
        if sum(a * x for a, x in zip(row, point)) == rhs
    ]
    lines = [row for row, _ in piece.eq]
    if not rays and not lines:
        return ConvexPolyhedron.singleton((ZERO,) * piece.dim)
    return cone_from_generators(piece.dim, rays=rays, lines=lines)


def test_criterion_05_complementarity_cone():
    def body():
        branch_a = ConvexPolyhedron(2, ineq=[((ONE, ZERO), 0)], eq=[((ZERO, ONE), 0)])
        branch_b = ConvexPolyhedron(2, ineq=[((ZERO, -ONE), 0)], eq=[((ONE, ZERO), 0)])
        union = PolyUnion(2, [branch_a, branch_b])

        # dense-sampling oracle first: regular normals from active rows at
        # points marching along both branches and at the corner
        samples = [(ZERO, ZERO)]
        samples += [(-Fr(k, 8), ZERO) for k in range(1, 17)]
        samples += [(ZERO, Fr(k, 8)) for k in range(1, 17)]
        oracle_pieces = {}
        for pt in samples:
            cones = [
                _active_normal_cone(piece, pt)
                for piece in union.pieces
                if piece.contains(pt)
            ]
            cone = cones[0]
            for extra in cones[1:]:
                cone = cone.intersect(extra)
            key = tuple(sorted(map(tuple, cone.ineq))), tuple(sorted(map(tuple, cone.eq)))
            oracle_pieces.setdefault(key, cone)
        oracle = PolyUnion(2, list(oracle_pieces.values()))

        expected = PolyUnion(
            2,
            [
                ConvexPolyhedron(2, eq=[((ONE, ZERO), 0)]),
                ConvexPolyhedron(2, eq=[((ZERO, ONE), 0)]),
                ConvexPolyhedron(2, ineq=[((-ONE, ZERO), 0), ((ZERO, ONE), 0)]),
            ],
        )
        ok, wit = union_equal(oracle, expected)
        assert ok, wit

        engine = limiting_normal_cone(union, (ZERO, ZERO))
        ok, wit = union_equal(engine, expected)
        assert ok, wit

    _stamped(5, body)


# ------------------------------------------------------------------- 6


def _kink_map():
    return PolyMapping(
        1,
        1,
        PolyUnion(
            2,
            [
                ConvexPolyhedron(2, ineq=[((ONE, ZERO), 0)], eq=[((ZERO, ONE), 0)]),
                ConvexPolyhedron(2, ineq=[((-ONE, ZERO), 0)], eq=[((ONE, -ONE), 0)]),
            ],
        ),
    )


def _band_map():
    return PolyMapping(
        1,
        1,
        PolyUnion(
            2,
            [
                ConvexPolyhedron(
                    2, ineq=[((ONE, ZERO), 0), ((ONE, -ONE), 0), ((-ONE, ONE), 1)]
                ),
                ConvexPolyhedron(
                    2,
                    ineq=[
                        ((-ONE, ZERO), 0),
                        ((Fr(2), -ONE), 0),
                        ((Fr(-2), ONE), 1),
                    ],
                ),
            ],
        ),
    )


def _chain_bound_holds(s1, s2, z_bar, w_bar):
    comp, xi = compose(s1, s2)
    pair = tuple(z_bar) + tuple(w_bar)
    assert comp.has_graph_point(z_bar, w_bar)
    left = comp.coderivative_at(z_bar, w_bar).graph
    linking = xi.image_at(pair)
    points = []
    for piece in linking.pieces:
        points.append(tuple(piece.relint_point()))
        vertices, _, _ = generators(piece)
        points.extend(tuple(v) for v in vertices)
    bound_pieces = []
    for y in sorted(set(points)):
        d1 = s1.coderivative_at(z_bar, y)
        d2 = s2.coderivative_at(y, w_bar)
        chained, _ = compose(
            PolyMapping(s2.n_out, s2.n_in, d2.graph),
            PolyMapping(s1.n_out, s1.n_in, d1.graph),
        )
        bound_pieces.extend(chained.graph.pieces)
    right = PolyUnion(s2.n_out + s1.n_in, bound_pieces)
    ok, wit = contains_union(left, right)
    return ok, wit, xi


def test_criterion_06_chain_rule_inclusion():
    def body():
        prog = pb.build_example("a")
        derived = st.build_derived(prog)
        for z, w in (((-1,), (0,)), ((0,), (0,))):
            ok, wit, _ = _chain_bound_holds(derived.F_tilde, prog.G, z, w)
            assert ok, (z, w, wit)

        inst = pb.CcmpInstance(2, 1, st.Objective.affine([1, 1]))
        cprog, _ = pb.build_ccmp(inst)
        cder = st.build_derived(cprog)
        origin = (ZERO, ZERO)
        w0 = (ZERO,) * cprog.G.n_out
        ok, wit, _ = _chain_bound_holds(cder.F_tilde, cprog.G, origin, w0)
        assert ok, wit

        s1, s2 = _kink_map(), _band_map()
        for z, w in (((ZERO,), (ZERO,)), ((Fr(-2),), (ONE,))):
            ok, wit, xi = _chain_bound_holds(s1, s2, z, w)
            assert ok, (z, w, wit)
            assert xi.locally_bounded_at(tuple(z) + tuple(w))

    _stamped(6, body)


# ------------------------------------------------------------------- 7


def _shifted_identity(m_set):
    """z => z - M as a polyhedral mapping."""
    n = m_set.dim
    rows = []
    for i in range(n):
        row = [ZERO] * (2 * n)
        row[i] = ONE
        row[n + i] = -ONE
        rows.append(tuple(row))
    graph = PolyUnion(n, [m_set]).linear_preimage(rows)
    return PolyMapping(n, n, graph)


def _case_a_equal(g1, m_set, z_bar, w1, w2):
    n = g1.n_in
    g2 = _shifted_identity(m_set)
    prod = product(g1, g2)
    z_bar, w1, w2 = tuple(z_bar), tuple(w1), tuple(w2)
    engine = prod.coderivative_at(z_bar, w1 + w2).graph
    m1 = g1.n_out
    d1 = g1.coderivative_at(z_bar, w1).graph
    diff = tuple(a - b for a, b in zip(z_bar, w2))
    n_m = limiting_normal_cone(PolyUnion(n, [m_set]), diff)
    total = m1 + 2 * n
    rows = []
    for i in range(m1):
        row = [ZERO] * total
        row[i] = ONE
        rows.append(tuple(row))
    for i in range(n):
        row = [ZERO] * total
        row[m1 + n + i] = ONE
        row[m1 + i] = -ONE
        rows.append(tuple(row))
    lifted = d1.linear_preimage(rows)
    closed = []
    for cone_piece in n_m.pieces:
        cone_lift = cone_piece.embed(total, list(range(m1, m1 + n)))
        for lifted_piece in lifted.pieces:
            meet = lifted_piece.intersect(cone_lift)
            if not meet.is_empty():
                closed.append(meet)
    return union_equal(engine, PolyUnion(total, closed))


def _case_b_equal(t1, t2, a1, b1, a2, b2, z1, z2, w1, w2):
    f1 = PolyMapping(
        2,
        1,
        t1.graph.linear_preimage(
            [(ONE, ZERO, ZERO), (ZERO, -a1, ONE)], offset=(ZERO, -b1)
        ),
    )
    f2 = PolyMapping(
        2,
        1,
        t2.graph.linear_preimage(
            [(ZERO, ONE, ZERO), (-a2, ZERO, ONE)], offset=(ZERO, -b2)
        ),
    )
    prod = product(f1, f2)
    engine = prod.coderivative_at((z1, z2), (w1, w2)).graph
    d1 = t1.coderivative_at((z1,), (w1 - a1 * z2 - b1,)).graph
    d2 = t2.coderivative_at((z2,), (w2 - a2 * z1 - b2,)).graph
    pieces = []
    for p in d1.pieces:
        p_lift = p.embed(4, [0, 1])
        for q in d2.pieces:
            q_lift = q.embed(4, [2, 3])
            meet = p_lift.intersect(q_lift)
            if not meet.is_empty():
                pieces.append(meet)
    closed = PolyUnion(4, pieces).linear_image(
        [
            (ONE, ZERO, ZERO, ZERO),
            (ZERO, ZERO, ONE, ZERO),
            (ZERO, ONE, a2, ZERO),
            (a1, ZERO, ZERO, ONE),
        ]
    )
    return union_equal(engine, closed)


def test_criterion_07_product_rule_equalities():
    def body():
        identity = PolyMapping(
            1, 1, PolyUnion(2, [ConvexPolyhedron(2, eq=[((ONE, -ONE), 0)])])
        )
        kink, band = _kink_map(), _band_map()
        halfline = ConvexPolyhedron(1, ineq=[((ONE,), 0)])
        unit = ConvexPolyhedron.from_box([(0, 1)])

        case_a = [
            (identity, halfline, (ZERO,), (ZERO,), (ZERO,)),
            (kink, halfline, (ZERO,), (ZERO,), (ZERO,)),
            (band, unit, (Fr(1, 2),), (ONE,), (ZERO,)),
            (kink, unit, (Fr(1, 2),), (Fr(1, 2),), (Fr(1, 4),)),
        ]
        for g1, m_set, z, w1, w2 in case_a:
            ok, wit = _case_a_equal(g1, m_set, z, w1, w2)
            assert ok, wit

        case_b = [
            (kink, identity, ONE, ZERO, Fr(2), -ONE, ZERO, ZERO, ZERO, -ONE),
            (band, kink, -ONE, Fr(1, 2), ZERO, ZERO, ZERO, ONE, Fr(1, 2), ONE),
            (band, band, Fr(2), ZERO, -ONE, ZERO, Fr(1, 2), ZERO, ONE, ZERO),
        ]
        for args in case_b:
            ok, wit = _case_b_equal(*args)
            assert ok, wit

    _stamped(7, body)


# ------------------------------------------------------------------- 8


def _convex_interval_program():
    f_map = PolyMapping(
        1, 1, PolyUnion(2, [ConvexPolyhedron(2, ineq=[((ONE, -ONE), 0)])])
    )
    g_map = PolyMapping(
        2,
        1,
        PolyUnion(
            3,
            [
                ConvexPolyhedron(
                    3, ineq=[((ZERO, ONE, -ONE), 1), ((ZERO, -ONE, ONE), 0)]
                )
            ],
        ),
    )
    m_set = PolyUnion(1, [ConvexPolyhedron(1)])
    return st.ImplicitProgram(
        1,
        1,
        1,
        st.Objective.quadratic([[2]], [0]),
        f_map,
        g_map,
        m_set,
        name="convex-interval",
    )


def _convex_band_program():
    f_map = PolyMapping(
        1, 1, PolyUnion(2, [ConvexPolyhedron(2, eq=[((ONE, -ONE), 0)])])
    )
    g_map = PolyMapping(
        2,
        1,
        PolyUnion(
            3,
            [
                ConvexPolyhedron(
                    3, ineq=[((ZERO, ONE, -ONE), 1), ((ZERO, -ONE, ONE), 1)]
                )
            ],
        ),
    )
    m_set = PolyUnion(1, [ConvexPolyhedron(1)])
    return st.ImplicitProgram(
        1,
        1,
        1,
        st.Objective.affine([1]),
        f_map,
        g_map,
        m_set,
        name="convex-band",
    )


def test_criterion_08_convex_sufficiency():
    def body():
        cfg = pb.GridOracleConfig([(-3, 3)], Fr(1, 4), 1)
        for prog, minimizer in (
            (_convex_interval_program(), (ZERO,)),
            (_convex_band_program(), (-ONE,)),
        ):
            derived = st.build_derived(prog)
            report = pb.oracle_relate(prog, cfg)
            rows = report["reduced"]["points"]
            assert rows, prog.name
            stationary_points = []
            for row in rows:
                z = tuple(Fr(v) for v in row["point"])
                holds_any = False
                for kind in ("implicit", "fuzzy", "explicit"):
                    res = st.check_stationarity(prog, z, kind, derived=derived)
                    holds = (
                        res.holds
                        if isinstance(res, st.Verdict)
                        else res.exists_holds
                    )
                    holds_any = holds_any or holds
                if holds_any:
                    stationary_points.append(z)
                    assert row["global_min"], (prog.name, z)
            assert minimizer in stationary_points, prog.name
            certificate = st.convex_sufficiency(prog, minimizer, derived=derived)
            assert certificate.holds
            assert "convex-global-sufficiency" in certificate.certificates

    _stamped(8, body)


# ------------------------------------------------------------------- 9


def test_criterion_09_property_suites():
    def body():
        props.test_polar_biduality_on_random_cones()
        props.test_projection_membership_equivalence()
        props.test_stratification_soundness()
        props.test_every_holds_verdict_reverifies()
        props.test_strata_sufficiency_sampling()

    _stamped(9, body)


# ------------------------------------------------------------------ 10


def test_criterion_10_vector_desk_instance():
    def body():
        square = ConvexPolyhedron.from_box([(0, 1), (0, 1)])
        prog, _ = pb.build_emop_linear([[1, 0], [0, 1]], square)
        dom = st.build_derived(prog).K.domain()
        expected = PolyUnion(
            2,
            [
                ConvexPolyhedron(
                    2,
                    ineq=[((ZERO, -ONE), 0), ((ZERO, ONE), 1)],
                    eq=[((ONE, ZERO), 0)],
                ),
                ConvexPolyhedron(
                    2,
                    ineq=[((-ONE, ZERO), 0), ((ONE, ZERO), 1)],
                    eq=[((ZERO, ONE), 0)],
                ),
            ],
        )
        ok, wit = union_equal(dom, expected)
        assert ok, wit

        points, flags = pb.emop_weak_efficiency_grid(
            [[1, 0], [0, 1]], square, Fr(1, 10)
        )
        assert len(points) == 121
        for point, flag in zip(points, flags):
            assert dom.contains(point) is flag, point

    _stamped(10, body)
