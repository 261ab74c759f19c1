"""Concrete problem families for the implicit-variable machinery.

Cardinality-constrained programs, bilevel programs with a convex quadratic
lower level, and linear weak-efficiency programs are assembled here as
ImplicitProgram instances, each bundled with closed forms derived by hand
from index patterns so the generic engine has something independent to be
checked against. A grid oracle compares engine verdicts with brute-force
search over exact rational grids, and two small worked examples (one
polyhedral, one deliberately not) feed it.
"""

import itertools
import json
import math

from .exceptions import PolystatError, PreconditionError
from .geometry import (
    EMPTY,
    ConvexPolyhedron,
    PolyUnion,
    cone_is_trivial,
    limiting_normal_cone,
    union_equal,
)
from .kernels import row_reduce
from .limits import check_pieces
from .mappings import ANCHOR_POLYHEDRAL, PolyMapping
from .rational import ONE, ZERO, dot, rat, rat_str, rat_vector
from .stationarity import (
    ImplicitProgram,
    Objective,
    Verdict,
    _nonzero_at_coords,
    _system_feasible,
    _unit_row,
    build_derived,
    check_stationarity,
    is_psd,
    subdifferential_at,
)

ANCHOR_COMPLEMENTARITY = "complementarity-normal-form"


def _free_space(dim):
    return PolyUnion(dim, [ConvexPolyhedron(dim)])


def _coordinate_subspace(dim, support):
    """The span of the listed coordinates, as one polyhedron."""
    eq = []
    for i in range(dim):
        if i not in support:
            eq.append((_unit_row(dim, [(i, ONE)]), ZERO))
    return ConvexPolyhedron(dim, eq=eq)


def _subsets(indices):
    indices = list(indices)
    for r in range(len(indices) + 1):
        for combo in itertools.combinations(indices, r):
            yield combo


def _fmt(vals):
    return [rat_str(v) for v in vals]


# ---------------------------------------------------------------------------
# cardinality-constrained programs


def sparsity_set(n, kappa):
    """Points of R^n with at most ``kappa`` nonzero coordinates."""
    pieces = [
        _coordinate_subspace(n, support)
        for support in itertools.combinations(range(n), kappa)
    ]
    return PolyUnion(n, pieces)


class CcmpInstance:
    """Data for a cardinality-constrained program.

    Feasible points have at most ``kappa`` nonzero entries and lie in the
    optional abstract set ``m_set``; the objective is any supported
    objective on R^n.
    """

    __slots__ = ("n", "kappa", "objective", "m_set")

    def __init__(self, n, kappa, objective, m_set=None):
        n = int(n)
        kappa = int(kappa)
        if not 2 <= n <= 4:
            raise PreconditionError("the dimension must be between 2 and 4")
        if not 1 <= kappa < n:
            raise PreconditionError(
                "the sparsity level must satisfy 1 <= kappa < n"
            )
        if objective.n != n:
            raise PreconditionError("objective dimension mismatch")
        if m_set is None:
            m_set = _free_space(n)
        if m_set.dim != n:
            raise PreconditionError("abstract constraint set dimension mismatch")
        self.n = n
        self.kappa = kappa
        self.objective = objective
        self.m_set = m_set


class CcmpClosedForms:
    """Hand-derived objects for a cardinality-constrained instance.

    Everything here is written down from index sets alone, without the
    generic polyhedral engine, so the two can be played against each other.
    """

    __slots__ = ("instance", "d_kappa")

    def __init__(self, instance):
        self.instance = instance
        self.d_kappa = sparsity_set(instance.n, instance.kappa)

    def zero_indices(self, z):
        z = rat_vector(z)
        return [i for i in range(self.instance.n) if z[i] == 0]

    def _require_sparse(self, z):
        zero = self.zero_indices(z)
        if self.instance.n - len(zero) > self.instance.kappa:
            raise PreconditionError("the point has too many nonzero entries")
        return zero

    def multiplier_set(self, z):
        """The multiplier set at ``z`` in closed form: one box piece, or EMPTY.

        Coordinates at nonzero entries are pinned to zero, the others range
        over the unit bar, and their sum must reach n - kappa.
        """
        n, kappa = self.instance.n, self.instance.kappa
        z = rat_vector(z)
        zero = [i for i in range(n) if z[i] == 0]
        if n - len(zero) > kappa:
            return EMPTY
        ineq = []
        eq = []
        total = [ZERO] * n
        for i in range(n):
            if z[i] == 0:
                ineq.append((_unit_row(n, [(i, -ONE)]), ZERO))
                ineq.append((_unit_row(n, [(i, ONE)]), ONE))
                total[i] = -ONE
            else:
                eq.append((_unit_row(n, [(i, ONE)]), ZERO))
        ineq.append((tuple(total), rat(kappa - n)))
        return PolyUnion(n, [ConvexPolyhedron(n, ineq=ineq, eq=eq)])

    def normal_cone(self, z_bar):
        """The limiting normal cone to the sparsity set, by index sets.

        Normals vanish on the support of the point and carry at most
        n - kappa nonzero entries; each admissible support pattern of that
        width contributes one coordinate subspace.
        """
        n, kappa = self.instance.n, self.instance.kappa
        zero = self._require_sparse(z_bar)
        width = min(n - kappa, len(zero))
        pieces = [
            _coordinate_subspace(n, support)
            for support in itertools.combinations(zero, width)
        ]
        return PolyUnion(n, pieces)

    def explicit_stationarity(self, z_bar):
        """The specialized explicit condition, decided directly.

        The multiplier contribution collapses to the span of the zero
        coordinates, so the search is one feasibility run per piece of the
        abstract normal cone.
        """
        inst = self.instance
        n = inst.n
        z = rat_vector(z_bar)
        zero = self._require_sparse(z)
        grad = subdifferential_at(inst.objective, z)
        normal_m = limiting_normal_cone(inst.m_set, z)
        span = _coordinate_subspace(n, zero)
        total = 3 * n
        eqs = [
            (_unit_row(total, [(i, ONE), (n + i, ONE), (2 * n + i, ONE)]), ZERO)
            for i in range(n)
        ]
        for piece in normal_m.pieces:
            wit = _system_feasible(
                total,
                [
                    (grad, list(range(n))),
                    (span, list(range(n, 2 * n))),
                    (piece, list(range(2 * n, 3 * n))),
                ],
                eqs,
            )
            if wit is not None:
                return Verdict(
                    "explicit",
                    True,
                    witnesses={
                        "grad": wit[:n],
                        "direction": wit[n : 2 * n],
                        "xi": wit[2 * n :],
                    },
                    certificates=(ANCHOR_POLYHEDRAL,),
                )
        return Verdict("explicit", False, certificates=(ANCHOR_POLYHEDRAL,))


def build_ccmp(instance):
    """Assemble the implicit program for a cardinality-constrained instance.

    The multiplier estimate lives in [0, 1]^n through the two-branch set
    C = (R x {0}) u ({0} x [0, 1]) attached to each coordinate, the weight
    map asks the coordinates of the multiplier to sum to at least
    n - kappa, and the declared solution mapping is the sparsity set
    shifted by z. Returns (program, closed_forms).
    """
    n, kappa = instance.n, instance.kappa
    m = n
    s = 2 * n

    row = [ZERO] * (n + m)
    for j in range(m):
        row[n + j] = -ONE
    f_graph = PolyUnion(
        n + m,
        [ConvexPolyhedron(n + m, ineq=[(tuple(row), rat(kappa - n))])],
    )
    f_map = PolyMapping(n, m, f_graph)

    total = n + m + s
    check_pieces(2 ** n, "the coupling graph")
    g_pieces = []
    for pattern in itertools.product((0, 1), repeat=n):
        ineq = []
        eq = []
        for i, branch in enumerate(pattern):
            wz = n + m + 2 * i
            wl = n + m + 2 * i + 1
            if branch == 0:
                # R x {0}: the lambda part must vanish.
                eq.append((_unit_row(total, [(wl, ONE), (n + i, ONE)]), ZERO))
            else:
                # {0} x [0, 1]: the z part vanishes, the lambda part
                # stays inside the bar.
                eq.append((_unit_row(total, [(wz, ONE), (i, ONE)]), ZERO))
                ineq.append((_unit_row(total, [(wl, -ONE), (n + i, -ONE)]), ZERO))
                ineq.append((_unit_row(total, [(wl, ONE), (n + i, ONE)]), ONE))
        g_pieces.append(ConvexPolyhedron(total, ineq=ineq, eq=eq))
    g_map = PolyMapping(n + m, s, PolyUnion(total, g_pieces))

    forms = CcmpClosedForms(instance)
    shift = [_unit_row(2 * n, [(i, ONE), (n + i, ONE)]) for i in range(n)]
    h_pieces = [piece.linear_preimage(shift) for piece in forms.d_kappa.pieces]
    h_map = PolyMapping(n, n, PolyUnion(2 * n, h_pieces))

    program = ImplicitProgram(
        n,
        m,
        s,
        instance.objective,
        f_map,
        g_map,
        instance.m_set,
        h_override=h_map,
        structure="difference",
        name="ccmp-%d-%d" % (n, kappa),
    )
    return program, forms


def ccmp_cross_check(instance, z_bar):
    """Play the closed forms against the engine at one feasible point.

    Three comparisons are reported: the abstract normal cone, the
    multiplier set, and the explicit verdict, which must also agree across
    every multiplier stratum.
    """
    program, forms = build_ccmp(instance)
    derived = build_derived(program)
    z = rat_vector(z_bar)
    forms._require_sparse(z)
    if not program.M.contains(z):
        raise PreconditionError("the point violates the abstract constraint")

    engine_cone = limiting_normal_cone(forms.d_kappa, z)
    cone_ok, cone_wit = union_equal(engine_cone, forms.normal_cone(z))

    engine_k = derived.K.image_at(z)
    closed_k = forms.multiplier_set(z)
    if engine_k is EMPTY and closed_k is EMPTY:
        k_ok, k_wit = True, None
    elif engine_k is EMPTY or closed_k is EMPTY:
        nonempty = closed_k if engine_k is EMPTY else engine_k
        k_ok, k_wit = False, nonempty.feasible_point()
    else:
        k_ok, k_wit = union_equal(engine_k, closed_k)

    report = check_stationarity(program, z, "explicit", derived=derived)
    holds = [v.holds for v in report.per_stratum]
    uniform = len(set(holds)) == 1
    closed = forms.explicit_stationarity(z)
    explicit_ok = uniform and holds[0] == closed.holds

    return {
        "point": _fmt(z),
        "cone_match": cone_ok,
        "cone_witness": None if cone_wit is None else _fmt(cone_wit),
        "multiplier_match": k_ok,
        "multiplier_witness": None if k_wit is None else _fmt(k_wit),
        "explicit_uniform": uniform,
        "explicit_engine": holds,
        "explicit_closed_form": closed.holds,
        "explicit_match": explicit_ok,
        "ok": cone_ok and k_ok and explicit_ok,
    }


# ---------------------------------------------------------------------------
# bilevel programs with a convex quadratic lower level


def _rat_matrix(rows, nrows, ncols, what):
    mat = tuple(tuple(rat(v) for v in row) for row in rows)
    if len(mat) != nrows or any(len(r) != ncols for r in mat):
        raise PreconditionError("%s must be %d x %d" % (what, nrows, ncols))
    return mat


class BilevelLqInstance:
    """Data for a bilevel program with a convex quadratic lower level.

    The lower level minimizes (1/2) y'Qy + (P'x + c)'y subject to Ay <= b;
    the upper level minimizes its own objective over x in the upper
    constraint set and y solving the lower problem.
    """

    __slots__ = ("n1", "n2", "m", "q", "p", "c", "a", "b", "upper", "s_set")

    def __init__(self, n1, n2, m, q, p, c, a, b, upper, s_set=None):
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.m = int(m)
        if self.n1 < 1 or self.n2 < 1 or self.m < 1:
            raise PreconditionError("all three dimensions must be positive")
        self.q = _rat_matrix(q, self.n2, self.n2, "the quadratic term")
        for i in range(self.n2):
            for j in range(i):
                if self.q[i][j] != self.q[j][i]:
                    raise PreconditionError("the quadratic term must be symmetric")
        if not is_psd(self.q):
            raise PreconditionError(
                "the quadratic term must be positive semidefinite"
            )
        self.p = _rat_matrix(p, self.n1, self.n2, "the coupling matrix")
        self.c = rat_vector(c)
        if len(self.c) != self.n2:
            raise PreconditionError("the linear term has the wrong length")
        self.a = _rat_matrix(a, self.m, self.n2, "the constraint matrix")
        self.b = rat_vector(b)
        if len(self.b) != self.m:
            raise PreconditionError("the right-hand side has the wrong length")
        if upper.n != self.n1 + self.n2:
            raise PreconditionError("upper objective dimension mismatch")
        self.upper = upper
        if s_set is None:
            s_set = _free_space(self.n1)
        if s_set.dim != self.n1:
            raise PreconditionError("upper constraint set dimension mismatch")
        self.s_set = s_set


class BilevelForms:
    """Derived objects for a bilevel instance, built from index patterns."""

    __slots__ = ("instance", "complementarity_graph")

    def __init__(self, instance):
        self.instance = instance
        m = instance.m
        check_pieces(2 ** m, "the complementarity graph")
        pieces = []
        for active in _subsets(range(m)):
            ineq = []
            eq = []
            for i in range(m):
                if i in active:
                    eq.append((_unit_row(2 * m, [(i, ONE)]), ZERO))
                    ineq.append((_unit_row(2 * m, [(m + i, -ONE)]), ZERO))
                else:
                    ineq.append((_unit_row(2 * m, [(i, ONE)]), ZERO))
                    eq.append((_unit_row(2 * m, [(m + i, ONE)]), ZERO))
            pieces.append(ConvexPolyhedron(2 * m, ineq=ineq, eq=eq))
        self.complementarity_graph = PolyUnion(2 * m, pieces)

    def residual(self, y):
        """Constraint slack Ay - b at a lower-level point."""
        inst = self.instance
        y = rat_vector(y)
        return tuple(dot(inst.a[i], y) - inst.b[i] for i in range(inst.m))

    def stationarity_residual(self, x, y, lam):
        """The lower-level gradient Qy + P'x + c + A'lam."""
        inst = self.instance
        x, y, lam = rat_vector(x), rat_vector(y), rat_vector(lam)
        out = []
        for r in range(inst.n2):
            v = dot(inst.q[r], y) + inst.c[r]
            v += sum(inst.p[j][r] * x[j] for j in range(inst.n1))
            v += sum(inst.a[i][r] * lam[i] for i in range(inst.m))
            out.append(v)
        return tuple(out)

    def multiplier_set(self, x, y):
        """Lagrange multipliers of the lower level: one piece, or EMPTY."""
        inst = self.instance
        m = inst.m
        u = self.residual(y)
        if any(v > 0 for v in u):
            return EMPTY
        x, y = rat_vector(x), rat_vector(y)
        ineq = []
        eq = []
        for i in range(m):
            if u[i] == 0:
                ineq.append((_unit_row(m, [(i, -ONE)]), ZERO))
            else:
                eq.append((_unit_row(m, [(i, ONE)]), ZERO))
        for r in range(inst.n2):
            rowl = tuple(inst.a[i][r] for i in range(m))
            rhs = -(
                dot(inst.q[r], y)
                + inst.c[r]
                + sum(inst.p[j][r] * x[j] for j in range(inst.n1))
            )
            eq.append((rowl, rhs))
        piece = ConvexPolyhedron(m, ineq=ineq, eq=eq)
        if piece.is_empty():
            return EMPTY
        return PolyUnion(m, [piece])

    def mpcc_feasible(self):
        """The one-level reformulated feasible set over (x, y, lambda).

        Upper constraint on x, lower-level stationarity as equations, and
        the complementarity pattern between Ay - b and lambda.
        """
        inst = self.instance
        n1, n2, m = inst.n1, inst.n2, inst.m
        dim = n1 + n2 + m
        check_pieces(
            len(inst.s_set.pieces) * 2 ** m, "the reformulated feasible set"
        )
        stat_rows = []
        for r in range(n2):
            rowl = [ZERO] * dim
            for j in range(n1):
                rowl[j] = inst.p[j][r]
            for t in range(n2):
                rowl[n1 + t] = inst.q[r][t]
            for i in range(m):
                rowl[n1 + n2 + i] = inst.a[i][r]
            stat_rows.append((tuple(rowl), -inst.c[r]))
        pieces = []
        for s_piece in inst.s_set.pieces:
            base = s_piece.embed(dim, list(range(n1)))
            for active in _subsets(range(m)):
                ineq = []
                eq = list(stat_rows)
                for i in range(m):
                    slack = [ZERO] * dim
                    for r in range(n2):
                        slack[n1 + r] = inst.a[i][r]
                    if i in active:
                        eq.append((tuple(slack), inst.b[i]))
                        ineq.append(
                            (_unit_row(dim, [(n1 + n2 + i, -ONE)]), ZERO)
                        )
                    else:
                        ineq.append((tuple(slack), inst.b[i]))
                        eq.append((_unit_row(dim, [(n1 + n2 + i, ONE)]), ZERO))
                piece = base.with_rows(ineq=ineq, eq=eq)
                if not piece.is_empty():
                    pieces.append(piece)
        return PolyUnion.maybe(dim, pieces)

    def fully_explicit(self, x, y, lam):
        """Explicit stationarity via the complementarity normal cone.

        The multiplier mapping is an affine preimage of the complementarity
        graph and the coupling map is affine single-valued, so the whole
        condition collapses to one feasibility search per normal-cone
        piece: find eta, nu, a gradient g and an upper normal xi with
        g_x + P nu + xi = 0, g_y + A'eta + Q nu = 0, and (eta, -A nu)
        normal to the complementarity graph at (Ay - b, lambda).
        """
        inst = self.instance
        n1, n2, m = inst.n1, inst.n2, inst.m
        n = n1 + n2
        x, y, lam = rat_vector(x), rat_vector(y), rat_vector(lam)
        kset = self.multiplier_set(x, y)
        if kset is EMPTY or not kset.contains(lam):
            raise PreconditionError("the multiplier is not valid at this point")
        if not inst.s_set.contains(x):
            raise PreconditionError("the upper-level point is infeasible")
        u = self.residual(y)
        n_comp = limiting_normal_cone(self.complementarity_graph, u + lam)
        grad = subdifferential_at(inst.upper, x + y)
        normal_s = limiting_normal_cone(inst.s_set, x)
        # Layout: eta (m), theta (m), nu (n2), g (n), xi (n1).
        total = 2 * m + n2 + n + n1
        o_theta, o_nu = m, 2 * m
        o_g = 2 * m + n2
        o_xi = o_g + n
        eqs = []
        for i in range(m):
            entries = [(o_theta + i, ONE)]
            for r in range(n2):
                entries.append((o_nu + r, inst.a[i][r]))
            eqs.append((_unit_row(total, entries), ZERO))
        for j in range(n1):
            entries = [(o_g + j, ONE), (o_xi + j, ONE)]
            for r in range(n2):
                entries.append((o_nu + r, inst.p[j][r]))
            eqs.append((_unit_row(total, entries), ZERO))
        for r in range(n2):
            entries = [(o_g + n1 + r, ONE)]
            for i in range(m):
                entries.append((i, inst.a[i][r]))
            for t in range(n2):
                entries.append((o_nu + t, inst.q[r][t]))
            eqs.append((_unit_row(total, entries), ZERO))
        for piece in n_comp.pieces:
            for s_piece in normal_s.pieces:
                wit = _system_feasible(
                    total,
                    [
                        (piece, list(range(2 * m))),
                        (grad, list(range(o_g, o_g + n))),
                        (s_piece, list(range(o_xi, o_xi + n1))),
                    ],
                    eqs,
                )
                if wit is not None:
                    return Verdict(
                        "explicit",
                        True,
                        witnesses={
                            "lambda": tuple(lam),
                            "eta": wit[:m],
                            "theta": wit[o_theta:o_nu],
                            "nu": wit[o_nu:o_g],
                            "grad": wit[o_g : o_g + n],
                            "xi": wit[o_xi:],
                        },
                        certificates=(ANCHOR_POLYHEDRAL, ANCHOR_COMPLEMENTARITY),
                    )
        return Verdict(
            "explicit",
            False,
            witnesses={"lambda": tuple(lam)},
            certificates=(ANCHOR_POLYHEDRAL, ANCHOR_COMPLEMENTARITY),
        )


def build_bilevel_lq(instance):
    """Assemble the implicit program for a bilevel instance.

    z = (x, y); the implicit variable is the lower-level multiplier, the
    coupling map is the single affine stationarity residual, and the
    multiplier estimate ranges over the normal-cone mapping of the
    lower-level constraint set. Returns (program, forms).
    """
    inst = instance
    n1, n2, m = inst.n1, inst.n2, inst.m
    n = n1 + n2
    forms = BilevelForms(inst)

    total_f = n + m
    check_pieces(2 ** m, "the multiplier-estimate graph")
    f_pieces = []
    for active in _subsets(range(m)):
        ineq = []
        eq = []
        for i in range(m):
            slack = [ZERO] * total_f
            for r in range(n2):
                slack[n1 + r] = inst.a[i][r]
            if i in active:
                eq.append((tuple(slack), inst.b[i]))
                ineq.append((_unit_row(total_f, [(n + i, -ONE)]), ZERO))
            else:
                ineq.append((tuple(slack), inst.b[i]))
                eq.append((_unit_row(total_f, [(n + i, ONE)]), ZERO))
        f_pieces.append(ConvexPolyhedron(total_f, ineq=ineq, eq=eq))
    f_map = PolyMapping(n, m, PolyUnion(total_f, f_pieces))

    total_g = n + m + n2
    eq = []
    for r in range(n2):
        rowl = [ZERO] * total_g
        for j in range(n1):
            rowl[j] = inst.p[j][r]
        for t in range(n2):
            rowl[n1 + t] = inst.q[r][t]
        for i in range(m):
            rowl[n + i] = inst.a[i][r]
        rowl[n + m + r] = -ONE
        eq.append((tuple(rowl), -inst.c[r]))
    g_map = PolyMapping(
        n + m, n2, PolyUnion(total_g, [ConvexPolyhedron(total_g, eq=eq)])
    )

    m_pieces = [p.embed(n, list(range(n1))) for p in inst.s_set.pieces]
    m_set = PolyUnion(n, m_pieces)

    program = ImplicitProgram(
        n,
        m,
        n2,
        inst.upper,
        f_map,
        g_map,
        m_set,
        structure="difference",
        name="bilevel-lq",
    )
    return program, forms


def bilevel_multiplier_conditions(instance, x, y, lam):
    """Uniqueness conditions for the lower-level multiplier.

    Reports a kernel-triviality condition on the active rows, linear
    independence of the active rows as an exact rank, and whether the
    multiplier set actually is a singleton. The rank condition implies the
    kernel condition, which implies the singleton; a computation that ever
    disagreed with either implication would raise.
    """
    forms = BilevelForms(instance)
    x, y, lam = rat_vector(x), rat_vector(y), rat_vector(lam)
    m, n2 = instance.m, instance.n2
    u = forms.residual(y)
    if any(v > 0 for v in u):
        raise PreconditionError("the lower-level point is infeasible")
    kset = forms.multiplier_set(x, y)
    if kset is EMPTY or not kset.contains(lam):
        raise PreconditionError("the multiplier is not valid at this point")
    active = [i for i in range(m) if u[i] == 0]
    support = [i for i in range(m) if lam[i] != 0]

    # Kernel condition: no nonzero combination of active rows vanishes
    # while keeping nonnegative weight off the support.
    ineq = []
    eq = []
    for i in range(m):
        if i not in active:
            eq.append((_unit_row(m, [(i, ONE)]), ZERO))
        elif i not in support:
            ineq.append((_unit_row(m, [(i, -ONE)]), ZERO))
    for r in range(n2):
        eq.append((tuple(instance.a[i][r] for i in range(m)), ZERO))
    direction_cone = ConvexPolyhedron(m, ineq=ineq, eq=eq)
    mfc_witness = _nonzero_at_coords(direction_cone, range(m))
    mfc = mfc_witness is None

    if active:
        rows = [list(instance.a[i]) for i in active]
        rank, _ = row_reduce(rows, n2)
        licq = rank == len(active)
    else:
        licq = True

    piece = kset.pieces[0]
    singleton = True
    for i in range(m):
        c = _unit_row(m, [(i, ONE)])
        hi = piece.lp(c, maximize=True)
        lo = piece.lp(c, maximize=False)
        if (
            hi.status != "optimal"
            or lo.status != "optimal"
            or hi.value != lam[i]
            or lo.value != lam[i]
        ):
            singleton = False
            break

    if licq and not mfc:
        raise PolystatError("the rank condition held but the kernel condition failed")
    if mfc and not singleton:
        raise PolystatError(
            "the kernel condition held but the multiplier set is not a singleton"
        )
    return {
        "point": _fmt(x + y),
        "lambda": _fmt(lam),
        "active": active,
        "support": support,
        "licq": licq,
        "mfc": mfc,
        "mfc_witness": None if mfc_witness is None else _fmt(mfc_witness),
        "singleton": singleton,
    }


# ---------------------------------------------------------------------------
# linear weak-efficiency programs


class EmopForms:
    """The scalarized-solution graph of a weak-efficiency program."""

    __slots__ = ("j", "gamma", "gph_psi")

    def __init__(self, j, gamma, gph_psi):
        self.j = j
        self.gamma = gamma
        self.gph_psi = gph_psi

    def solution_set(self, lam):
        """All minimizers of the scalarization at one weight vector."""
        lam = rat_vector(lam)
        return self.gph_psi.slice({i: lam[i] for i in range(len(self.j))})


def build_emop_linear(j_matrix, gamma, objective=None, m_set=None):
    """Assemble the weak-efficiency program for linear objectives.

    ``j_matrix`` rows are the objectives and ``gamma`` the compact
    polyhedral feasible set. The weight estimate is constant (the unit
    simplex) and the coupling map is the scalarized solution set shifted
    by z, so the implicit feasible region is exactly the weakly efficient
    set. Returns (program, forms).
    """
    n = gamma.dim
    j_mat = tuple(tuple(rat(v) for v in row) for row in j_matrix)
    m = len(j_mat)
    if m < 2:
        raise PreconditionError("at least two objective rows are required")
    if any(len(row) != n for row in j_mat):
        raise PreconditionError("objective rows must match the set dimension")
    if gamma.is_empty():
        raise PreconditionError("the feasible set must be nonempty")
    if not cone_is_trivial(gamma.recession_cone()):
        raise PreconditionError("the feasible set must be bounded")

    ineq_rows = list(gamma.ineq)
    eq_rows = list(gamma.eq)
    r_ineq = len(ineq_rows)
    r_eq = len(eq_rows)
    check_pieces(2 ** r_ineq, "the scalarized-solution graph")

    base = m + n
    psi_pieces = []
    for active in _subsets(range(r_ineq)):
        k = len(active)
        pad = k + r_eq
        total = base + pad
        ineq = []
        eq = []
        for i in range(m):
            ineq.append((_unit_row(total, [(i, -ONE)]), ZERO))
        eq.append((_unit_row(total, [(i, ONE) for i in range(m)]), ONE))
        for a, b in ineq_rows:
            ineq.append(((ZERO,) * m + a + (ZERO,) * pad, b))
        for e, d in eq_rows:
            eq.append(((ZERO,) * m + e + (ZERO,) * pad, d))
        for pos, idx in enumerate(active):
            a, b = ineq_rows[idx]
            eq.append(((ZERO,) * m + a + (ZERO,) * pad, b))
            ineq.append((_unit_row(total, [(base + pos, -ONE)]), ZERO))
        for c in range(n):
            rowl = [ZERO] * total
            for i in range(m):
                rowl[i] = j_mat[i][c]
            for pos, idx in enumerate(active):
                rowl[base + pos] = ineq_rows[idx][0][c]
            for t in range(r_eq):
                rowl[base + k + t] = eq_rows[t][0][c]
            eq.append((tuple(rowl), ZERO))
        piece = ConvexPolyhedron(total, ineq=ineq, eq=eq)
        if piece.is_empty():
            continue
        if pad:
            piece = piece.eliminate(range(base, total))
        if not piece.is_empty():
            psi_pieces.append(piece)
    gph_psi = PolyUnion(base, psi_pieces).pruned()

    f_total = n + m
    ineqf = [(_unit_row(f_total, [(n + i, -ONE)]), ZERO) for i in range(m)]
    eqf = [(_unit_row(f_total, [(n + i, ONE) for i in range(m)]), ONE)]
    f_map = PolyMapping(
        n, m, PolyUnion(f_total, [ConvexPolyhedron(f_total, ineq=ineqf, eq=eqf)])
    )

    total_g = n + m + n
    t_rows = [_unit_row(total_g, [(n + i, ONE)]) for i in range(m)]
    t_rows += [
        _unit_row(total_g, [(c, ONE), (n + m + c, ONE)]) for c in range(n)
    ]
    g_pieces = [p.linear_preimage(t_rows) for p in gph_psi.pieces]
    g_map = PolyMapping(n + m, n, PolyUnion(total_g, g_pieces))

    if objective is None:
        objective = Objective.affine([ZERO] * n)
    if m_set is None:
        m_set = _free_space(n)
    program = ImplicitProgram(
        n,
        m,
        n,
        objective,
        f_map,
        g_map,
        m_set,
        structure="decoupled",
        name="emop-linear",
    )
    return program, EmopForms(j_mat, gamma, gph_psi)


def emop_weak_efficiency_grid(j_matrix, gamma, step):
    """Brute-force weakly efficient grid points of a compact polyhedron.

    A grid point survives when no other feasible grid point is strictly
    better in every objective at once. Returns (points, flags) in grid
    order.
    """
    j_mat = tuple(tuple(rat(v) for v in row) for row in j_matrix)
    step = rat(step)
    if step <= 0:
        raise PreconditionError("the grid step must be positive")
    n = gamma.dim
    axes = []
    for c in range(n):
        unit = _unit_row(n, [(c, ONE)])
        hi = gamma.lp(unit, maximize=True)
        lo = gamma.lp(unit, maximize=False)
        if hi.status != "optimal" or lo.status != "optimal":
            raise PreconditionError("the feasible set must be bounded")
        axes.append(_axis(lo.value, hi.value, step))
    points = [pt for pt in itertools.product(*axes) if gamma.contains(pt)]
    values = [tuple(dot(row, pt) for row in j_mat) for pt in points]
    flags = []
    for i, v in enumerate(values):
        dominated = any(
            all(w[t] < v[t] for t in range(len(j_mat)))
            for jdx, w in enumerate(values)
            if jdx != i
        )
        flags.append(not dominated)
    return points, flags


# ---------------------------------------------------------------------------
# worked examples


class OracleOnlyProgram:
    """A program given by exact callables instead of polyhedral graphs.

    The polyhedral engine cannot touch it; the grid oracle can. Callables
    receive tuples of exact rationals and must answer exactly.
    """

    __slots__ = (
        "n",
        "m",
        "objective_value",
        "p_feasible",
        "q_feasible",
        "k_values",
        "name",
    )

    def __init__(
        self,
        n,
        m,
        objective_value,
        p_feasible,
        q_feasible,
        k_values=None,
        name="oracle-only",
    ):
        self.n = int(n)
        self.m = int(m)
        self.objective_value = objective_value
        self.p_feasible = p_feasible
        self.q_feasible = q_feasible
        self.k_values = k_values
        self.name = name


def _example_b_value(z):
    return z[0]


def _example_b_p_feasible(z):
    return z[0] >= -1


def _example_b_q_feasible(z, lam):
    z0, l0 = z[0], lam[0]
    if z0 >= 0:
        ok = l0 == 0
    else:
        ok = z0 * l0 == -1
    return ok and z0 >= -1


def _example_b_k_values(z):
    z0 = rat(z[0])
    if z0 >= 0:
        return ((ZERO,),)
    if z0 >= -1:
        return ((-ONE / z0,),)
    return ()


def build_example(which):
    """Two small worked instances.

    "a" is a one-dimensional polyhedral program whose implicit condition
    has a spurious stationary point at the origin. "b" carries a genuinely
    curved multiplier estimate (one hyperbola branch), is deliberately
    kept in callable form rather than approximated by pieces, and can only
    be consumed by the grid oracle.
    """
    if which == "a":
        p1 = ConvexPolyhedron(2, ineq=[((-ONE, ZERO), ZERO)], eq=[((ZERO, ONE), ZERO)])
        p2 = ConvexPolyhedron(2, ineq=[((ONE, ZERO), ZERO)], eq=[((ZERO, ONE), ONE)])
        f_map = PolyMapping(1, 1, PolyUnion(2, [p1, p2]))
        g1 = ConvexPolyhedron(3, ineq=[((-ONE, -ONE, -ONE), ZERO)])
        g_map = PolyMapping(2, 1, PolyUnion(3, [g1]))
        return ImplicitProgram(
            1,
            1,
            1,
            Objective.affine([ONE]),
            f_map,
            g_map,
            _free_space(1),
            structure="difference",
            name="example-a",
        )
    if which == "b":
        return OracleOnlyProgram(
            1,
            1,
            objective_value=_example_b_value,
            p_feasible=_example_b_p_feasible,
            q_feasible=_example_b_q_feasible,
            k_values=_example_b_k_values,
            name="example-b",
        )
    raise PreconditionError("unknown example %r" % (which,))


# ---------------------------------------------------------------------------
# the grid oracle


class GridOracleConfig:
    """A rational grid: per-coordinate bounds, a step, a locality radius.

    The radius counts grid steps: a neighbor is any grid point within
    ``radius * step`` of the base point in the max norm. A single bounds
    pair is replicated across every coordinate of whichever product space
    is being scanned.
    """

    __slots__ = ("box", "step", "radius")

    def __init__(self, box, step, radius):
        pairs = []
        for pair in box:
            lo, hi = rat(pair[0]), rat(pair[1])
            if lo > hi:
                raise PreconditionError("box bounds must satisfy lo <= hi")
            pairs.append((lo, hi))
        if not pairs:
            raise PreconditionError("the box needs at least one bounds pair")
        self.box = tuple(pairs)
        self.step = rat(step)
        if self.step <= 0:
            raise PreconditionError("the grid step must be positive")
        if isinstance(radius, bool) or not isinstance(radius, int) or radius < 1:
            raise PreconditionError("the locality radius must be a positive integer")
        self.radius = radius

    def bounds_for(self, dim):
        if len(self.box) == dim:
            return self.box
        if len(self.box) == 1:
            return self.box * dim
        raise PreconditionError(
            "the box must give one bounds pair or one per coordinate"
        )

    def to_json(self):
        return {
            "box": [[rat_str(lo), rat_str(hi)] for lo, hi in self.box],
            "step": rat_str(self.step),
            "radius": self.radius,
        }

    @classmethod
    def from_json(cls, data):
        unknown = set(data) - {"box", "step", "radius"}
        if unknown:
            raise PolystatError("unknown grid fields: %s" % sorted(unknown))
        return cls(data["box"], data["step"], data["radius"])


def _axis(lo, hi, step):
    vals = []
    v = lo
    while v <= hi:
        vals.append(v)
        v = v + step
    return vals


def _grid_floor(t):
    return t.numerator // t.denominator


def _ceil_index(v, origin, step):
    t = (v - origin) / step
    fl = _grid_floor(t)
    return fl if t == fl else fl + 1


def _floor_index(v, origin, step):
    return _grid_floor((v - origin) / step)


def _lambda_interval(piece, z_pt, n):
    """Exact bounds the piece puts on a single trailing coordinate.

    Returns (lo, hi) with None meaning unbounded on that side, or None for
    an empty restriction.
    """
    lo = None
    hi = None
    pinned = None
    for a, b in piece.eq:
        coef = a[n]
        const = b - dot(a[:n], z_pt)
        if coef == 0:
            if const != 0:
                return None
        else:
            v = const / coef
            if pinned is None:
                pinned = v
            elif pinned != v:
                return None
    for a, b in piece.ineq:
        coef = a[n]
        const = b - dot(a[:n], z_pt)
        if coef == 0:
            if const < 0:
                return None
        elif coef > 0:
            v = const / coef
            if hi is None or v < hi:
                hi = v
        else:
            v = const / coef
            if lo is None or v > lo:
                lo = v
    if pinned is not None:
        if (lo is not None and pinned < lo) or (hi is not None and pinned > hi):
            return None
        return (pinned, pinned)
    if lo is not None and hi is not None and lo > hi:
        return None
    return (lo, hi)


def _classify(feas, dims, radius):
    """Split feasible grid points into local and global minimizers.

    A point is grid-local when its value is no larger than at any feasible
    grid point within ``radius`` steps in the max norm, and grid-global
    when it attains the minimum over every feasible grid point.
    """
    if not feas:
        return {}, [], []
    best = min(feas.values())
    offsets = [
        off
        for off in itertools.product(range(-radius, radius + 1), repeat=dims)
        if any(off)
    ]
    local_flags = {}
    locals_ = []
    globals_ = []
    for idx, val in feas.items():
        ok = True
        for off in offsets:
            other = feas.get(tuple(idx[c] + off[c] for c in range(dims)))
            if other is not None and other < val:
                ok = False
                break
        local_flags[idx] = ok
        if ok:
            locals_.append(idx)
        if val == best:
            globals_.append(idx)
    return local_flags, sorted(locals_), sorted(globals_)


def oracle_relate(program, config, derived=None):
    """Square the two problem forms against brute-force grid search.

    Scans the z grid for the reduced problem and the (z, lambda) grid for
    the lifted one, classifies every feasible point as grid-local or
    grid-global, and reports three relations: whether the global
    minimizers of the two scans correspond, whether each local minimizer
    of the reduced scan stays locally minimal when lifted, and every
    lifted local minimizer whose z part fails to be locally minimal in the
    reduced scan (a genuine one-way gap). With no feasible grid point on
    either side the report says so instead of certifying anything.
    """
    n, m = program.n, program.m
    bounds = config.bounds_for(n + m)
    step, radius = config.step, config.radius
    z_axes = [_axis(lo, hi, step) for lo, hi in bounds[:n]]
    l_axes = [_axis(lo, hi, step) for lo, hi in bounds[n:]]
    z_ranges = [range(len(ax)) for ax in z_axes]
    l_ranges = [range(len(ax)) for ax in l_axes]

    oracle_only = isinstance(program, OracleOnlyProgram)
    if oracle_only:
        value_at = program.objective_value
        p_test = program.p_feasible
    else:
        if derived is None:
            derived = build_derived(program)
        z_set = derived.Z
        value_at = program.objective.value_at
        if z_set is EMPTY:
            p_test = lambda _pt: False
        else:
            p_test = z_set.contains

    feas_p = {}
    for idx in itertools.product(*z_ranges):
        pt = tuple(z_axes[c][idx[c]] for c in range(n))
        if p_test(pt):
            feas_p[idx] = value_at(pt)

    feas_q = {}
    if oracle_only:
        for zidx in itertools.product(*z_ranges):
            z_pt = tuple(z_axes[c][zidx[c]] for c in range(n))
            val = None
            for lidx in itertools.product(*l_ranges):
                l_pt = tuple(l_axes[c][lidx[c]] for c in range(m))
                if program.q_feasible(z_pt, l_pt):
                    if val is None:
                        val = value_at(z_pt)
                    feas_q[zidx + lidx] = val
    elif m == 1:
        pieces = derived.K.graph.pieces
        lam_axis = l_axes[0]
        lam_lo = lam_axis[0]
        count = len(lam_axis)
        for zidx in itertools.product(*z_ranges):
            z_pt = tuple(z_axes[c][zidx[c]] for c in range(n))
            if not program.M.contains(z_pt):
                continue
            val = value_at(z_pt)
            seen = set()
            for piece in pieces:
                rng = _lambda_interval(piece, z_pt, n)
                if rng is None:
                    continue
                lo_v, hi_v = rng
                start = 0 if lo_v is None else _ceil_index(lo_v, lam_lo, step)
                stop = (
                    count - 1
                    if hi_v is None
                    else _floor_index(hi_v, lam_lo, step)
                )
                if lo_v is not None and lo_v == hi_v:
                    # a pinned value must itself sit on the grid
                    if (
                        start == stop
                        and 0 <= start < count
                        and lam_lo + start * step == lo_v
                    ):
                        seen.add(start)
                    continue
                for k in range(max(start, 0), min(stop, count - 1) + 1):
                    seen.add(k)
            for k in seen:
                feas_q[zidx + (k,)] = val
    else:
        kgraph = derived.K.graph
        for zidx in itertools.product(*z_ranges):
            z_pt = tuple(z_axes[c][zidx[c]] for c in range(n))
            if not program.M.contains(z_pt):
                continue
            val = value_at(z_pt)
            for lidx in itertools.product(*l_ranges):
                l_pt = tuple(l_axes[c][lidx[c]] for c in range(m))
                if kgraph.contains(z_pt + l_pt):
                    feas_q[zidx + lidx] = val

    p_flags, p_locals, p_globals = _classify(feas_p, n, radius)
    q_flags, q_locals, q_globals = _classify(feas_q, n + m, radius)

    def z_point(idx):
        return tuple(z_axes[c][idx[c]] for c in range(n))

    def l_point(idx):
        return tuple(l_axes[c][idx[c]] for c in range(m))

    by_z = {}
    for qidx in feas_q:
        by_z.setdefault(qidx[:n], []).append(qidx)

    descent_violations = []
    for idx in p_locals:
        for qidx in by_z.get(idx, ()):
            if not q_flags[qidx]:
                descent_violations.append(
                    {"z": _fmt(z_point(idx)), "lambda": _fmt(l_point(qidx[n:]))}
                )

    gaps = []
    for qidx in q_locals:
        zidx = qidx[:n]
        if zidx in feas_p and not p_flags[zidx]:
            gaps.append(
                {"z": _fmt(z_point(zidx)), "lambda": _fmt(l_point(qidx[n:]))}
            )

    p_global_set = set(p_globals)
    q_global_set = set(q_globals)
    q_global_z = {qidx[:n] for qidx in q_globals}
    covered = all(idx in q_global_z for idx in p_globals)
    projected = all(zidx in p_global_set for zidx in q_global_z)
    table = []
    for idx in sorted(p_global_set | q_global_z):
        lams = sorted(qidx[n:] for qidx in q_globals if qidx[:n] == idx)
        table.append(
            {
                "z": _fmt(z_point(idx)),
                "reduced_global": idx in p_global_set,
                "lifted_global_lambdas": [_fmt(l_point(li)) for li in lams],
            }
        )

    return {
        "program": program.name,
        "config": config.to_json(),
        "no_data": not feas_p or not feas_q,
        "reduced": {
            "evaluated": math.prod(len(ax) for ax in z_axes),
            "feasible": len(feas_p),
            "points": [
                {
                    "point": _fmt(z_point(idx)),
                    "feasible": True,
                    "local_min": p_flags[idx],
                    "global_min": idx in p_global_set,
                }
                for idx in sorted(feas_p)
            ],
        },
        "lifted": {
            "evaluated": math.prod(len(ax) for ax in z_axes + l_axes),
            "feasible": len(feas_q),
            "points": [
                {
                    "point": _fmt(z_point(qidx[:n]) + l_point(qidx[n:])),
                    "feasible": True,
                    "local_min": q_flags[qidx],
                    "global_min": qidx in q_global_set,
                }
                for qidx in sorted(feas_q)
            ],
        },
        "correspondence": {
            "globals_agree": covered and projected,
            "reduced_globals_lift": covered,
            "lifted_globals_project": projected,
            "table": table,
        },
        "descent": {
            "holds": not descent_violations,
            "violations": descent_violations,
        },
        "gaps": gaps,
    }


# ---------------------------------------------------------------------------
# instance files


_INSTANCE_FIELDS = {
    "ccmp": {"type", "n", "kappa", "objective", "m_set"},
    "bilevel_lq": {
        "type",
        "n1",
        "n2",
        "m",
        "q",
        "p",
        "c",
        "a",
        "b",
        "upper",
        "s_set",
    },
    "emop_linear": {"type", "j", "gamma", "objective", "m_set"},
    "example_a": {"type"},
    "example_b": {"type"},
}


def _need(data, fields):
    missing = [f for f in fields if f not in data]
    if missing:
        raise PolystatError("missing instance fields: %s" % missing)


def instance_from_json(data):
    """Build (program, forms) from a parsed instance description."""
    if not isinstance(data, dict):
        raise PolystatError("an instance description must be an object")
    kind = data.get("type")
    if kind not in _INSTANCE_FIELDS:
        raise PolystatError(
            "unknown instance type %r; expected one of %s"
            % (kind, sorted(_INSTANCE_FIELDS))
        )
    unknown = set(data) - _INSTANCE_FIELDS[kind]
    if unknown:
        raise PolystatError(
            "unknown fields for %s: %s" % (kind, sorted(unknown))
        )
    if kind == "ccmp":
        _need(data, ("n", "kappa", "objective"))
        inst = CcmpInstance(
            data["n"],
            data["kappa"],
            Objective.from_json(data["objective"]),
            m_set=PolyUnion.from_json(data["m_set"]) if "m_set" in data else None,
        )
        return build_ccmp(inst)
    if kind == "bilevel_lq":
        _need(data, ("n1", "n2", "m", "q", "p", "c", "a", "b", "upper"))
        inst = BilevelLqInstance(
            data["n1"],
            data["n2"],
            data["m"],
            data["q"],
            data["p"],
            data["c"],
            data["a"],
            data["b"],
            Objective.from_json(data["upper"]),
            s_set=PolyUnion.from_json(data["s_set"]) if "s_set" in data else None,
        )
        return build_bilevel_lq(inst)
    if kind == "emop_linear":
        _need(data, ("j", "gamma"))
        gamma = ConvexPolyhedron.from_json(data["gamma"])
        objective = (
            Objective.from_json(data["objective"]) if "objective" in data else None
        )
        m_set = PolyUnion.from_json(data["m_set"]) if "m_set" in data else None
        return build_emop_linear(data["j"], gamma, objective=objective, m_set=m_set)
    if kind == "example_a":
        return build_example("a"), None
    return build_example("b"), None


def load_instance(path):
    """Read an instance file; parse errors carry the position."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolystatError(
            "could not parse %s: line %d column %d: %s"
            % (path, exc.lineno, exc.colno, exc.msg)
        ) from exc
    return instance_from_json(data)
