"""Programs with implicit variables and their stationarity verdicts.

The model is: minimize f(z) over z in M subject to 0 in G(z, lambda) for
some lambda in F(z). Three first-order conditions are decided exactly: an
implicit one through the solution mapping H, a fuzzy one through the joint
feasibility mapping on (z, lambda), and a fully explicit one through F and
G separately. Constraint qualifications, the coderivative-sum inclusion
that links the fuzzy and explicit conditions, and the implication pipeline
between all of these are decided on the same exact polyhedral machinery.
"""

from . import limits
from .exceptions import PolystatError, PreconditionError
from .geometry import (
    EMPTY,
    ConvexPolyhedron,
    PolyUnion,
    contains_union,
    limiting_normal_cone,
    lp_extreme,
    union_is_origin,
    vrep_to_hrep,
)
from .mappings import (
    ANCHOR_POLYHEDRAL,
    PolyMapping,
    compose,
)
from .rational import ONE, ZERO, dot, rat, rat_str, rat_vector

ANCHOR_KERNEL_IMPLICIT = "kernel-cq-implicit"
ANCHOR_KERNEL_FUZZY = "kernel-cq-fuzzy"
ANCHOR_KERNEL_EXPLICIT = "kernel-cq-explicit"
ANCHOR_KERNEL_INTERMEDIATE = "kernel-cq-intermediate"
ANCHOR_METRIC_REGULARITY_CQ = "metric-regularity-cq"
ANCHOR_STRONG_CQ = "strong-cq"
ANCHOR_METRIC_REGULARITY = "mordukhovich-metric-regularity"
ANCHOR_SUM_BOUND = "coderivative-sum-bound"
ANCHOR_RANGE_INTERSECTION = "range-intersection-subregularity"
ANCHOR_INTERMEDIATE_BOUNDED = "intermediate-map-locally-bounded"
ANCHOR_IMPLICIT_TO_FUZZY = "implicit-to-fuzzy-via-intermediate"
ANCHOR_FUZZY_TO_EXPLICIT = "fuzzy-to-explicit-via-sum-bound"
ANCHOR_STRUCTURED_EQUALITY = "structured-equality-fuzzy-explicit"
ANCHOR_CONVEX_SUFFICIENCY = "convex-global-sufficiency"

STATIONARITY_KINDS = ("implicit", "fuzzy", "explicit")
CQ_KINDS = (
    "mordukhovich_i",
    "mordukhovich_ii",
    "mordukhovich_iii",
    "abstract_cq",
    "mr_cq",
    "strong_cq",
    "inc_lambda",
    "sigma",
)
LAMBDA_FREE_CQ_KINDS = ("mordukhovich_i", "sigma")


# ---------------------------------------------------------------------------
# objectives


def is_psd(q):
    """Exact positive-semidefiniteness of a symmetric rational matrix."""
    a = [[rat(v) for v in row] for row in q]
    k = len(a)
    for row in a:
        if len(row) != k:
            raise PreconditionError("matrix must be square")
    for i in range(k):
        for j in range(k):
            if a[i][j] != a[j][i]:
                raise PreconditionError("matrix must be symmetric")
    live = list(range(k))
    while live:
        pivot = None
        for i in live:
            if a[i][i] < 0:
                return False
            if a[i][i] > 0:
                pivot = i
                break
        if pivot is None:
            # All remaining diagonal entries vanish; any off-diagonal
            # residue gives a negative 2x2 principal minor.
            for i in live:
                for j in live:
                    if a[i][j] != 0:
                        return False
            return True
        live.remove(pivot)
        piv = a[pivot][pivot]
        for i in live:
            factor = a[i][pivot] / piv
            for j in live:
                a[i][j] -= factor * a[pivot][j]
    return True


class Objective:
    """Exactly representable convex-friendly objectives on R^n.

    kind "affine": f(z) = c.z + c0
    kind "max_affine": f(z) = max_i (c_i.z + c0_i)
    kind "quadratic": f(z) = (1/2) z^T Q z + c.z
    """

    __slots__ = ("kind", "n", "_terms", "_q", "_c")

    def __init__(self, kind, n, terms=None, q=None, c=None):
        self.kind = kind
        self.n = n
        if kind == "affine":
            cvec, c0 = terms
            self._terms = [(rat_vector(cvec), rat(c0))]
        elif kind == "max_affine":
            if not terms:
                raise PreconditionError("max_affine needs at least one piece")
            self._terms = [(rat_vector(cv), rat(c0)) for cv, c0 in terms]
        elif kind == "quadratic":
            self._q = tuple(rat_vector(row) for row in q)
            self._c = rat_vector(c)
            if len(self._q) != n or any(len(r) != n for r in self._q):
                raise PreconditionError("quadratic term has wrong shape")
            for i in range(n):
                for j in range(n):
                    if self._q[i][j] != self._q[j][i]:
                        raise PreconditionError("quadratic term must be symmetric")
            return
        else:
            raise PreconditionError("unknown objective kind %r" % (kind,))
        for cv, _ in self._terms:
            if len(cv) != n:
                raise PreconditionError("gradient has wrong dimension")

    @classmethod
    def affine(cls, c, c0=0):
        return cls("affine", len(tuple(c)), terms=(c, c0))

    @classmethod
    def max_affine(cls, terms):
        terms = list(terms)
        if not terms:
            raise PreconditionError("max-affine objective needs at least one term")
        return cls("max_affine", len(tuple(terms[0][0])), terms=terms)

    @classmethod
    def quadratic(cls, q, c):
        return cls("quadratic", len(tuple(c)), q=q, c=c)

    def value_at(self, z):
        z = rat_vector(z)
        if self.kind == "quadratic":
            quad = sum(
                self._q[i][j] * z[i] * z[j]
                for i in range(self.n)
                for j in range(self.n)
            )
            return quad / 2 + dot(self._c, z)
        vals = [dot(cv, z) + c0 for cv, c0 in self._terms]
        return max(vals)

    def subdifferential_at(self, z):
        z = rat_vector(z)
        if self.kind == "quadratic":
            grad = tuple(
                sum(self._q[i][j] * z[j] for j in range(self.n)) + self._c[i]
                for i in range(self.n)
            )
            return ConvexPolyhedron.singleton(grad)
        if self.kind == "affine":
            return ConvexPolyhedron.singleton(self._terms[0][0])
        best = self.value_at(z)
        active = [cv for cv, c0 in self._terms if dot(cv, z) + c0 == best]
        if len(active) == 1:
            return ConvexPolyhedron.singleton(active[0])
        return vrep_to_hrep(self.n, active, (), ())

    def is_convex(self):
        if self.kind == "quadratic":
            return is_psd(self._q)
        return True

    def to_json(self):
        if self.kind == "quadratic":
            return {
                "kind": "quadratic",
                "q": [[rat_str(v) for v in row] for row in self._q],
                "c": [rat_str(v) for v in self._c],
            }
        if self.kind == "affine":
            cv, c0 = self._terms[0]
            return {
                "kind": "affine",
                "c": [rat_str(v) for v in cv],
                "c0": rat_str(c0),
            }
        return {
            "kind": "max_affine",
            "terms": [
                {"c": [rat_str(v) for v in cv], "c0": rat_str(c0)}
                for cv, c0 in self._terms
            ],
        }

    @classmethod
    def from_json(cls, data):
        kind = data.get("kind")
        if kind == "affine":
            return cls.affine(data["c"], data.get("c0", 0))
        if kind == "max_affine":
            return cls.max_affine(
                [(t["c"], t.get("c0", 0)) for t in data["terms"]]
            )
        if kind == "quadratic":
            return cls.quadratic(data["q"], data["c"])
        raise PreconditionError("unknown objective kind %r" % (kind,))


def subdifferential_at(objective, z):
    """The exact convex subdifferential of an objective, as a polytope."""
    return objective.subdifferential_at(z)


# ---------------------------------------------------------------------------
# the program model


class ImplicitProgram:
    """Data of the implicit-variable program.

    ``structure`` tags the shape of G when it is known: "difference" when
    G(z, lambda) = g(z, lambda) - Theta for an affine g, "decoupled" when
    G(z, lambda) = G0(lambda) + g0(z). Either shape makes the fuzzy and
    explicit conditions coincide. ``h_override`` replaces the composed
    solution mapping by a problem-specific representation of the same
    feasible set; the implicit condition is stated through it.
    """

    __slots__ = (
        "n",
        "m",
        "s",
        "objective",
        "F",
        "G",
        "M",
        "h_override",
        "structure",
        "name",
    )

    def __init__(
        self,
        n,
        m,
        s,
        objective,
        f_map,
        g_map,
        m_set,
        h_override=None,
        structure=None,
        name="program",
    ):
        if f_map.n_in != n or f_map.n_out != m:
            raise PreconditionError("F must map dimension n to m")
        if g_map.n_in != n + m or g_map.n_out != s:
            raise PreconditionError("G must map dimension n+m to s")
        if m_set.dim != n:
            raise PreconditionError("M must live in dimension n")
        if objective.n != n:
            raise PreconditionError("objective dimension mismatch")
        if h_override is not None and h_override.n_in != n:
            raise PreconditionError("override solution map must take z")
        if structure not in (None, "difference", "decoupled"):
            raise PreconditionError("unknown structure tag %r" % (structure,))
        self.n = n
        self.m = m
        self.s = s
        self.objective = objective
        self.F = f_map
        self.G = g_map
        self.M = m_set
        self.h_override = h_override
        self.structure = structure
        self.name = name

    def is_convex(self):
        return (
            self.objective.is_convex()
            and len(self.F.graph.pieces) == 1
            and len(self.G.graph.pieces) == 1
            and len(self.M.pieces) == 1
        )


class FeasibilitySplitting:
    """The long feasibility mapping in affine-minus-product form.

    Its value at (z, lambda) is ((z, lambda), (z, lambda, 0), z) shifted by
    gph F x gph G x M. An affine map minus a polyhedral product is itself
    polyhedral, so metric subregularity at every graph point is automatic;
    the object records the shape and the certificate without materializing
    the graph.
    """

    __slots__ = ("n", "m", "s", "out_dim")

    def __init__(self, program):
        self.n = program.n
        self.m = program.m
        self.s = program.s
        self.out_dim = 3 * program.n + 2 * program.m + program.s

    def certificates(self):
        return [ANCHOR_POLYHEDRAL]


class DerivedMaps:
    """Every auxiliary mapping the verdicts are stated through.

    Each mapping is built on first access and cached, so a program whose
    heavier compositions would trip the desk-scale caps can still run the
    checks that never touch them.
    """

    __slots__ = ("program", "_cache")

    def __init__(self, program):
        self.program = program
        self._cache = {}

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def F_tilde(self):
        """F_tilde(z) = {z} x F(z), graph over (z, z', lambda)."""
        return self._get("F_tilde", self._build_f_tilde)

    def _build_f_tilde(self):
        n, m = self.program.n, self.program.m
        ft_pieces = []
        for p in self.program.F.graph.pieces:
            lifted = p.embed(
                2 * n + m, list(range(n)) + list(range(2 * n, 2 * n + m))
            )
            rows = []
            for i in range(n):
                row = [ZERO] * (2 * n + m)
                row[i] = ONE
                row[n + i] = -ONE
                rows.append((tuple(row), ZERO))
            ft_pieces.append(lifted.with_rows(eq=rows))
        return PolyMapping(n, n + m, PolyUnion(2 * n + m, ft_pieces))

    @property
    def H_composed(self):
        return self._get("H_composed", self._build_h_composed)[0]

    @property
    def Xi(self):
        return self._get("H_composed", self._build_h_composed)[1]

    def _build_h_composed(self):
        return compose(self.F_tilde, self.program.G)

    @property
    def H(self):
        if self.program.h_override is not None:
            return self.program.h_override
        return self.H_composed

    @property
    def H_M(self):
        """H_M(z) = H(z) x (z - M); graph over (z, w, u)."""
        return self._get("H_M", self._build_h_m)

    def _build_h_m(self):
        n = self.program.n
        s_h = self.H.n_out
        hm_pieces = []
        shift = _difference_matrix(n, s_h, n)
        for p in self.H.graph.pieces:
            p_lift = p.embed(n + s_h + n, list(range(n + s_h)))
            for q in self.program.M.pieces:
                q_lift = q.linear_preimage(shift)
                piece = p_lift.intersect(q_lift)
                if not piece.is_empty():
                    hm_pieces.append(piece)
        return PolyMapping(n, s_h + n, PolyUnion(n + s_h + n, hm_pieces))

    @property
    def cal_H(self):
        """cal_H(z, lambda) = (F(z) - lambda) x G(z, lambda).

        Graph over (z, lambda, u, v) with (z, lambda + u) in gph F and
        (z, lambda, v) in gph G.
        """
        return self._get("cal_H", self._build_cal_h)

    def _build_cal_h(self):
        n, m, s = self.program.n, self.program.m, self.program.s
        total = n + m + m + s
        tf = []
        for i in range(n):
            row = [ZERO] * total
            row[i] = ONE
            tf.append(tuple(row))
        for j in range(m):
            row = [ZERO] * total
            row[n + j] = ONE
            row[n + m + j] = ONE
            tf.append(tuple(row))
        tg = []
        for i in range(n + m):
            row = [ZERO] * total
            row[i] = ONE
            tg.append(tuple(row))
        for j in range(s):
            row = [ZERO] * total
            row[n + m + m + j] = ONE
            tg.append(tuple(row))
        ch_pieces = []
        for p in self.program.F.graph.pieces:
            p_lift = p.linear_preimage(tf)
            for q in self.program.G.graph.pieces:
                q_lift = q.linear_preimage(tg)
                piece = p_lift.intersect(q_lift)
                if not piece.is_empty():
                    ch_pieces.append(piece)
        return PolyMapping(n + m, m + s, PolyUnion(total, ch_pieces))

    @property
    def cal_H_M(self):
        """cal_H x ((z, lambda) -> z - M); graph over (z, lambda, u, v, t)."""
        return self._get("cal_H_M", self._build_cal_h_m)

    def _build_cal_h_m(self):
        n, m, s = self.program.n, self.program.m, self.program.s
        total = n + m + m + s
        total_m = total + n
        chm_pieces = []
        tz = []
        for i in range(n):
            row = [ZERO] * total_m
            row[i] = ONE
            row[total + i] = -ONE
            tz.append(tuple(row))
        for p in self.cal_H.graph.pieces:
            p_lift = p.embed(total_m, list(range(total)))
            for q in self.program.M.pieces:
                q_lift = q.linear_preimage(tz)
                piece = p_lift.intersect(q_lift)
                if not piece.is_empty():
                    chm_pieces.append(piece)
        return PolyMapping(n + m, m + s + n, PolyUnion(total_m, chm_pieces))

    @property
    def frak_H_M(self):
        return self._get("frak_H_M", lambda: FeasibilitySplitting(self.program))

    @property
    def H_hat(self):
        """H_hat(z, w, lambda) = (F(z) - lambda) x (G(z, lambda) - w).

        Graph over (z, w, lambda, u, v).
        """
        return self._get("H_hat", self._build_h_hat)

    def _build_h_hat(self):
        n, m, s = self.program.n, self.program.m, self.program.s
        total_hat = n + s + m + m + s
        thf = []
        for i in range(n):
            row = [ZERO] * total_hat
            row[i] = ONE
            thf.append(tuple(row))
        for j in range(m):
            row = [ZERO] * total_hat
            row[n + s + j] = ONE
            row[n + s + m + j] = ONE
            thf.append(tuple(row))
        thg = []
        for i in range(n):
            row = [ZERO] * total_hat
            row[i] = ONE
            thg.append(tuple(row))
        for j in range(m):
            row = [ZERO] * total_hat
            row[n + s + j] = ONE
            thg.append(tuple(row))
        for k in range(s):
            row = [ZERO] * total_hat
            row[n + k] = ONE
            row[n + s + m + m + k] = ONE
            thg.append(tuple(row))
        hat_pieces = []
        for p in self.program.F.graph.pieces:
            p_lift = p.linear_preimage(thf)
            for q in self.program.G.graph.pieces:
                q_lift = q.linear_preimage(thg)
                piece = p_lift.intersect(q_lift)
                if not piece.is_empty():
                    hat_pieces.append(piece)
        return PolyMapping(n + s + m, m + s, PolyUnion(total_hat, hat_pieces))

    @property
    def K(self):
        """K(z) = {lambda in F(z) : 0 in G(z, lambda)}; graph over (z, lambda)."""
        return self._get("K", self._build_k)

    def _build_k(self):
        n, m, s = self.program.n, self.program.m, self.program.s
        k_pieces = []
        for q in self.program.G.graph.pieces:
            q0 = q.slice({n + m + j: ZERO for j in range(s)})
            if q0.is_empty():
                continue
            for p in self.program.F.graph.pieces:
                piece = p.intersect(q0)
                if not piece.is_empty():
                    k_pieces.append(piece)
        if not k_pieces:
            raise PreconditionError("the program has no feasible pair (z, lambda)")
        return PolyMapping(n, m, PolyUnion(n + m, k_pieces).pruned())

    @property
    def K_hat(self):
        """K_hat(z, w) = {lambda in F(z) : w in G(z, lambda)}; graph over (z, w, lambda)."""
        return self._get("K_hat", self._build_k_hat)

    def _build_k_hat(self):
        n, m, s = self.program.n, self.program.m, self.program.s
        total_k = n + s + m
        tkf = []
        for i in range(n):
            row = [ZERO] * total_k
            row[i] = ONE
            tkf.append(tuple(row))
        for j in range(m):
            row = [ZERO] * total_k
            row[n + s + j] = ONE
            tkf.append(tuple(row))
        tkg = []
        for i in range(n):
            row = [ZERO] * total_k
            row[i] = ONE
            tkg.append(tuple(row))
        for j in range(m):
            row = [ZERO] * total_k
            row[n + s + j] = ONE
            tkg.append(tuple(row))
        for k in range(s):
            row = [ZERO] * total_k
            row[n + k] = ONE
            tkg.append(tuple(row))
        kh_pieces = []
        for p in self.program.F.graph.pieces:
            p_lift = p.linear_preimage(tkf)
            for q in self.program.G.graph.pieces:
                q_lift = q.linear_preimage(tkg)
                piece = p_lift.intersect(q_lift)
                if not piece.is_empty():
                    kh_pieces.append(piece)
        return PolyMapping(n + s, m, PolyUnion(total_k, kh_pieces))

    @property
    def Z(self):
        """Z = M n dom K, the feasible set of the reduced problem."""
        return self._get("Z", self._build_z)

    def _build_z(self):
        n = self.program.n
        dom_k = self.K.domain()
        z_pieces = []
        for p in self.program.M.pieces:
            for q in dom_k.pieces:
                piece = p.intersect(q)
                if not piece.is_empty():
                    z_pieces.append(piece)
        z_set = PolyUnion.maybe(n, z_pieces)
        if z_set is not EMPTY:
            z_set = z_set.pruned()
        return z_set


def build_derived(program):
    """Wrap a program in its lazily built derived-map bundle."""
    return DerivedMaps(program)


def _difference_matrix(n, skip, k):
    """Rows of T(z, pad, u) = z - u with pad of width ``skip`` ignored."""
    total = n + skip + k
    rows = []
    for i in range(n):
        row = [ZERO] * total
        row[i] = ONE
        row[n + skip + i] = -ONE
        rows.append(tuple(row))
    return rows


# ---------------------------------------------------------------------------
# verdicts


class Verdict:
    __slots__ = ("kind", "holds", "witnesses", "certificates", "stratum")

    def __init__(self, kind, holds, witnesses=None, certificates=(), stratum=None):
        self.kind = kind
        self.holds = holds
        self.witnesses = dict(witnesses or {})
        self.certificates = list(certificates)
        self.stratum = stratum

    def __repr__(self):
        return "Verdict(%s, holds=%s, stratum=%s)" % (
            self.kind,
            self.holds,
            self.stratum,
        )

    def to_json(self):
        named = {}
        for key in WITNESS_KEYS:
            val = self.witnesses.get(key)
            named[key] = None if val is None else [rat_str(v) for v in val]
        return {
            "kind": self.kind,
            "holds": self.holds,
            "witnesses": named,
            "stratum": self.stratum,
            "certificates": self.certificates,
        }


WITNESS_KEYS = ("lambda", "grad", "zeta", "mu", "nu", "xi")


def verdict_from_json(data):
    """Rebuild a verdict from the dict emitted by Verdict.to_json."""
    known = {"kind", "holds", "witnesses", "stratum", "certificates"}
    extra = sorted(set(data) - known)
    if extra:
        raise PolystatError("unknown verdict field %r" % extra[0])
    witnesses = {}
    for key, val in (data.get("witnesses") or {}).items():
        if key not in WITNESS_KEYS:
            raise PolystatError("unknown witness name %r" % key)
        if val is not None:
            witnesses[key] = rat_vector(val)
    return Verdict(
        data["kind"],
        bool(data["holds"]),
        witnesses=witnesses,
        certificates=data.get("certificates") or (),
        stratum=data.get("stratum"),
    )


class StationarityReport:
    """Per-stratum verdicts plus the two aggregates."""

    __slots__ = ("kind", "per_stratum", "exists_holds", "forall_holds")

    def __init__(self, kind, per_stratum):
        self.kind = kind
        self.per_stratum = list(per_stratum)
        self.exists_holds = any(v.holds for v in self.per_stratum)
        self.forall_holds = all(v.holds for v in self.per_stratum)

    def to_json(self):
        return {
            "kind": self.kind,
            "per_stratum": [v.to_json() for v in self.per_stratum],
            "exists_holds": self.exists_holds,
            "forall_holds": self.forall_holds,
        }


# ---------------------------------------------------------------------------
# strata of K(z)


def _canonical_affine(coeffs, rhs):
    """Canonical (hyperplane, sign) for an affine row a.x <= b / = b."""
    from .rational import primitive

    packed = primitive(tuple(coeffs) + (rhs,))
    body, last = packed[:-1], packed[-1]
    for x in body:
        if x != 0:
            if x < 0:
                return (tuple(-y for y in body), -last), -1
            return (body, last), 1
    return None, 0


def K_stratum_representatives(program, z_bar, derived=None):
    """One relative-interior point per arrangement stratum of K(z_bar).

    The strata are the sign cells, over K(z_bar), of every boundary
    hyperplane contributed by the pieces of gph F and gph G after fixing
    z = z_bar (and w = 0 for G). Coderivatives of the data maps are
    constant on each stratum, so one representative decides each
    universally quantified statement.
    """
    if derived is None:
        derived = build_derived(program)
    z_bar = rat_vector(z_bar)
    n, m, s = program.n, program.m, program.s
    limits.check_kernel_dim(m, "stratification")

    # K(z_bar) pieces in lambda space.
    k_pieces = [
        p
        for p in (piece.slice({i: z_bar[i] for i in range(n)}) for piece in derived.K.graph.pieces)
        if not p.is_empty()
    ]
    if not k_pieces:
        raise PreconditionError("the point has no implicit variables")

    # Candidate hyperplanes in lambda space: every row of every gph F piece
    # sliced at z_bar, every row of every gph G piece sliced at (z_bar, 0).
    hyperplanes = []
    index = {}

    def add_row(coeffs, rhs):
        key, sign = _canonical_affine(coeffs, rhs)
        if sign == 0:
            return None, 0
        hid = index.get(key)
        if hid is None:
            hid = len(hyperplanes)
            index[key] = hid
            hyperplanes.append(key)
        return hid, sign

    constant_violation = object()

    def localize(piece, coord_of_lambda, fixed_vals):
        """Sign requirements {hid: allowed}, or constant_violation."""
        allowed = {}
        for rows, is_eq in ((piece.ineq, False), (piece.eq, True)):
            for a, b in rows:
                lam_part = [a[coord_of_lambda(j)] for j in range(m)]
                const = sum(
                    a[i] * v for i, v in fixed_vals.items()
                )
                rhs = b - const
                if all(c == 0 for c in lam_part):
                    if (is_eq and rhs != 0) or (not is_eq and rhs < 0):
                        return constant_violation
                    continue
                hid, sign = add_row(lam_part, rhs)
                if is_eq:
                    opts = frozenset({0})
                else:
                    opts = frozenset({-sign, 0})
                allowed[hid] = allowed.get(hid, frozenset({-1, 0, 1})) & opts
                if not allowed[hid]:
                    return constant_violation
        return allowed

    # Build the lambda-space localization of each K piece from the original
    # F and G pieces so every boundary hyperplane is present.
    fixed_f = {i: z_bar[i] for i in range(n)}
    fixed_g = dict(fixed_f)
    for j in range(s):
        fixed_g[n + m + j] = ZERO
    combos = []
    for p in program.F.graph.pieces:
        cons_f = localize(p, lambda j: n + j, fixed_f)
        if cons_f is constant_violation:
            continue
        for q in program.G.graph.pieces:
            cons_g = localize(q, lambda j: n + j, fixed_g)
            if cons_g is constant_violation:
                continue
            merged = dict(cons_f)
            ok = True
            for hid, opts in cons_g.items():
                merged[hid] = merged.get(hid, frozenset({-1, 0, 1})) & opts
                if not merged[hid]:
                    ok = False
                    break
            if ok:
                combos.append(merged)
    if not combos:
        raise PreconditionError("the point has no implicit variables")

    k = len(hyperplanes)
    results = []
    nodes = 0

    def cell_lp(assignment):
        """Max-min-slack point of the partial cell, or None when empty."""
        ineq = []
        rhs = []
        eq = []
        erhs = []
        for hid, sigma in enumerate(assignment):
            body, c = hyperplanes[hid]
            if sigma == 0:
                eq.append(body)
                erhs.append(c)
            elif sigma > 0:
                # body.lam >= c + t
                ineq.append(tuple(-x for x in body) + (ONE,))
                rhs.append(-c)
            else:
                ineq.append(tuple(body) + (ONE,))
                rhs.append(c)
        # 0 <= t <= 1, maximize t.
        width = m + 1
        ineq.append(tuple([ZERO] * m + [ONE]))
        rhs.append(ONE)
        ineq.append(tuple([ZERO] * m + [-ONE]))
        rhs.append(ZERO)
        eq = [tuple(e) + (ZERO,) for e in eq]
        cost = tuple([ZERO] * m + [ONE])
        status, value, point = lp_extreme(
            width, cost, ineq, rhs, eq, erhs, maximize=True
        )
        if status != "optimal":
            return None
        if value == 0:
            return None
        return point[:m]

    def descend(hid, assignment, live):
        nonlocal nodes
        nodes += 1
        if nodes > limits.MAX_STRATA_NODES:
            raise limits.ResourceLimitError("stratum enumeration budget exceeded")
        if hid == k:
            rep = cell_lp(assignment)
            if rep is not None:
                results.append((tuple(assignment), rep))
            return
        for sigma in (0, -1, 1):
            nxt = [
                c
                for c in live
                if sigma in combos[c].get(hid, frozenset({-1, 0, 1}))
            ]
            if not nxt:
                continue
            assignment.append(sigma)
            if cell_lp(assignment) is not None:
                descend(hid + 1, assignment, nxt)
            assignment.pop()

    descend(0, [], list(range(len(combos))))
    if not results:
        raise PolystatError("no strata found for a nonempty multiplier set")
    return [
        {
            "stratum": "s%d:%s" % (i, "".join("0+-"[sig] for sig in signs)),
            "point": rep,
        }
        for i, (signs, rep) in enumerate(results)
    ]


# ---------------------------------------------------------------------------
# shared point data


def _zeros(k):
    return tuple([ZERO] * k)


def _cone_witness(piece):
    """A nonzero point of a polyhedral cone, or None when trivial.

    Works on the box-clipped cone, which meets every ray of the cone.
    """
    return _nonzero_at_coords(piece, range(piece.dim))


def _union_witness(union):
    for piece in union.pieces:
        w = _cone_witness(piece)
        if w is not None:
            return w
    return None


def _nonzero_at_coords(piece, coords):
    """A cone point that is nonzero in one of ``coords``, or None."""
    dim = piece.dim
    box = []
    for i in range(dim):
        row = [ZERO] * dim
        row[i] = ONE
        box.append((tuple(row), ONE))
        row = [ZERO] * dim
        row[i] = -ONE
        box.append((tuple(row), ONE))
    for i in coords:
        cost = [ZERO] * dim
        cost[i] = ONE
        for maximize in (True, False):
            res = piece.lp(cost, maximize=maximize, extra_ineq=box)
            if res.status == "optimal" and res.value != 0:
                return res.x
    return None


class _PointData:
    """Coderivative data shared by the checks at one feasible point."""

    def __init__(self, program, derived, z_bar):
        self.program = program
        self.derived = derived
        self.z_bar = rat_vector(z_bar)
        self.normal_m = limiting_normal_cone(program.M, self.z_bar)
        self.subdiff = program.objective.subdifferential_at(self.z_bar)
        self._d_h = None
        self._d_h_comp = None
        self._lambda_cache = {}

    def d_h(self):
        """Coderivative of the declared solution mapping at (z_bar, 0)."""
        if self._d_h is None:
            h = self.derived.H
            if not h.has_graph_point(self.z_bar, _zeros(h.n_out)):
                raise PreconditionError(
                    "the solution mapping does not contain 0 at the point"
                )
            self._d_h = h.coderivative_at(self.z_bar, _zeros(h.n_out))
        return self._d_h

    def d_h_composed(self):
        if self._d_h_comp is None:
            h = self.derived.H_composed
            if self.derived.H is h:
                self._d_h_comp = self.d_h()
            else:
                self._d_h_comp = h.coderivative_at(self.z_bar, _zeros(h.n_out))
        return self._d_h_comp

    def at_lambda(self, lam):
        lam = rat_vector(lam)
        key = tuple(lam)
        data = self._lambda_cache.get(key)
        if data is None:
            data = _LambdaData(self, lam)
            self._lambda_cache[key] = data
        return data


class _LambdaData:
    """Coderivatives of F, G, and the joint mapping at one multiplier."""

    def __init__(self, point, lam):
        self.point = point
        self.lam = tuple(rat_vector(lam))
        if not point.derived.K.has_graph_point(point.z_bar, self.lam):
            raise PreconditionError("the multiplier is not admissible at the point")
        self._d_f = None
        self._d_g = None
        self._d_ch = None

    def d_f(self):
        if self._d_f is None:
            self._d_f = self.point.program.F.coderivative_at(
                self.point.z_bar, self.lam
            )
        return self._d_f

    def d_g(self):
        if self._d_g is None:
            prog = self.point.program
            self._d_g = prog.G.coderivative_at(
                tuple(self.point.z_bar) + self.lam, _zeros(prog.s)
            )
        return self._d_g

    def d_ch(self):
        if self._d_ch is None:
            prog = self.point.program
            self._d_ch = self.point.derived.cal_H.coderivative_at(
                tuple(self.point.z_bar) + self.lam, _zeros(prog.m + prog.s)
            )
        return self._d_ch


def _require_feasible(derived, z_bar):
    z_bar = rat_vector(z_bar)
    if derived.Z is EMPTY or not derived.Z.contains(z_bar):
        raise PreconditionError("the point is not feasible for the program")
    return z_bar


# ---------------------------------------------------------------------------
# stationarity systems


def _system_feasible(total, blocks, eq_rows):
    """Feasibility of an intersection of embedded pieces and equations.

    ``blocks`` is a list of (polyhedron, positions); ``eq_rows`` a list of
    (row, rhs) over the combined space. Returns a witness or None.
    """
    piece = None
    for poly, positions in blocks:
        lifted = poly.embed(total, positions)
        piece = lifted if piece is None else piece.intersect(lifted)
    if piece is None:
        raise PolystatError("a system needs at least one block")
    piece = piece.with_rows(eq=eq_rows)
    return piece.feasible_point()


def _unit_row(total, entries):
    row = [ZERO] * total
    for idx, val in entries:
        row[idx] = val
    return tuple(row)


def _implicit_verdict(pd):
    prog = pd.program
    n = prog.n
    d_h = pd.d_h()
    s_h = d_h.n_out
    total = s_h + 3 * n
    pos_c = list(range(s_h + n))
    pos_g = list(range(s_h + n, s_h + 2 * n))
    pos_xi = list(range(s_h + 2 * n, s_h + 3 * n))
    eq_rows = [
        (
            _unit_row(
                total,
                [(s_h + i, ONE), (s_h + n + i, ONE), (s_h + 2 * n + i, ONE)],
            ),
            ZERO,
        )
        for i in range(n)
    ]
    for c_piece in d_h.graph.pieces:
        for m_piece in pd.normal_m.pieces:
            witness = _system_feasible(
                total,
                [
                    (c_piece, pos_c),
                    (pd.subdiff, pos_g),
                    (m_piece, pos_xi),
                ],
                eq_rows,
            )
            if witness is not None:
                return Verdict(
                    "implicit",
                    True,
                    witnesses={
                        "lambda": None,
                        "mu": None,
                        "nu": witness[:s_h],
                        "xi": witness[s_h + 2 * n : s_h + 3 * n],
                        "grad": witness[s_h + n : s_h + 2 * n],
                        "zeta": witness[s_h : s_h + n],
                    },
                )
    return Verdict("implicit", False)


def _fuzzy_verdict(pd, lam, stratum=None):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    ld = pd.at_lambda(lam)
    d_ch = ld.d_ch()
    head = m + s + n + m
    total = head + 2 * n
    pos_c = list(range(head))
    pos_g = list(range(head, head + n))
    pos_xi = list(range(head + n, head + 2 * n))
    eq_rows = []
    for i in range(n):
        eq_rows.append(
            (
                _unit_row(
                    total,
                    [(m + s + i, ONE), (head + i, ONE), (head + n + i, ONE)],
                ),
                ZERO,
            )
        )
    for j in range(m):
        eq_rows.append((_unit_row(total, [(m + s + n + j, ONE)]), ZERO))
    for c_piece in d_ch.graph.pieces:
        for m_piece in pd.normal_m.pieces:
            witness = _system_feasible(
                total,
                [
                    (c_piece, pos_c),
                    (pd.subdiff, pos_g),
                    (m_piece, pos_xi),
                ],
                eq_rows,
            )
            if witness is not None:
                return Verdict(
                    "fuzzy",
                    True,
                    witnesses={
                        "lambda": ld.lam,
                        "mu": witness[:m],
                        "nu": witness[m : m + s],
                        "xi": witness[head + n : head + 2 * n],
                        "grad": witness[head : head + n],
                    },
                    stratum=stratum,
                )
    return Verdict(
        "fuzzy", False, witnesses={"lambda": ld.lam}, stratum=stratum
    )


def _explicit_verdict(pd, lam, stratum=None):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    ld = pd.at_lambda(lam)
    d_f = ld.d_f()
    d_g = ld.d_g()
    # Variables: mu, zeta, nu, rho_z, rho_lam, g, xi.
    o_mu = 0
    o_zeta = m
    o_nu = m + n
    o_rz = m + n + s
    o_rl = m + n + s + n
    o_g = m + n + s + n + m
    o_xi = o_g + n
    total = o_xi + n
    pos_f = list(range(o_mu, o_mu + m)) + list(range(o_zeta, o_zeta + n))
    pos_g_block = list(range(o_nu, o_nu + s)) + list(range(o_rz, o_rz + n + m))
    pos_grad = list(range(o_g, o_g + n))
    pos_xi = list(range(o_xi, o_xi + n))
    eq_rows = []
    for j in range(m):
        eq_rows.append(
            (_unit_row(total, [(o_rl + j, ONE), (o_mu + j, -ONE)]), ZERO)
        )
    for i in range(n):
        eq_rows.append(
            (
                _unit_row(
                    total,
                    [
                        (o_g + i, ONE),
                        (o_zeta + i, ONE),
                        (o_rz + i, ONE),
                        (o_xi + i, ONE),
                    ],
                ),
                ZERO,
            )
        )
    for f_piece in d_f.graph.pieces:
        for g_piece in d_g.graph.pieces:
            for m_piece in pd.normal_m.pieces:
                witness = _system_feasible(
                    total,
                    [
                        (f_piece, pos_f),
                        (g_piece, pos_g_block),
                        (pd.subdiff, pos_grad),
                        (m_piece, pos_xi),
                    ],
                    eq_rows,
                )
                if witness is not None:
                    return Verdict(
                        "explicit",
                        True,
                        witnesses={
                            "lambda": ld.lam,
                            "mu": witness[o_mu : o_mu + m],
                            "nu": witness[o_nu : o_nu + s],
                            "xi": witness[o_xi : o_xi + n],
                            "grad": witness[o_g : o_g + n],
                            "zeta": witness[o_zeta : o_zeta + n],
                        },
                        stratum=stratum,
                    )
    return Verdict(
        "explicit", False, witnesses={"lambda": ld.lam}, stratum=stratum
    )


def check_stationarity(program, z_bar, kind, lam=None, derived=None):
    """Decide one stationarity condition at a feasible point.

    For the fuzzy and explicit kinds a multiplier may be supplied; when it
    is omitted the condition is decided on one representative per stratum
    of the multiplier set and a report with both aggregates is returned.
    """
    if kind not in STATIONARITY_KINDS:
        raise PreconditionError("unknown stationarity kind %r" % (kind,))
    if derived is None:
        derived = build_derived(program)
    z_bar = _require_feasible(derived, z_bar)
    pd = _PointData(program, derived, z_bar)
    if kind == "implicit":
        if lam is not None:
            raise PreconditionError("the implicit condition takes no multiplier")
        return _implicit_verdict(pd)
    solver = _fuzzy_verdict if kind == "fuzzy" else _explicit_verdict
    if lam is not None:
        return solver(pd, lam)
    reps = K_stratum_representatives(program, z_bar, derived)
    verdicts = [solver(pd, rep["point"], stratum=rep["stratum"]) for rep in reps]
    return StationarityReport(kind, verdicts)


def reverify_stationarity(program, derived, z_bar, verdict):
    """Exact re-check of a holding stationarity verdict at its point."""
    if verdict.kind not in STATIONARITY_KINDS or not verdict.holds:
        return False
    pd = _PointData(program, derived, rat_vector(z_bar))
    n, m, s = program.n, program.m, program.s
    w = verdict.witnesses
    grad = rat_vector(w["grad"])
    xi = rat_vector(w["xi"])
    nu = rat_vector(w["nu"])
    if not pd.subdiff.contains(grad):
        return False
    if not pd.normal_m.contains(xi):
        return False
    if verdict.kind == "implicit":
        zeta = rat_vector(w["zeta"])
        if any(grad[i] + zeta[i] + xi[i] != 0 for i in range(n)):
            return False
        return pd.d_h().graph.contains(tuple(nu) + tuple(zeta))
    lam = rat_vector(w["lambda"])
    ld = pd.at_lambda(lam)
    mu = rat_vector(w["mu"])
    if verdict.kind == "fuzzy":
        a_z = tuple(-(grad[i] + xi[i]) for i in range(n))
        a_l = _zeros(m)
        point = tuple(mu) + tuple(nu) + a_z + a_l
        return ld.d_ch().graph.contains(point)
    zeta = rat_vector(w["zeta"])
    rho_z = tuple(-(grad[i] + zeta[i] + xi[i]) for i in range(n))
    if not ld.d_f().graph.contains(tuple(mu) + tuple(zeta)):
        return False
    return ld.d_g().graph.contains(tuple(nu) + rho_z + tuple(mu))


# ---------------------------------------------------------------------------
# constraint qualifications


def _pick_rows(total, entries_per_row):
    return [_unit_row(total, entries) for entries in entries_per_row]


def _kernel_verdict(kind, cones, certs_when_holds, names):
    """Triviality of a union of solution cones, with a witness on failure.

    ``names`` labels the witness blocks as (key, start, stop) slices of
    the cone's coordinates.
    """
    for piece in cones:
        if piece.is_empty():
            continue
        witness = _cone_witness(piece)
        if witness is not None:
            parts = {key: witness[a:b] for key, a, b in names}
            return Verdict(
                kind,
                False,
                witnesses=parts,
                certificates=[ANCHOR_POLYHEDRAL],
            )
    return Verdict(
        kind,
        True,
        certificates=[ANCHOR_POLYHEDRAL] + list(certs_when_holds),
    )


def _cq_mordukhovich_i(pd):
    prog = pd.program
    n = prog.n
    d_h = pd.d_h_composed()
    s_h = d_h.n_out
    total = s_h + n
    matrix = _pick_rows(
        total,
        [[(j, ONE)] for j in range(s_h)] + [[(s_h + i, -ONE)] for i in range(n)],
    )
    cones = []
    for c_piece in d_h.graph.pieces:
        lifted = c_piece.linear_preimage(matrix)
        for m_piece in pd.normal_m.pieces:
            cones.append(lifted.intersect(m_piece.embed(total, range(s_h, total))))
    return _kernel_verdict(
        "mordukhovich_i",
        cones,
        [ANCHOR_KERNEL_IMPLICIT, ANCHOR_METRIC_REGULARITY],
        [("nu", 0, s_h), ("xi", s_h, total)],
    )


def _cq_mordukhovich_ii(pd, ld):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    d_ch = ld.d_ch()
    total = m + s + n
    matrix = _pick_rows(
        total,
        [[(j, ONE)] for j in range(m)]
        + [[(m + j, ONE)] for j in range(s)]
        + [[(m + s + i, -ONE)] for i in range(n)]
        + [[] for _ in range(m)],
    )
    cones = []
    for c_piece in d_ch.graph.pieces:
        lifted = c_piece.linear_preimage(matrix)
        for m_piece in pd.normal_m.pieces:
            cones.append(
                lifted.intersect(m_piece.embed(total, range(m + s, total)))
            )
    return _kernel_verdict(
        "mordukhovich_ii",
        cones,
        [ANCHOR_KERNEL_FUZZY],
        [("mu", 0, m), ("nu", m, m + s), ("xi", m + s, total)],
    )


def _cq_mordukhovich_iii(pd, ld):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    o_mu, o_nu, o_zeta, o_xi = 0, m, m + s, m + s + n
    total = m + s + 2 * n
    t_f = _pick_rows(
        total,
        [[(o_mu + j, ONE)] for j in range(m)]
        + [[(o_zeta + i, ONE)] for i in range(n)],
    )
    t_g = _pick_rows(
        total,
        [[(o_nu + j, ONE)] for j in range(s)]
        + [[(o_zeta + i, -ONE), (o_xi + i, -ONE)] for i in range(n)]
        + [[(o_mu + j, ONE)] for j in range(m)],
    )
    cones = []
    for f_piece in ld.d_f().graph.pieces:
        f_lift = f_piece.linear_preimage(t_f)
        for g_piece in ld.d_g().graph.pieces:
            g_lift = g_piece.linear_preimage(t_g)
            meet = f_lift.intersect(g_lift)
            for m_piece in pd.normal_m.pieces:
                cones.append(
                    meet.intersect(m_piece.embed(total, range(o_xi, total)))
                )
    return _kernel_verdict(
        "mordukhovich_iii",
        cones,
        [ANCHOR_KERNEL_EXPLICIT],
        [
            ("mu", 0, m),
            ("nu", m, m + s),
            ("zeta", m + s, m + s + n),
            ("xi", o_xi, total),
        ],
    )


def _cq_abstract(pd, ld):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    fix = {m + j: ZERO for j in range(s)}
    for i in range(n + m):
        fix[m + s + i] = ZERO
    sliced = ld.d_ch().graph.slice(fix)
    if sliced is EMPTY:
        raise PolystatError("a coderivative slice through 0 cannot be empty")
    if union_is_origin(sliced):
        return Verdict(
            "abstract_cq",
            True,
            certificates=[ANCHOR_POLYHEDRAL, ANCHOR_KERNEL_INTERMEDIATE],
        )
    witness = _union_witness(sliced)
    return Verdict(
        "abstract_cq",
        False,
        witnesses={"mu": witness},
        certificates=[ANCHOR_POLYHEDRAL],
    )


def _mr_strong_cone_pairs(pd, ld):
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    total = m + n
    t_g = _pick_rows(
        total,
        [[] for _ in range(s)]
        + [[(m + i, -ONE)] for i in range(n)]
        + [[(j, ONE)] for j in range(m)],
    )
    for f_piece in ld.d_f().graph.pieces:
        for g_piece in ld.d_g().graph.pieces:
            yield f_piece.intersect(g_piece.linear_preimage(t_g))


def _cq_mr(pd, ld):
    prog = pd.program
    m = prog.m
    for cone in _mr_strong_cone_pairs(pd, ld):
        if cone.is_empty():
            continue
        witness = _nonzero_at_coords(cone, range(m))
        if witness is not None:
            return Verdict(
                "mr_cq",
                False,
                witnesses={"mu": witness[:m], "zeta": witness[m:]},
                certificates=[ANCHOR_POLYHEDRAL],
            )
    return Verdict(
        "mr_cq",
        True,
        certificates=[ANCHOR_POLYHEDRAL, ANCHOR_METRIC_REGULARITY_CQ],
    )


def _cq_strong(pd, ld):
    prog = pd.program
    m = prog.m
    for cone in _mr_strong_cone_pairs(pd, ld):
        if cone.is_empty():
            continue
        witness = _cone_witness(cone)
        if witness is not None:
            return Verdict(
                "strong_cq",
                False,
                witnesses={"mu": witness[:m], "zeta": witness[m:]},
                certificates=[ANCHOR_POLYHEDRAL],
            )
    return Verdict(
        "strong_cq",
        True,
        certificates=[
            ANCHOR_POLYHEDRAL,
            ANCHOR_STRONG_CQ,
            ANCHOR_METRIC_REGULARITY_CQ,
            ANCHOR_SUM_BOUND,
        ],
    )


def _sum_rule_graph(pd, ld):
    """Graph of (mu, nu) -> D*F(mu) x {-mu} + D*G(nu) over (mu, nu, az, al)."""
    prog = pd.program
    n, m, s = prog.n, prog.m, prog.s
    head = m + s + n + m
    o_zeta = head
    o_rz = head + n
    o_rl = head + 2 * n
    total = head + 2 * n + m
    limits.check_kernel_dim(total, "sum-rule lift")
    eq_rows = []
    for i in range(n):
        eq_rows.append(
            (
                _unit_row(
                    total,
                    [(m + s + i, ONE), (o_zeta + i, -ONE), (o_rz + i, -ONE)],
                ),
                ZERO,
            )
        )
    for j in range(m):
        eq_rows.append(
            (
                _unit_row(
                    total,
                    [(m + s + n + j, ONE), (j, ONE), (o_rl + j, -ONE)],
                ),
                ZERO,
            )
        )
    pieces = []
    for f_piece in ld.d_f().graph.pieces:
        f_lift = f_piece.embed(
            total, list(range(m)) + list(range(o_zeta, o_zeta + n))
        )
        for g_piece in ld.d_g().graph.pieces:
            g_lift = g_piece.embed(
                total, list(range(m, m + s)) + list(range(o_rz, o_rz + n + m))
            )
            piece = f_lift.intersect(g_lift).with_rows(eq=eq_rows)
            if not piece.is_empty():
                pieces.append(piece)
    if not pieces:
        raise PolystatError("the sum-rule graph always contains 0")
    lifted = PolyUnion(total, pieces)
    out = lifted.eliminate(range(head, total))
    if out is EMPTY:
        raise PolystatError("projection of a nonempty union cannot be empty")
    return out.pruned()


def _cq_inc(pd, ld):
    left = ld.d_ch().graph
    right = _sum_rule_graph(pd, ld)
    ok, witness = contains_union(left, right)
    certs = [ANCHOR_POLYHEDRAL]
    if ok:
        certs.append(ANCHOR_SUM_BOUND)
        if pd.program.structure is not None:
            back, _ = contains_union(right, left)
            if back:
                certs.append(ANCHOR_STRUCTURED_EQUALITY)
    witnesses = {}
    if witness is not None:
        prog = pd.program
        m, s = prog.m, prog.s
        witnesses = {"mu": witness[:m], "nu": witness[m : m + s]}
    return Verdict("inc_lambda", ok, witnesses=witnesses, certificates=certs)


def _cq_sigma(pd):
    prog = pd.program
    h = pd.derived.H
    zero_level = h.graph.slice(
        {prog.n + j: ZERO for j in range(h.n_out)}
    )
    if zero_level is EMPTY or not zero_level.contains(pd.z_bar):
        raise PreconditionError("the point does not solve the implicit system")
    n_solution = limiting_normal_cone(zero_level, pd.z_bar)
    holds = True
    witness = None
    for p in n_solution.pieces:
        for q in pd.normal_m.pieces:
            meet = p.intersect(q.linear_preimage(_neg_identity(prog.n)))
            w = _cone_witness(meet)
            if w is not None:
                holds = False
                witness = w
                break
        if not holds:
            break
    certs = [ANCHOR_POLYHEDRAL]
    if holds:
        certs.append(ANCHOR_RANGE_INTERSECTION)
    witnesses = {} if witness is None else {"xi": witness}
    return Verdict("sigma", holds, witnesses=witnesses, certificates=certs)


def _neg_identity(k):
    rows = []
    for i in range(k):
        row = [ZERO] * k
        row[i] = -ONE
        rows.append(tuple(row))
    return rows


def check_cq(program, z_bar, kind, lam=None, derived=None):
    """Decide one constraint qualification at a feasible point.

    Multiplier-dependent kinds accept an explicit multiplier; without one
    they are decided per stratum and reported with both aggregates.
    """
    if kind not in CQ_KINDS:
        raise PreconditionError("unknown qualification kind %r" % (kind,))
    if derived is None:
        derived = build_derived(program)
    z_bar = _require_feasible(derived, z_bar)
    pd = _PointData(program, derived, z_bar)
    if kind in LAMBDA_FREE_CQ_KINDS:
        if lam is not None:
            raise PreconditionError("this qualification takes no multiplier")
        return _cq_mordukhovich_i(pd) if kind == "mordukhovich_i" else _cq_sigma(pd)
    solvers = {
        "mordukhovich_ii": _cq_mordukhovich_ii,
        "mordukhovich_iii": _cq_mordukhovich_iii,
        "abstract_cq": _cq_abstract,
        "mr_cq": _cq_mr,
        "strong_cq": _cq_strong,
        "inc_lambda": _cq_inc,
    }
    solver = solvers[kind]
    if lam is not None:
        return solver(pd, pd.at_lambda(lam))
    reps = K_stratum_representatives(program, z_bar, derived)
    verdicts = []
    for rep in reps:
        v = solver(pd, pd.at_lambda(rep["point"]))
        v.stratum = rep["stratum"]
        verdicts.append(v)
    return StationarityReport(kind, verdicts)


# ---------------------------------------------------------------------------
# the implication pipeline


def pipeline(program, z_bar, derived=None):
    """Run every check at a feasible point and wire up the implications.

    The result lists one node per decided statement, one edge per
    implication the theory provides, whether each edge's hypotheses are
    certified, and the branch certificates that promise explicit
    stationarity at local minimizers. Soundness of every certified edge is
    asserted against the computed verdicts.
    """
    if derived is None:
        derived = build_derived(program)
    z_bar = _require_feasible(derived, z_bar)
    pd = _PointData(program, derived, z_bar)
    reps = K_stratum_representatives(program, z_bar, derived)

    implicit_v = _implicit_verdict(pd)
    fuzzy_vs = []
    explicit_vs = []
    inc_vs = []
    cq_rows = []
    for rep in reps:
        ld = pd.at_lambda(rep["point"])
        fv = _fuzzy_verdict(pd, rep["point"], stratum=rep["stratum"])
        ev = _explicit_verdict(pd, rep["point"], stratum=rep["stratum"])
        iv = _cq_inc(pd, ld)
        iv.stratum = rep["stratum"]
        fuzzy_vs.append(fv)
        explicit_vs.append(ev)
        inc_vs.append(iv)
        row = {"stratum": rep["stratum"]}
        for cq_kind, solver in (
            ("mordukhovich_ii", _cq_mordukhovich_ii),
            ("mordukhovich_iii", _cq_mordukhovich_iii),
            ("abstract_cq", _cq_abstract),
            ("mr_cq", _cq_mr),
            ("strong_cq", _cq_strong),
        ):
            v = solver(pd, ld)
            v.stratum = rep["stratum"]
            row[cq_kind] = v
        cq_rows.append(row)

    mord_i = _cq_mordukhovich_i(pd)
    sigma_v = _cq_sigma(pd)
    try:
        khat_bounded = derived.K_hat.locally_bounded_at(
            tuple(z_bar) + _zeros(program.s)
        )
    except PreconditionError:
        khat_bounded = False

    fuzzy_report = StationarityReport("fuzzy", fuzzy_vs)
    explicit_report = StationarityReport("explicit", explicit_vs)
    inc_all = all(v.holds for v in inc_vs)
    inc_any = any(v.holds for v in inc_vs)

    edges = []
    edges.append(
        {
            "from": "implicit",
            "to": "fuzzy",
            "certificate": ANCHOR_IMPLICIT_TO_FUZZY,
            "certified": khat_bounded,
            "note": None
            if khat_bounded
            else "intermediate multiplier mapping is not locally bounded",
        }
    )
    for fv, ev, iv in zip(fuzzy_vs, explicit_vs, inc_vs):
        edges.append(
            {
                "from": "fuzzy",
                "to": "explicit",
                "stratum": fv.stratum,
                "certificate": ANCHOR_FUZZY_TO_EXPLICIT,
                "certified": iv.holds,
                "note": None,
            }
        )
    if program.structure is not None:
        for fv, ev, iv in zip(fuzzy_vs, explicit_vs, inc_vs):
            edges.append(
                {
                    "from": "fuzzy",
                    "to": "explicit",
                    "stratum": fv.stratum,
                    "certificate": ANCHOR_STRUCTURED_EQUALITY,
                    "certified": ANCHOR_STRUCTURED_EQUALITY in iv.certificates,
                    "equality": True,
                    "note": None,
                }
            )

    branches = [
        {
            "id": "branch_a",
            "certified": khat_bounded and inc_all,
            "requires": [
                ANCHOR_POLYHEDRAL,
                ANCHOR_INTERMEDIATE_BOUNDED,
                ANCHOR_SUM_BOUND,
            ],
        },
        {
            "id": "branch_b",
            "certified": khat_bounded,
            "requires": [ANCHOR_POLYHEDRAL, ANCHOR_INTERMEDIATE_BOUNDED],
        },
        {
            "id": "branch_c",
            "certified": inc_any,
            "requires": [ANCHOR_POLYHEDRAL, ANCHOR_SUM_BOUND],
        },
        {
            "id": "branch_d",
            "certified": True,
            "requires": [ANCHOR_POLYHEDRAL],
        },
    ]

    consistency = []

    def assert_edge(name, antecedent, certified, consequent):
        ok = (not antecedent) or (not certified) or consequent
        consistency.append({"edge": name, "sound": ok})
        if not ok:
            raise PolystatError("implication %s failed on computed verdicts" % name)

    assert_edge(
        "implicit->fuzzy",
        implicit_v.holds,
        khat_bounded,
        fuzzy_report.exists_holds,
    )
    for fv, ev, iv in zip(fuzzy_vs, explicit_vs, inc_vs):
        assert_edge(
            "fuzzy->explicit@%s" % fv.stratum, fv.holds, iv.holds, ev.holds
        )
        if ANCHOR_STRUCTURED_EQUALITY in iv.certificates:
            assert_edge(
                "explicit->fuzzy@%s" % fv.stratum, ev.holds, True, fv.holds
            )
    for row in cq_rows:
        strong = row["strong_cq"]
        assert_edge(
            "strong->mr@%s" % row["stratum"],
            strong.holds,
            True,
            row["mr_cq"].holds,
        )

    convex_node = {"applicable": program.is_convex(), "certified_global": False}
    if convex_node["applicable"]:
        held = implicit_v.holds or fuzzy_report.exists_holds or explicit_report.exists_holds
        convex_node["certified_global"] = held

    per_stratum_cq = []
    for row, iv in zip(cq_rows, inc_vs):
        entry = {"stratum": row["stratum"], "inc_lambda": iv.to_json()}
        for cq_kind in (
            "mordukhovich_ii",
            "mordukhovich_iii",
            "abstract_cq",
            "mr_cq",
            "strong_cq",
        ):
            entry[cq_kind] = row[cq_kind].to_json()
        per_stratum_cq.append(entry)

    return {
        "point": [rat_str(v) for v in z_bar],
        "strata": [
            {"stratum": rep["stratum"], "point": [rat_str(v) for v in rep["point"]]}
            for rep in reps
        ],
        "stationarity": {
            "implicit": implicit_v.to_json(),
            "fuzzy": fuzzy_report.to_json(),
            "explicit": explicit_report.to_json(),
        },
        "qualifications": {
            "mordukhovich_i": mord_i.to_json(),
            "sigma": sigma_v.to_json(),
            "per_stratum": per_stratum_cq,
        },
        "intermediate_locally_bounded": khat_bounded,
        "edges": edges,
        "branches": branches,
        "consistency": consistency,
        "convex": convex_node,
    }


# ---------------------------------------------------------------------------
# convexity


def convex_sufficiency(program, z_bar, derived=None):
    """Global optimality of a stationary point of a convex program.

    Precondition: single-piece graphs, a single-piece constraint set, and a
    convex objective. Any of the three stationarity conditions then
    certifies a global minimizer.
    """
    if not program.is_convex():
        raise PreconditionError(
            "convex sufficiency needs single-piece convex data"
        )
    if derived is None:
        derived = build_derived(program)
    z_bar = _require_feasible(derived, z_bar)
    pd = _PointData(program, derived, z_bar)
    implicit_v = _implicit_verdict(pd)
    via = []
    if implicit_v.holds:
        via.append("via-implicit")
    reps = K_stratum_representatives(program, z_bar, derived)
    fuzzy_any = False
    explicit_any = False
    for rep in reps:
        if not fuzzy_any and _fuzzy_verdict(pd, rep["point"]).holds:
            fuzzy_any = True
        if not explicit_any and _explicit_verdict(pd, rep["point"]).holds:
            explicit_any = True
    if fuzzy_any:
        via.append("via-fuzzy")
    if explicit_any:
        via.append("via-explicit")
    holds = bool(via)
    certs = [ANCHOR_CONVEX_SUFFICIENCY] + via if holds else []
    return Verdict("convex_sufficiency", holds, certificates=certs)
