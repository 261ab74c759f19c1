"""Set-valued mappings with piecewise polyhedral graphs.

A mapping is stored as its graph, a union of polyhedra in input-then-output
coordinates. Images, domains, and inverses are graph slices and coordinate
permutations. Coderivatives come from the limiting normal cone of the graph,
and the Mordukhovich criteria, the product qualification condition, and the
range-intersection test for sums are all decided exactly on those cones.

Every mapping here is polyhedral, so metric subregularity at any graph point
holds by Robinson's theorem; the checks below only ever decide the sharper
criteria (Aubin property, metric regularity, qualification conditions) and
name which certificate applies.
"""

from .exceptions import PolystatError, PreconditionError
from .geometry import (
    EMPTY,
    ConeUnion,
    ConvexPolyhedron,
    PolyUnion,
    cone_is_trivial,
    limiting_normal_cone,
    union_is_origin,
)
from .rational import ONE, ZERO, rat, rat_vector

ANCHOR_POLYHEDRAL = "polyhedral-graph-subregularity"
ANCHOR_AUBIN = "mordukhovich-aubin"
ANCHOR_METRIC_REGULARITY = "mordukhovich-metric-regularity"
ANCHOR_PRODUCT_BOUND = "product-rule-bound"
ANCHOR_CHAIN_BOUND = "chain-rule-bound"
ANCHOR_RANGE_INTERSECTION = "range-intersection-subregularity"


def _swap_matrix(p, q):
    """Matrix of T(y, x) = (x, y) with dim(x) = p and dim(y) = q."""
    total = p + q
    rows = []
    for i in range(p):
        row = [ZERO] * total
        row[q + i] = ONE
        rows.append(tuple(row))
    for j in range(q):
        row = [ZERO] * total
        row[j] = ONE
        rows.append(tuple(row))
    return rows


class PolyMapping:
    """A set-valued mapping given by a polyhedral-union graph."""

    __slots__ = ("n_in", "n_out", "graph")

    def __init__(self, n_in, n_out, graph):
        if not isinstance(graph, PolyUnion):
            raise PolystatError("graph must be a PolyUnion")
        if graph.dim != n_in + n_out:
            raise PolystatError(
                "graph dimension %d does not match %d + %d"
                % (graph.dim, n_in, n_out)
            )
        self.n_in = n_in
        self.n_out = n_out
        self.graph = graph

    def __repr__(self):
        return "PolyMapping(%d -> %d, %d pieces)" % (
            self.n_in,
            self.n_out,
            len(self.graph.pieces),
        )

    # ---------- pointwise structure ----------

    def image_at(self, z):
        """The value set at ``z``; EMPTY when z is outside the domain."""
        z = rat_vector(z)
        if len(z) != self.n_in:
            raise PreconditionError("point has wrong dimension")
        return self.graph.slice({i: z[i] for i in range(self.n_in)})

    def domain(self):
        out = self.graph.eliminate(range(self.n_in, self.n_in + self.n_out))
        if out is EMPTY:
            raise PolystatError("a nonempty graph cannot have empty domain")
        return out.pruned()

    def inverse(self):
        matrix = _swap_matrix(self.n_in, self.n_out)
        flipped = self.graph.linear_preimage(matrix)
        if flipped is EMPTY:
            raise PolystatError("inverse graph cannot be empty")
        return PolyMapping(self.n_out, self.n_in, flipped)

    def has_graph_point(self, z, w):
        return self.graph.contains(tuple(rat_vector(z)) + tuple(rat_vector(w)))

    # ---------- coderivatives ----------

    def coderivative_at(self, z, w):
        z = rat_vector(z)
        w = rat_vector(w)
        point = tuple(z) + tuple(w)
        if not self.graph.contains(point):
            raise PreconditionError("base point is not on the graph")
        normal = limiting_normal_cone(self.graph, point)
        return CoderivativeData(self, point, normal)

    def criterion_check(self, z, w, kind):
        data = self.coderivative_at(z, w)
        if kind == "aubin":
            return data.aubin()
        if kind == "metric_regularity":
            return data.metric_regular()
        raise PreconditionError("unknown criterion kind %r" % (kind,))

    # ---------- boundedness ----------

    def locally_bounded_at(self, z):
        """Exact test: no graph piece through z has a vertical recession ray."""
        z = rat_vector(z)
        if len(z) != self.n_in:
            raise PreconditionError("point has wrong dimension")
        fix = [(i, z[i]) for i in range(self.n_in)]
        seen = False
        for piece in self.graph.pieces:
            eq_extra = []
            for i, v in fix:
                row = [ZERO] * piece.dim
                row[i] = ONE
                eq_extra.append((tuple(row), v))
            res = piece.lp(None, extra_eq=eq_extra)
            if res.status != "optimal":
                continue
            seen = True
            rec = piece.recession_cone()
            vertical = rec.with_rows(
                eq=[(tuple(row), ZERO) for row, _ in eq_extra]
            )
            if not cone_is_trivial(vertical):
                return False
        if not seen:
            raise PreconditionError("point is outside the domain")
        return True

    # ---------- serialization ----------

    def to_json(self):
        return {
            "n_in": self.n_in,
            "n_out": self.n_out,
            "graph": self.graph.to_json(),
        }

    @classmethod
    def from_json(cls, data):
        extra = set(data) - {"n_in", "n_out", "graph"}
        if extra:
            raise PreconditionError(
                "unknown mapping fields: %s" % ", ".join(sorted(extra))
            )
        return cls(
            int(data["n_in"]),
            int(data["n_out"]),
            PolyUnion.from_json(data["graph"]),
        )


class CoderivativeData:
    """The full coderivative of a mapping at one graph point.

    The normal cone to the graph is computed once; the coderivative graph
    {(eta, xi) : xi in D*(eta)} is its image under (xi, -eta) <-> (eta, xi),
    and every query below is a slice or projection of that union.
    """

    __slots__ = ("n_in", "n_out", "base", "normal_cone", "graph")

    def __init__(self, mapping, base, normal_cone):
        self.n_in = mapping.n_in
        self.n_out = mapping.n_out
        self.base = base
        self.normal_cone = normal_cone
        # (eta, xi) belongs to the coderivative graph iff (xi, -eta) is a
        # graph normal; realize this as a linear preimage piece by piece.
        total = self.n_out + self.n_in
        matrix = []
        for i in range(self.n_in):
            row = [ZERO] * total
            row[self.n_out + i] = ONE
            matrix.append(tuple(row))
        for j in range(self.n_out):
            row = [ZERO] * total
            row[j] = -ONE
            matrix.append(tuple(row))
        graph = normal_cone.linear_preimage(matrix)
        if graph is EMPTY:
            raise PolystatError("coderivative graph lost the origin")
        self.graph = ConeUnion.from_union(graph)

    def at(self, eta):
        """The set of xi with xi in D*(eta); EMPTY when there is none."""
        eta = rat_vector(eta)
        if len(eta) != self.n_out:
            raise PreconditionError("direction has wrong dimension")
        return self.graph.slice({j: eta[j] for j in range(self.n_out)})

    def zero_image(self):
        out = self.at([ZERO] * self.n_out)
        if out is EMPTY:
            raise PolystatError("D*(0) always contains 0")
        return out

    def kernel(self):
        """{eta : 0 in D*(eta)}; never empty since the cone contains 0."""
        fix = {self.n_out + i: ZERO for i in range(self.n_in)}
        out = self.graph.slice(fix)
        if out is EMPTY:
            raise PolystatError("the kernel always contains 0")
        return out

    def range(self):
        """Projection of the coderivative graph onto the xi coordinates."""
        out = self.graph.eliminate(range(self.n_out))
        if out is EMPTY:
            raise PolystatError("range projection cannot be empty")
        return out.pruned()

    def aubin(self):
        return union_is_origin(self.zero_image())

    def metric_regular(self):
        return union_is_origin(self.kernel())

    def certificates(self):
        out = [ANCHOR_POLYHEDRAL]
        if self.metric_regular():
            out.append(ANCHOR_METRIC_REGULARITY)
            out.append(ANCHOR_AUBIN)
        elif self.aubin():
            out.append(ANCHOR_AUBIN)
        return out

    def to_json(self):
        return {
            "base": [str(v) for v in self.base],
            "graph": self.graph.to_json(),
            "certificates": self.certificates(),
        }


# ---------- calculus ----------


def compose(s1, s2):
    """Graph of s2 after s1, plus the intermediate mapping.

    Returns (composition, xi) where xi maps (z, w) to the set of linking
    values {y : y in s1(z), w in s2(y)}.
    """
    if s1.n_out != s2.n_in:
        raise PreconditionError("inner dimensions do not match")
    n, k, m = s1.n_in, s1.n_out, s2.n_out
    lifted = []
    for p in s1.graph.pieces:
        p_lift = p.embed(n + k + m, list(range(n + k)))
        for q in s2.graph.pieces:
            q_lift = q.embed(n + k + m, list(range(n, n + k + m)))
            piece = p_lift.intersect(q_lift)
            if not piece.is_empty():
                lifted.append(piece)
    if not lifted:
        raise PreconditionError("composition has an empty graph")

    comp_pieces = [piece.eliminate(range(n, n + k)) for piece in lifted]
    comp = PolyUnion.maybe(n + m, comp_pieces)
    if comp is EMPTY:
        raise PolystatError("projection of nonempty pieces cannot be empty")
    composition = PolyMapping(n, m, comp.pruned())

    # Reorder (z, y, w) -> (z, w, y) for the intermediate mapping.
    matrix = []
    total = n + m + k
    for i in range(n):
        row = [ZERO] * total
        row[i] = ONE
        matrix.append(tuple(row))
    for i in range(k):
        row = [ZERO] * total
        row[n + m + i] = ONE
        matrix.append(tuple(row))
    for i in range(m):
        row = [ZERO] * total
        row[n + i] = ONE
        matrix.append(tuple(row))
    xi_graph = PolyUnion(n + k + m, lifted).linear_preimage(matrix)
    if xi_graph is EMPTY:
        raise PolystatError("intermediate graph cannot be empty")
    xi = PolyMapping(n + m, k, xi_graph.pruned())
    return composition, xi


def product(g1, g2):
    """Graph of z -> g1(z) x g2(z)."""
    if g1.n_in != g2.n_in:
        raise PreconditionError("input dimensions do not match")
    n, m1, m2 = g1.n_in, g1.n_out, g2.n_out
    total = n + m1 + m2
    pieces = []
    for p in g1.graph.pieces:
        p_lift = p.embed(total, list(range(n + m1)))
        for q in g2.graph.pieces:
            q_lift = q.embed(total, list(range(n)) + list(range(n + m1, total)))
            piece = p_lift.intersect(q_lift)
            if not piece.is_empty():
                pieces.append(piece)
    if not pieces:
        raise PreconditionError("product has an empty graph")
    return PolyMapping(n, m1 + m2, PolyUnion(total, pieces).pruned())


def product_qualification(g1, g2, z, w1, w2):
    """Qualification report for the product rule at one point.

    Checks D*g1(z,w1)(0) cap (-D*g2(z,w2)(0)) = {0} and records that the
    polyhedral estimate applies regardless.
    """
    d1 = g1.coderivative_at(z, w1)
    d2 = g2.coderivative_at(z, w2)
    left = d1.zero_image()
    right = d2.zero_image().negate()
    meet = left.intersect(right)
    qual = meet is EMPTY or union_is_origin(meet)
    certificates = [ANCHOR_POLYHEDRAL, ANCHOR_PRODUCT_BOUND]
    if qual:
        certificates.append("product-qualification-condition")
    return {
        "qualification_holds": qual,
        "polyhedral": True,
        "certificates": certificates,
    }


def sigma_subregularity_check(g1, g2, z, w1, w2):
    """Sufficient test that the product of g1 and g2 is subregular.

    The informative route intersects the coderivative ranges: when
    rge D*g1(z,w1) meets -rge D*g2(z,w2) only at the origin, the splitting
    mapping z -> (z - g1^{-1}(w1)) x (z - g2^{-1}(w2)) is metrically
    regular and the product inherits subregularity from its factors. The
    polyhedral certificate covers the remaining cases and is reported
    separately so the sharper one stays visible.
    """
    d1 = g1.coderivative_at(z, w1)
    d2 = g2.coderivative_at(z, w2)
    r1 = d1.range()
    r2 = d2.range().negate()
    meet = r1.intersect(r2)
    condition = meet is EMPTY or union_is_origin(meet)
    certificates = [ANCHOR_POLYHEDRAL]
    if condition:
        certificates.append(ANCHOR_RANGE_INTERSECTION)
    return {
        "range_condition_holds": condition,
        "polyhedral_fallback": True,
        "product_subregular": True,
        "certificates": certificates,
    }
