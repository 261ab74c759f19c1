"""Variational geometry of polyhedral unions.

Tangent and normal cones, exact containment between unions (with separating
witnesses), and Minkowski sums. The limiting normal cone is computed by
stratifying a local conic model of the union: sign vectors over the active
hyperplanes enumerate the cells, every cell of a central arrangement is
adherent to the origin, and the regular normal cone is constant on each
cell, so the limiting cone is the finite union of the per-cell regular
cones.
"""

from .. import limits
from ..exceptions import PolystatError, PreconditionError, ResourceLimitError
from ..rational import ONE, ZERO, dot, primitive, rat
from .ddm import polar_cone_hrep
from .polyhedron import EMPTY, ConvexPolyhedron, PolyUnion
from .lp import lp_feasible


class PolyCone(ConvexPolyhedron):
    """A polyhedral cone (homogeneous H-representation)."""

    __slots__ = ()

    def __init__(self, dim, ineq=(), eq=(), _known_nonempty=True):
        super().__init__(dim, ineq=ineq, eq=eq, _known_nonempty=_known_nonempty)
        if not self.is_cone():
            raise PreconditionError("rows of a PolyCone must be homogeneous")

    @classmethod
    def from_polyhedron(cls, piece):
        return cls(piece.dim, ineq=piece.ineq, eq=piece.eq)


class ConeUnion(PolyUnion):
    """A finite union of polyhedral cones."""

    __slots__ = ()

    def __init__(self, dim, pieces, _known_nonempty=True):
        super().__init__(dim, pieces, _known_nonempty=_known_nonempty)
        for piece in self.pieces:
            if not piece.is_cone():
                raise PreconditionError("pieces of a ConeUnion must be cones")

    @classmethod
    def from_union(cls, union):
        return cls(union.dim, union.pieces)


def _as_union(obj):
    if isinstance(obj, PolyUnion):
        return obj
    if isinstance(obj, ConvexPolyhedron):
        return PolyUnion(obj.dim, (obj,))
    raise PolystatError("expected a polyhedron or a union")


def tangent_cone(obj, point):
    """Bouligand tangent cone of a polyhedral union at a member point."""
    union = _as_union(obj)
    point = tuple(rat(v) for v in point)
    pieces = []
    for piece in union.pieces:
        if not piece.contains(point):
            continue
        active = [
            (a, ZERO) for a, b in piece.ineq if dot(a, point) == b
        ]
        eqs = [(e, ZERO) for e, _ in piece.eq]
        pieces.append(PolyCone(union.dim, ineq=active, eq=eqs))
    if not pieces:
        raise PreconditionError("tangent cone asked at a point outside the set")
    return ConeUnion(union.dim, pieces).pruned()


def polar_cone(obj):
    """Polar of a cone or of a union of cones (a single convex cone)."""
    if isinstance(obj, ConvexPolyhedron):
        if not obj.is_cone():
            raise PreconditionError("polar_cone expects homogeneous input")
        return PolyCone.from_polyhedron(polar_cone_hrep(obj))
    union = _as_union(obj)
    ineq = []
    eq = []
    for piece in union.pieces:
        if not piece.is_cone():
            raise PreconditionError("polar_cone expects homogeneous input")
        polar = polar_cone_hrep(piece)
        ineq.extend(polar.ineq)
        eq.extend(polar.eq)
    return PolyCone(union.dim, ineq=ineq, eq=eq)


def regular_normal_cone(obj, point):
    """Frechet normal cone: polar of the tangent cone."""
    return polar_cone(tangent_cone(obj, point))


def _localized_pieces(union, point):
    """Tangent-cone pieces of the union at ``point`` (the local conic model)."""
    cones = []
    for piece in union.pieces:
        if not piece.contains(point):
            continue
        rows = []
        for a, b in piece.ineq:
            if dot(a, point) == b:
                rows.append(a)
        eqs = [e for e, _ in piece.eq]
        cones.append((tuple(rows), tuple(eqs)))
    return cones


def _canonical_normal(vec):
    """Primitive vector with positive leading nonzero; returns (key, sign)."""
    p = primitive(vec)
    for x in p:
        if x != 0:
            if x < 0:
                return tuple(-y for y in p), -1
            return p, 1
    return p, 0


def limiting_normal_cone(obj, point):
    """Mordukhovich normal cone of a polyhedral union at a member point."""
    union = _as_union(obj)
    point = tuple(rat(v) for v in point)
    if not union.contains(point):
        raise PreconditionError("limiting normal cone asked outside the set")
    dim = union.dim
    limits.check_kernel_dim(dim, "stratification")
    local = _localized_pieces(union, point)

    # Canonical hyperplanes appearing among the localized rows.
    hyperplanes = []
    index = {}
    piece_signs = []  # per piece: {hyperplane id: frozenset of allowed signs}
    for rows, eqs in local:
        allowed = {}
        for a in rows:
            key, sign = _canonical_normal(a)
            if sign == 0:
                continue
            hid = index.setdefault(key, len(index))
            if hid == len(hyperplanes):
                hyperplanes.append(key)
            # a.d <= 0 with a = sign*key: sign*key.d <= 0
            opts = frozenset({-sign, 0})
            allowed[hid] = allowed.get(hid, frozenset({-1, 0, 1})) & opts
        for e in eqs:
            key, sign = _canonical_normal(e)
            if sign == 0:
                continue
            hid = index.setdefault(key, len(index))
            if hid == len(hyperplanes):
                hyperplanes.append(key)
            allowed[hid] = allowed.get(hid, frozenset({-1, 0, 1})) & {0}
        piece_signs.append(allowed)

    k = len(hyperplanes)
    nodes = 0
    polar_cache = {}
    cell_cones = []

    def cell_rows(assignment):
        ineq = []
        eq = []
        for hid, sigma in enumerate(assignment):
            h = hyperplanes[hid]
            if sigma == 0:
                eq.append(h)
            elif sigma > 0:
                ineq.append(tuple(-x for x in h))  # h.d >= 1
            else:
                ineq.append(h)  # h.d <= -1
        return ineq, eq

    def feasible(assignment):
        ineq, eq = cell_rows(assignment)
        rhs_i = [-ONE if any(x != 0 for x in row) else ZERO for row in ineq]
        # Scaled strictness: h.d >= 1 encoded as (-h).d <= -1.
        return lp_feasible(dim, ineq, rhs_i, eq, [ZERO] * len(eq))

    def piece_polar(piece_id, zero_set):
        key = (piece_id, zero_set)
        if key not in polar_cache:
            rows, eqs = local[piece_id]
            active = []
            for a in rows:
                ckey, sign = _canonical_normal(a)
                if sign == 0 or index[ckey] in zero_set:
                    active.append((a, ZERO))
            cone = PolyCone(
                dim, ineq=active, eq=[(e, ZERO) for e in eqs]
            )
            polar_cache[key] = polar_cone_hrep(cone)
        return polar_cache[key]

    def descend(hid, assignment, live):
        nonlocal nodes
        nodes += 1
        if nodes > limits.MAX_STRATA_NODES:
            raise ResourceLimitError("stratification node budget exceeded")
        if not live:
            return
        if hid == k:
            witness = feasible(assignment)
            if witness is None:
                return
            zero_set = frozenset(
                h for h, sigma in enumerate(assignment) if sigma == 0
            )
            polars = [piece_polar(pid, zero_set) for pid in live]
            ineq = []
            eq = []
            for p in polars:
                ineq.extend(p.ineq)
                eq.extend(p.eq)
            cell_cones.append(PolyCone(dim, ineq=ineq, eq=eq))
            return
        for sigma in (0, -1, 1):
            nxt = [
                pid
                for pid in live
                if sigma in piece_signs[pid].get(hid, frozenset({-1, 0, 1}))
            ]
            if not nxt:
                continue
            assignment.append(sigma)
            # Partial feasibility pruning keeps the search shallow.
            if feasible(assignment) is not None:
                descend(hid + 1, assignment, nxt)
            assignment.pop()

    descend(0, [], list(range(len(local))))
    if not cell_cones:
        raise PolystatError("no strata found; the point should have one")
    return ConeUnion(dim, cell_cones).pruned()


def contains_union(left, right):
    """Is every point of ``left`` in ``right``? Exact, with witness.

    Returns (True, None) or (False, witness) where the witness is a point
    of ``left`` outside ``right``. Pieces of ``left`` are recursively split
    along right-hand rows that strictly straddle them; a leaf piece either
    lands inside one right piece or its relative-interior point separates.
    """
    lu = _as_union(left)
    ru = _as_union(right)
    if lu.dim != ru.dim:
        raise PolystatError("dimension mismatch")

    hyperplanes = []
    for q in ru.pieces:
        for a, b in q.ineq:
            hyperplanes.append((a, b))
        for e, d in q.eq:
            hyperplanes.append((e, d))

    def split(piece, depth):
        if piece.is_empty():
            return None
        for q in ru.pieces:
            if piece.subset_of(q):
                return None
        if depth > len(hyperplanes) + 1:
            raise PolystatError("containment recursion exceeded its bound")
        for h, c in hyperplanes:
            hi = piece.lp(h, maximize=True)
            above = hi.status == "unbounded" or (
                hi.status == "optimal" and hi.value > c
            )
            if not above:
                continue
            lo = piece.lp(h, maximize=False)
            below = lo.status == "unbounded" or (
                lo.status == "optimal" and lo.value < c
            )
            if not below:
                continue
            lower = piece.with_rows(ineq=[(h, c)])
            upper = piece.with_rows(ineq=[(tuple(-x for x in h), -c)])
            w = split(lower, depth + 1)
            if w is not None:
                return w
            return split(upper, depth + 1)
        witness = piece.relint_point()
        if witness is None:
            raise PolystatError("nonempty piece produced no interior point")
        if ru.contains(witness):
            raise PolystatError(
                "internal inconsistency: leaf witness landed inside the union"
            )
        return witness

    for piece in lu.pieces:
        w = split(piece, 0)
        if w is not None:
            return False, w
    return True, None


def union_equal(left, right):
    """Mutual containment; returns (bool, witness-or-None)."""
    ok, w = contains_union(left, right)
    if not ok:
        return False, w
    ok, w = contains_union(right, left)
    if not ok:
        return False, w
    return True, None


def minkowski_sum(left, right):
    """Pointwise sum of two unions (exact, via lift and elimination)."""
    lu = _as_union(left)
    ru = _as_union(right)
    if lu.dim != ru.dim:
        raise PolystatError("dimension mismatch")
    n = lu.dim
    pieces = []
    for p in lu.pieces:
        for q in ru.pieces:
            # Variables (x, u): u in p, x - u in q.
            ineq = [( (ZERO,) * n + a, b) for a, b in p.ineq]
            eq = [((ZERO,) * n + e, d) for e, d in p.eq]
            for a, b in q.ineq:
                ineq.append((a + tuple(-x for x in a), b))
            for e, d in q.eq:
                eq.append((e + tuple(-x for x in e), d))
            lifted = ConvexPolyhedron(2 * n, ineq=ineq, eq=eq)
            pieces.append(lifted.eliminate(range(n, 2 * n)))
    union = PolyUnion.maybe(n, pieces)
    if union is EMPTY:
        raise PolystatError("sum of nonempty unions cannot be empty")
    return union.pruned()
