"""Convex polyhedra in H-representation and finite unions of them.

A ConvexPolyhedron is {x : A x <= b, E x = d} with canonical
primitive-integer rows. A PolyUnion is a finite union of nonempty pieces;
operations that can legitimately produce the empty set return the EMPTY
sentinel instead of an empty union.
"""

from .. import limits
from ..exceptions import PolystatError, PreconditionError
from ..kernels import fm_combine
from ..rational import ONE, ZERO, dot, primitive, rat, rat_str
from .lp import lp_feasible, solve_lp


def _canonical_rows(dim, ineq_rows, eq_rows):
    """Normalize rows to primitive integers, dedup, detect trivial emptiness.

    Returns (ineq, eq, trivially_empty).
    """
    seen_ineq = {}
    seen_eq = {}
    for a, b in eq_rows:
        vec = tuple(rat(x) for x in a)
        if len(vec) != dim:
            raise PolystatError("equality row has wrong length")
        rhs = rat(b)
        full = primitive(vec + (rhs,))
        vec, rhs = full[:-1], full[-1]
        if all(x == 0 for x in vec):
            if rhs != 0:
                return ((tuple(ZERO for _ in range(dim)), -ONE),), (), True
            continue
        # Sign convention: first nonzero coefficient positive.
        for x in vec:
            if x != 0:
                if x < 0:
                    vec = tuple(-y for y in vec)
                    rhs = -rhs
                break
        seen_eq[(vec, rhs)] = None
    for a, b in ineq_rows:
        vec = tuple(rat(x) for x in a)
        if len(vec) != dim:
            raise PolystatError("inequality row has wrong length")
        rhs = rat(b)
        full = primitive(vec + (rhs,))
        vec, rhs = full[:-1], full[-1]
        if all(x == 0 for x in vec):
            if rhs < 0:
                return ((tuple(ZERO for _ in range(dim)), -ONE),), (), True
            continue
        seen_ineq[(vec, rhs)] = None
    return tuple(seen_ineq), tuple(seen_eq), False


class ConvexPolyhedron:
    """A convex polyhedron {x : A x <= b, E x = d} over the rationals."""

    __slots__ = ("dim", "ineq", "eq", "_empty", "_witness")

    def __init__(self, dim, ineq=(), eq=(), _known_nonempty=False):
        self.dim = int(dim)
        if self.dim < 0:
            raise PolystatError("negative dimension")
        rows_i, rows_e, trivially_empty = _canonical_rows(self.dim, ineq, eq)
        self.ineq = rows_i
        self.eq = rows_e
        self._witness = None
        if trivially_empty:
            self._empty = True
        elif _known_nonempty or (not rows_i and not rows_e):
            self._empty = False
        else:
            self._empty = None

    # ---------- constructors ----------

    @classmethod
    def universe(cls, dim):
        return cls(dim)

    @classmethod
    def from_box(cls, bounds):
        """bounds: sequence of (lo, hi) pairs."""
        dim = len(bounds)
        ineq = []
        for i, (lo, hi) in enumerate(bounds):
            lo, hi = rat(lo), rat(hi)
            if lo > hi:
                raise PolystatError("box bounds must satisfy lo <= hi")
            row = [ZERO] * dim
            row[i] = ONE
            ineq.append((tuple(row), hi))
            row = [ZERO] * dim
            row[i] = -ONE
            ineq.append((tuple(row), -lo))
        return cls(dim, ineq=ineq, _known_nonempty=True)

    @classmethod
    def singleton(cls, point):
        point = tuple(rat(v) for v in point)
        dim = len(point)
        eq = []
        for i, v in enumerate(point):
            row = [ZERO] * dim
            row[i] = ONE
            eq.append((tuple(row), v))
        return cls(dim, eq=eq, _known_nonempty=True)

    # ---------- predicates ----------

    def contains(self, point):
        if len(point) != self.dim:
            raise PolystatError("point has wrong dimension")
        point = tuple(rat(v) for v in point)
        for a, b in self.ineq:
            if dot(a, point) > b:
                return False
        for e, d in self.eq:
            if dot(e, point) != d:
                return False
        return True

    def is_empty(self):
        if self._empty is None:
            witness = lp_feasible(
                self.dim,
                [a for a, _ in self.ineq],
                [b for _, b in self.ineq],
                [e for e, _ in self.eq],
                [d for _, d in self.eq],
            )
            self._empty = witness is None
            self._witness = witness
        return self._empty

    def feasible_point(self):
        if self.is_empty():
            return None
        if self._witness is None:
            self._witness = lp_feasible(
                self.dim,
                [a for a, _ in self.ineq],
                [b for _, b in self.ineq],
                [e for e, _ in self.eq],
                [d for _, d in self.eq],
            )
        return self._witness

    def is_cone(self):
        return all(b == 0 for _, b in self.ineq) and all(d == 0 for _, d in self.eq)

    # ---------- linear programming over the piece ----------

    def lp(self, c, maximize=True, extra_ineq=(), extra_eq=()):
        """Optimize c.x over the polyhedron (optionally with extra rows)."""
        a_ub = [a for a, _ in self.ineq] + [a for a, _ in extra_ineq]
        b_ub = [b for _, b in self.ineq] + [b for _, b in extra_ineq]
        a_eq = [e for e, _ in self.eq] + [e for e, _ in extra_eq]
        b_eq = [d for _, d in self.eq] + [d for _, d in extra_eq]
        return solve_lp(self.dim, c, a_ub, b_ub, a_eq, b_eq, maximize=maximize)

    def row_valid(self, a, b, strict_equality=False):
        """Does a.x <= b (or = b) hold everywhere on the polyhedron?"""
        res = self.lp(a, maximize=True)
        if res.status == "unbounded":
            return False
        if res.status == "infeasible":
            return True
        if res.value > rat(b):
            return False
        if strict_equality:
            res2 = self.lp(a, maximize=False)
            if res2.status != "optimal" or res2.value < rat(b):
                return False
        return True

    def subset_of(self, other):
        """Exact test for containment in another single polyhedron."""
        if self.dim != other.dim:
            raise PolystatError("dimension mismatch")
        if self.is_empty():
            return True
        for a, b in other.ineq:
            if not self.row_valid(a, b):
                return False
        for e, d in other.eq:
            if not self.row_valid(e, d, strict_equality=True):
                return False
        return True

    def same_set(self, other):
        return self.subset_of(other) and other.subset_of(self)

    # ---------- constructive operations ----------

    def intersect(self, other):
        if self.dim != other.dim:
            raise PolystatError("dimension mismatch")
        return ConvexPolyhedron(
            self.dim, ineq=self.ineq + other.ineq, eq=self.eq + other.eq
        )

    def with_rows(self, ineq=(), eq=(), _known_nonempty=False):
        return ConvexPolyhedron(
            self.dim,
            ineq=self.ineq + tuple(ineq),
            eq=self.eq + tuple(eq),
            _known_nonempty=_known_nonempty,
        )

    def product(self, other):
        dim = self.dim + other.dim
        pad_left = (ZERO,) * self.dim
        pad_right = (ZERO,) * other.dim
        ineq = [(a + pad_right, b) for a, b in self.ineq]
        ineq += [(pad_left + a, b) for a, b in other.ineq]
        eq = [(e + pad_right, d) for e, d in self.eq]
        eq += [(pad_left + e, d) for e, d in other.eq]
        known = self._empty is False and other._empty is False
        return ConvexPolyhedron(dim, ineq=ineq, eq=eq, _known_nonempty=known)

    def translate(self, t):
        """{x + t : x in P}."""
        t = tuple(rat(v) for v in t)
        ineq = [(a, b + dot(a, t)) for a, b in self.ineq]
        eq = [(e, d + dot(e, t)) for e, d in self.eq]
        return ConvexPolyhedron(
            self.dim, ineq=ineq, eq=eq, _known_nonempty=self._empty is False
        )

    def negate(self):
        """{-x : x in P}."""
        ineq = [(tuple(-x for x in a), b) for a, b in self.ineq]
        eq = [(tuple(-x for x in e), d) for e, d in self.eq]
        return ConvexPolyhedron(
            self.dim, ineq=ineq, eq=eq, _known_nonempty=self._empty is False
        )

    def embed(self, total_dim, positions):
        """Place this polyhedron's coordinates at ``positions`` in a larger
        space, leaving the other coordinates free."""
        positions = list(positions)
        if len(positions) != self.dim:
            raise PolystatError("positions must match the dimension")
        ineq = []
        for a, b in self.ineq:
            row = [ZERO] * total_dim
            for coef, pos in zip(a, positions):
                row[pos] = coef
            ineq.append((tuple(row), b))
        eq = []
        for e, d in self.eq:
            row = [ZERO] * total_dim
            for coef, pos in zip(e, positions):
                row[pos] = coef
            eq.append((tuple(row), d))
        return ConvexPolyhedron(
            total_dim, ineq=ineq, eq=eq, _known_nonempty=self._empty is False
        )

    def slice(self, assignments):
        """Fix coordinates {index: value}; the rest keep their order."""
        fixed = {int(k): rat(v) for k, v in assignments.items()}
        keep = [i for i in range(self.dim) if i not in fixed]
        ineq = []
        for a, b in self.ineq:
            rhs = b
            for idx, val in fixed.items():
                rhs -= a[idx] * val
            ineq.append((tuple(a[i] for i in keep), rhs))
        eq = []
        for e, d in self.eq:
            rhs = d
            for idx, val in fixed.items():
                rhs -= e[idx] * val
            eq.append((tuple(e[i] for i in keep), rhs))
        return ConvexPolyhedron(len(keep), ineq=ineq, eq=eq)

    def recession_cone(self):
        ineq = [(a, ZERO) for a, _ in self.ineq]
        eq = [(e, ZERO) for e, _ in self.eq]
        return ConvexPolyhedron(self.dim, ineq=ineq, eq=eq, _known_nonempty=True)

    def linear_preimage(self, matrix, offset=None):
        """{x : T x + offset in P} for T given as rows over the new space."""
        rows = [tuple(rat(v) for v in r) for r in matrix]
        if len(rows) != self.dim:
            raise PolystatError("matrix must have one row per coordinate of P")
        new_dim = len(rows[0]) if rows else 0
        off = (
            tuple(rat(v) for v in offset)
            if offset is not None
            else (ZERO,) * self.dim
        )
        ineq = []
        for a, b in self.ineq:
            combo = [ZERO] * new_dim
            for coef, row in zip(a, rows):
                for j in range(new_dim):
                    combo[j] += coef * row[j]
            ineq.append((tuple(combo), b - dot(a, off)))
        eq = []
        for e, d in self.eq:
            combo = [ZERO] * new_dim
            for coef, row in zip(e, rows):
                for j in range(new_dim):
                    combo[j] += coef * row[j]
            eq.append((tuple(combo), d - dot(e, off)))
        return ConvexPolyhedron(new_dim, ineq=ineq, eq=eq)

    def linear_image(self, matrix):
        """{T x : x in P} for T given as a list of rows (out_dim x dim)."""
        rows = [tuple(rat(v) for v in r) for r in matrix]
        out_dim = len(rows)
        for r in rows:
            if len(r) != self.dim:
                raise PolystatError("matrix row has wrong length")
        lifted_ineq = [(a + (ZERO,) * out_dim, b) for a, b in self.ineq]
        lifted_eq = [(e + (ZERO,) * out_dim, d) for e, d in self.eq]
        for i, r in enumerate(rows):
            unit = [ZERO] * out_dim
            unit[i] = ONE
            lifted_eq.append((tuple(-c for c in r) + tuple(unit), ZERO))
        lifted = ConvexPolyhedron(
            self.dim + out_dim, ineq=lifted_ineq, eq=lifted_eq
        )
        return lifted.eliminate(range(self.dim))

    # ---------- Fourier-Motzkin elimination ----------

    def eliminate(self, cols):
        """Project out the listed coordinates (exact Fourier-Motzkin).

        Equalities are used as substitution pivots first; genuine
        combination steps prune redundant rows with exact LPs so the row
        count stays under control.
        """
        target = sorted(set(int(c) for c in cols))
        if not target:
            return self
        for c in target:
            if c < 0 or c >= self.dim:
                raise PolystatError("column out of range")
        limits.check_kernel_dim(self.dim, "elimination")
        ineqs = [list(a) + [b] for a, b in self.ineq]
        eqs = [list(e) + [d] for e, d in self.eq]
        remaining = set(target)
        while remaining:
            col = self._pick_column(remaining, ineqs, eqs)
            remaining.discard(col)
            pivot_eq = None
            for row in eqs:
                if row[col] != 0:
                    pivot_eq = row
                    break
            if pivot_eq is not None:
                eqs.remove(pivot_eq)
                for rows in (ineqs, eqs):
                    for row in rows:
                        if row[col] != 0:
                            factor = row[col] / pivot_eq[col]
                            for j in range(len(row)):
                                row[j] -= factor * pivot_eq[j]
                continue
            zero, pos, neg = [], [], []
            for row in ineqs:
                coef = row[col]
                if coef == 0:
                    zero.append(row)
                elif coef > 0:
                    pos.append(row)
                else:
                    neg.append(row)
            if len(pos) * len(neg) > limits.MAX_FM_INTERMEDIATE:
                raise limits.ResourceLimitError(
                    "Fourier-Motzkin would combine %d rows"
                    % (len(pos) * len(neg))
                )
            combined = fm_combine(pos, neg, col)
            ineqs = zero + combined
            ineqs = _dedup_ineq_rows(ineqs)
            if len(ineqs) > self.dim + 1:
                ineqs = _lp_prune_rows(self.dim, ineqs, eqs)
            limits.check_rows(len(ineqs), "Fourier-Motzkin")
        keep = [i for i in range(self.dim) if i not in set(target)]
        new_ineq = [
            (tuple(row[i] for i in keep), row[-1]) for row in ineqs
        ]
        new_eq = [(tuple(row[i] for i in keep), row[-1]) for row in eqs]
        return ConvexPolyhedron(len(keep), ineq=new_ineq, eq=new_eq)

    @staticmethod
    def _pick_column(remaining, ineqs, eqs):
        """Greedy column order: substitutions first, then least fill-in."""
        for col in sorted(remaining):
            if any(row[col] != 0 for row in eqs):
                return col
        best, best_score = None, None
        for col in sorted(remaining):
            pos = sum(1 for row in ineqs if row[col] > 0)
            neg = sum(1 for row in ineqs if row[col] < 0)
            score = pos * neg - (pos + neg)
            if best_score is None or score < best_score:
                best, best_score = col, score
        return best

    def project_onto(self, coords):
        """Project onto the listed coordinates (kept in the given order,
        which must be increasing)."""
        coords = list(coords)
        if coords != sorted(coords):
            raise PolystatError("projection coordinates must be increasing")
        drop = [i for i in range(self.dim) if i not in set(coords)]
        return self.eliminate(drop)

    def pruned(self):
        """Equivalent polyhedron with LP-redundant inequality rows removed."""
        ineqs = [list(a) + [b] for a, b in self.ineq]
        eqs = [list(e) + [d] for e, d in self.eq]
        pruned = _lp_prune_rows(self.dim, ineqs, eqs)
        return ConvexPolyhedron(
            self.dim,
            ineq=[(tuple(r[:-1]), r[-1]) for r in pruned],
            eq=self.eq,
            _known_nonempty=self._empty is False,
        )

    # ---------- relative interior ----------

    def relint_point(self):
        """An exact point in the relative interior, or None when empty.

        Implicit equalities among the inequality rows are detected with LPs
        and moved to the equality block, then a max-min-slack program picks
        a point with positive slack on every genuine inequality.
        """
        if self.is_empty():
            return None
        ineqs = list(self.ineq)
        eqs = list(self.eq)
        while True:
            point, min_slack = _max_min_slack(self.dim, ineqs, eqs)
            if min_slack is None:
                return None
            if min_slack > 0 or not ineqs:
                return point
            still = []
            for a, b in ineqs:
                res = solve_lp(
                    self.dim,
                    a,
                    [r for r, _ in ineqs],
                    [v for _, v in ineqs],
                    [r for r, _ in eqs],
                    [v for _, v in eqs],
                    maximize=False,
                )
                if res.optimal and res.value == b:
                    eqs.append((a, b))
                else:
                    still.append((a, b))
            if len(still) == len(ineqs):
                return point
            ineqs = still

    # ---------- serialization ----------

    def to_json(self):
        return {
            "dim": self.dim,
            "A": [[rat_str(x) for x in a] for a, _ in self.ineq],
            "b": [rat_str(b) for _, b in self.ineq],
            "E": [[rat_str(x) for x in e] for e, _ in self.eq],
            "d": [rat_str(d) for _, d in self.eq],
        }

    @classmethod
    def from_json(cls, data):
        expected = {"dim", "A", "b", "E", "d"}
        unknown = set(data) - expected
        if unknown:
            raise PolystatError("unknown polyhedron fields: %s" % sorted(unknown))
        dim = int(data["dim"])
        a_rows = data.get("A", [])
        b_vals = data.get("b", [])
        e_rows = data.get("E", [])
        d_vals = data.get("d", [])
        if len(a_rows) != len(b_vals) or len(e_rows) != len(d_vals):
            raise PolystatError("row/right-hand-side count mismatch")
        ineq = [(tuple(rat(x) for x in row), rat(b)) for row, b in zip(a_rows, b_vals)]
        eq = [(tuple(rat(x) for x in row), rat(d)) for row, d in zip(e_rows, d_vals)]
        return cls(dim, ineq=ineq, eq=eq)

    def __repr__(self):
        return "ConvexPolyhedron(dim=%d, %d ineq, %d eq)" % (
            self.dim,
            len(self.ineq),
            len(self.eq),
        )


def _dedup_ineq_rows(rows):
    seen = {}
    out = []
    for row in rows:
        full = primitive(tuple(row))
        body = full[:-1]
        if all(x == 0 for x in body):
            if full[-1] < 0:
                return [list(full)]
            continue
        if full not in seen:
            seen[full] = None
            out.append(list(full))
    return out


def _lp_prune_rows(dim, ineqs, eqs):
    """Remove inequality rows implied by the rest (exact LP per row)."""
    kept = list(ineqs)
    i = 0
    while i < len(kept):
        candidate = kept[i]
        others = kept[:i] + kept[i + 1 :]
        res = solve_lp(
            dim,
            candidate[:-1],
            [r[:-1] for r in others],
            [r[-1] for r in others],
            [r[:-1] for r in eqs],
            [r[-1] for r in eqs],
            maximize=True,
        )
        if res.optimal and res.value <= candidate[-1]:
            kept.pop(i)
        else:
            i += 1
    return kept


def _max_min_slack(dim, ineqs, eqs):
    """Maximize the smallest inequality slack (capped at 1).

    Returns (point, optimal_slack); (None, None) when infeasible. With no
    inequality rows, returns any feasible point with slack 1.
    """
    a_ub = []
    b_ub = []
    for a, b in ineqs:
        a_ub.append(tuple(a) + (ONE,))
        b_ub.append(b)
    # 0 <= t <= 1
    a_ub.append((ZERO,) * dim + (ONE,))
    b_ub.append(ONE)
    a_ub.append((ZERO,) * dim + (-ONE,))
    b_ub.append(ZERO)
    a_eq = [tuple(e) + (ZERO,) for e, _ in eqs]
    b_eq = [d for _, d in eqs]
    objective = (ZERO,) * dim + (ONE,)
    res = solve_lp(dim + 1, objective, a_ub, b_ub, a_eq, b_eq, maximize=True)
    if not res.optimal:
        return None, None
    return res.x[:dim], res.value


class EmptySetType:
    """Distinguished value for operations whose result is the empty set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def is_empty(self):
        return True

    def contains(self, point):
        return False

    def to_json(self):
        return {"empty": True}

    def __repr__(self):
        return "EmptySet"

    def __bool__(self):
        return False


EMPTY = EmptySetType()


class PolyUnion:
    """A finite union of nonempty convex polyhedra of common dimension."""

    __slots__ = ("dim", "pieces")

    def __init__(self, dim, pieces, _known_nonempty=False):
        self.dim = int(dim)
        kept = []
        for piece in pieces:
            if piece.dim != self.dim:
                raise PolystatError("piece dimension mismatch")
            if _known_nonempty or not piece.is_empty():
                kept.append(piece)
        if not kept:
            raise PreconditionError(
                "a union must have at least one nonempty piece; "
                "use PolyUnion.maybe for possibly-empty results"
            )
        limits.check_pieces(len(kept), "union")
        self.pieces = tuple(kept)

    @classmethod
    def maybe(cls, dim, pieces):
        """Like the constructor, but returns EMPTY when nothing survives."""
        kept = [p for p in pieces if not p.is_empty()]
        if not kept:
            return EMPTY
        return cls(dim, kept, _known_nonempty=True)

    @classmethod
    def single(cls, piece):
        return cls(piece.dim, (piece,))

    def is_empty(self):
        return False

    def contains(self, point):
        return any(p.contains(point) for p in self.pieces)

    def is_cone(self):
        return all(p.is_cone() for p in self.pieces)

    def feasible_point(self):
        return self.pieces[0].feasible_point()

    def translate(self, t):
        return PolyUnion(
            self.dim, [p.translate(t) for p in self.pieces], _known_nonempty=True
        )

    def negate(self):
        return PolyUnion(
            self.dim, [p.negate() for p in self.pieces], _known_nonempty=True
        )

    def embed(self, total_dim, positions):
        return PolyUnion(
            total_dim,
            [p.embed(total_dim, positions) for p in self.pieces],
            _known_nonempty=True,
        )

    def product(self, other):
        pieces = [p.product(q) for p in self.pieces for q in other.pieces]
        return PolyUnion(self.dim + other.dim, pieces, _known_nonempty=True)

    def intersect(self, other):
        """Pairwise intersection; EMPTY when no pair meets."""
        if self.dim != other.dim:
            raise PolystatError("dimension mismatch")
        pieces = [p.intersect(q) for p in self.pieces for q in other.pieces]
        return PolyUnion.maybe(self.dim, pieces)

    def slice(self, assignments):
        pieces = [p.slice(assignments) for p in self.pieces]
        dim = pieces[0].dim if pieces else 0
        return PolyUnion.maybe(dim, pieces)

    def eliminate(self, cols):
        pieces = [p.eliminate(cols) for p in self.pieces]
        dim = pieces[0].dim
        return PolyUnion.maybe(dim, pieces)

    def linear_image(self, matrix):
        pieces = [p.linear_image(matrix) for p in self.pieces]
        dim = len(list(matrix))
        return PolyUnion.maybe(dim, pieces)

    def linear_preimage(self, matrix, offset=None):
        pieces = [p.linear_preimage(matrix, offset) for p in self.pieces]
        dim = pieces[0].dim
        return PolyUnion.maybe(dim, pieces)

    def pruned(self):
        """Drop pieces contained in other pieces, dedup syntactically."""
        pieces = list(self.pieces)
        out = []
        for i, p in enumerate(pieces):
            absorbed = False
            for j, q in enumerate(pieces):
                if i == j:
                    continue
                if (j < i or not _rows_equal(p, q)) and p.subset_of(q):
                    if j < i or not q.subset_of(p):
                        absorbed = True
                        break
            if not absorbed:
                out.append(p)
        return type(self)(self.dim, out, _known_nonempty=True)

    def to_json(self):
        return {"dim": self.dim, "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, data):
        expected = {"dim", "pieces"}
        unknown = set(data) - expected
        if unknown:
            raise PolystatError("unknown union fields: %s" % sorted(unknown))
        dim = int(data["dim"])
        pieces = [ConvexPolyhedron.from_json(p) for p in data["pieces"]]
        return cls(dim, pieces)

    def __repr__(self):
        return "PolyUnion(dim=%d, pieces=%d)" % (self.dim, len(self.pieces))


def _rows_equal(p, q):
    return set(p.ineq) == set(q.ineq) and set(p.eq) == set(q.eq)


def cone_is_trivial(piece):
    """Is the polyhedral cone {x : rows} equal to {0}?

    Decided by maximizing each +/- coordinate over the cone intersected
    with the unit box (which is bounded, so every LP is bounded).
    """
    if not piece.is_cone():
        raise PreconditionError("triviality test expects a cone")
    if piece.is_empty():  # cannot happen for a cone (0 is always in it)
        return True
    box = ConvexPolyhedron.from_box([(-ONE, ONE)] * piece.dim)
    clipped = piece.intersect(box)
    for i in range(piece.dim):
        c = [ZERO] * piece.dim
        c[i] = ONE
        hi = clipped.lp(c, maximize=True)
        if hi.value > 0:
            return False
        lo = clipped.lp(c, maximize=False)
        if lo.value < 0:
            return False
    return True


def union_is_origin(union):
    """Is a union of cones exactly {0}?"""
    if union is EMPTY:
        return False
    return all(cone_is_trivial(p) for p in union.pieces)
