"""Exact linear programming over the rationals.

Two-phase dense simplex with Bland's rule (no cycling), free variables
split as differences of nonnegatives. Everything is exact: the statuses
"optimal" / "infeasible" / "unbounded" are decided, not estimated, and
optimal witnesses satisfy the constraints by substitution.
"""

from ..exceptions import PolystatError
from ..kernels import pivot
from ..rational import ONE, ZERO, dot, rat


class LPResult:
    """Outcome of one linear program."""

    __slots__ = ("status", "value", "x")

    def __init__(self, status, value=None, x=None):
        self.status = status
        self.value = value
        self.x = x

    @property
    def optimal(self):
        return self.status == "optimal"

    def __repr__(self):
        return "LPResult(status=%r, value=%r, x=%r)" % (
            self.status,
            self.value,
            self.x,
        )


def _build_tableau(n, a_ub, b_ub, a_eq, b_eq):
    """Standard-form tableau: columns are u (n), v (n), slacks, artificials, rhs."""
    k = len(a_ub)
    struct = 2 * n + k
    raw = []
    for i in range(k):
        a = [rat(x) for x in a_ub[i]]
        if len(a) != n:
            raise PolystatError("inequality row has wrong length")
        b = rat(b_ub[i])
        row = a + [-x for x in a] + [ZERO] * k + [b]
        row[2 * n + i] = ONE
        if b < 0:
            row = [-x for x in row]
        raw.append(row)
    for j in range(len(a_eq)):
        e = [rat(x) for x in a_eq[j]]
        if len(e) != n:
            raise PolystatError("equality row has wrong length")
        d = rat(b_eq[j])
        row = e + [-x for x in e] + [ZERO] * k + [d]
        if d < 0:
            row = [-x for x in row]
        raw.append(row)

    basis = []
    needs_art = []
    for idx, row in enumerate(raw):
        if idx < k and row[2 * n + idx] == ONE:
            basis.append(2 * n + idx)
            needs_art.append(False)
        else:
            basis.append(-1)
            needs_art.append(True)
    n_art = sum(needs_art)

    rows = []
    art_cols = []
    ai = 0
    for idx, row in enumerate(raw):
        rhs = row[-1]
        body = row[:-1] + [ZERO] * n_art
        if needs_art[idx]:
            col = struct + ai
            body[col] = ONE
            basis[idx] = col
            art_cols.append(col)
            ai += 1
        body.append(rhs)
        rows.append(body)
    return rows, basis, art_cols, struct


def _bland(rows, basis, cost, banned):
    """Simplex iterations with Bland's rule; mutates rows/cost/basis."""
    width = len(cost)
    while True:
        enter = -1
        for j in range(width - 1):
            if j in banned:
                continue
            if cost[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(rows):
            aij = row[enter]
            if aij > 0:
                ratio = row[-1] / aij
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        pivot(rows + [cost], leave, enter)
        basis[leave] = enter


def solve_lp(n, c=None, a_ub=(), b_ub=(), a_eq=(), b_eq=(), maximize=False):
    """Solve min (or max) c.x subject to a_ub x <= b_ub and a_eq x = b_eq.

    Variables are free. With c=None only feasibility is decided and the
    result carries a feasible witness. Returns an LPResult.
    """
    if len(a_ub) != len(b_ub) or len(a_eq) != len(b_eq):
        raise PolystatError("constraint rows and right-hand sides differ in length")
    rows, basis, art_cols, struct = _build_tableau(n, a_ub, b_ub, a_eq, b_eq)
    width = struct + len(art_cols) + 1

    # Phase 1: minimize the sum of artificials.
    if art_cols:
        cost = [ZERO] * width
        for col in art_cols:
            cost[col] = ONE
        for i, row in enumerate(rows):
            factor = cost[basis[i]]
            if factor != 0:
                for j in range(width):
                    cost[j] = cost[j] - factor * row[j]
        status = _bland(rows, basis, cost, banned=frozenset())
        if status != "optimal":  # phase 1 is always bounded below by 0
            raise PolystatError("phase 1 reported %s" % status)
        art_set = set(art_cols)
        total_art = ZERO
        for i, row in enumerate(rows):
            if basis[i] in art_set:
                total_art += row[-1]
        if total_art != 0:
            return LPResult("infeasible")
        # Drive remaining (zero-valued) artificials out of the basis.
        for i in range(len(rows) - 1, -1, -1):
            if basis[i] not in art_set:
                continue
            row = rows[i]
            piv_col = -1
            for j in range(struct):
                if row[j] != 0:
                    piv_col = j
                    break
            if piv_col >= 0:
                pivot(rows + [cost], i, piv_col)
                basis[i] = piv_col
            else:
                rows.pop(i)
                basis.pop(i)

    if c is None:
        x = _extract(n, rows, basis)
        return LPResult("optimal", ZERO, x)

    obj = [rat(v) for v in c]
    if len(obj) != n:
        raise PolystatError("objective has wrong length")
    if maximize:
        obj = [-v for v in obj]

    cost = [ZERO] * width
    for j in range(n):
        cost[j] = obj[j]
        cost[n + j] = -obj[j]
    for i, row in enumerate(rows):
        factor = cost[basis[i]]
        if factor != 0:
            for j in range(width):
                cost[j] = cost[j] - factor * row[j]
    status = _bland(rows, basis, cost, banned=frozenset(art_cols))
    if status == "unbounded":
        return LPResult("unbounded")
    x = _extract(n, rows, basis)
    value = dot(obj, x)
    if maximize:
        value = -value
    return LPResult("optimal", value, x)


def _extract(n, rows, basis):
    values = {}
    for i, row in enumerate(rows):
        values[basis[i]] = row[-1]
    x = []
    for j in range(n):
        u = values.get(j, ZERO)
        v = values.get(n + j, ZERO)
        x.append(u - v)
    return tuple(x)


def lp_feasible(n, a_ub=(), b_ub=(), a_eq=(), b_eq=()):
    """Feasibility check; returns a witness tuple or None."""
    res = solve_lp(n, None, a_ub, b_ub, a_eq, b_eq)
    return res.x if res.optimal else None


def lp_extreme(n, c, a_ub=(), b_ub=(), a_eq=(), b_eq=(), maximize=True):
    """Optimize and return (status, value, witness)."""
    res = solve_lp(n, c, a_ub, b_ub, a_eq, b_eq, maximize=maximize)
    return res.status, res.value, res.x
