"""Double description: generators of polyhedra and polars of cones.

Cones {x : Ax <= 0, Ex = 0} are converted to (rays, lines) generator pairs
by an incremental double description sweep with explicit lineality
handling; general polyhedra are homogenized first. Adjacency of rays is
decided combinatorially from tight-row sets, which is exact because rays
are kept reduced modulo the lineality space (the quotient cone stays
pointed throughout).
"""

from .. import limits
from ..exceptions import PolystatError, PreconditionError, ResourceLimitError
from ..kernels import row_reduce
from ..rational import ONE, ZERO, dot, primitive
from .polyhedron import ConvexPolyhedron


def _identity_basis(dim):
    basis = []
    for i in range(dim):
        row = [ZERO] * dim
        row[i] = ONE
        basis.append(tuple(row))
    return basis


def _rref_lines(lines, dim):
    """Reduce the line set to primitive RREF rows; returns (lines, pivots)."""
    if not lines:
        return [], []
    work = [list(l) for l in lines]
    rank, pivots = row_reduce(work, dim)
    out = [primitive(tuple(work[i])) for i in range(rank)]
    return out, pivots


def _reduce_mod_lines(vec, lines, pivots):
    v = list(vec)
    for line, piv in zip(lines, pivots):
        coef = v[piv]
        if coef != 0:
            # line[piv] is the RREF pivot; rescale so subtraction clears it.
            factor = coef / line[piv]
            for j in range(len(v)):
                v[j] -= factor * line[j]
    return primitive(tuple(v))


def dd_cone(dim, ineq_rows, eq_rows):
    """Generators (rays, lines) of {x : ineq_rows . x <= 0, eq_rows . x = 0}."""
    limits.check_kernel_dim(dim, "double description")
    lines = _identity_basis(dim)
    pivots = list(range(dim))
    rays = []
    masks = []
    processed = []

    ordered = [(tuple(e), True) for e in eq_rows] + [
        (tuple(a), False) for a in ineq_rows
    ]
    for a, is_eq in ordered:
        if len(a) != dim:
            raise PolystatError("row has wrong length")
        if all(x == 0 for x in a):
            continue
        star = -1
        for idx, line in enumerate(lines):
            if dot(a, line) != 0:
                star = idx
                break
        if star >= 0:
            l_star = lines.pop(star)
            al_star = dot(a, l_star)
            lines = [
                primitive(
                    tuple(
                        lj - (dot(a, line) / al_star) * lsj
                        for lj, lsj in zip(line, l_star)
                    )
                )
                for line in lines
            ]
            rays = [
                primitive(
                    tuple(
                        rj - (dot(a, ray) / al_star) * lsj
                        for rj, lsj in zip(ray, l_star)
                    )
                )
                for ray in rays
            ]
            if not is_eq:
                new_ray = (
                    tuple(-x for x in l_star) if al_star > 0 else tuple(l_star)
                )
                rays.append(primitive(new_ray))
            lines, pivots = _rref_lines(lines, dim)
        else:
            values = [dot(a, r) for r in rays]
            kept = []
            combos = []
            pos = [i for i, v in enumerate(values) if v > 0]
            neg = [i for i, v in enumerate(values) if v < 0]
            if is_eq:
                kept = [rays[i] for i, v in enumerate(values) if v == 0]
            else:
                kept = [rays[i] for i, v in enumerate(values) if v <= 0]
            for ip in pos:
                for im in neg:
                    meet = masks[ip] & masks[im]
                    adjacent = True
                    for k, mk in enumerate(masks):
                        if k == ip or k == im:
                            continue
                        if meet & ~mk == 0:
                            adjacent = False
                            break
                    if not adjacent:
                        continue
                    vp, vm = values[ip], values[im]
                    rp, rm = rays[ip], rays[im]
                    combo = tuple(
                        vp * xm - vm * xp for xp, xm in zip(rp, rm)
                    )
                    combos.append(primitive(combo))
            rays = kept + combos
        processed.append(tuple(a))
        # Canonicalize: reduce modulo lineality, drop zeros, dedup.
        cleaned = []
        seen = set()
        for r in rays:
            rr = _reduce_mod_lines(r, lines, pivots)
            if all(x == 0 for x in rr):
                continue
            if rr not in seen:
                seen.add(rr)
                cleaned.append(rr)
        rays = cleaned
        if len(rays) > limits.MAX_DDM_RAYS:
            raise ResourceLimitError(
                "double description exceeded %d rays" % limits.MAX_DDM_RAYS
            )
        masks = []
        for r in rays:
            m = 0
            for bit, row in enumerate(processed):
                if dot(row, r) == 0:
                    m |= 1 << bit
            masks.append(m)
    return rays, lines


def cone_generators(cone):
    """Generators of a polyhedral cone given in H-representation."""
    if not cone.is_cone():
        raise PreconditionError("cone_generators expects homogeneous rows")
    return dd_cone(
        cone.dim, [a for a, _ in cone.ineq], [e for e, _ in cone.eq]
    )


def polar_cone_hrep(cone):
    """H-representation of the polar {y : y.x <= 0 for all x in the cone}."""
    rays, lines = cone_generators(cone)
    return ConvexPolyhedron(
        cone.dim,
        ineq=[(r, ZERO) for r in rays],
        eq=[(l, ZERO) for l in lines],
        _known_nonempty=True,
    )


def cone_from_generators(dim, rays=(), lines=()):
    """H-representation of cone(rays) + span(lines), via double polarity."""
    polar = ConvexPolyhedron(
        dim,
        ineq=[(tuple(r), ZERO) for r in rays],
        eq=[(tuple(l), ZERO) for l in lines],
        _known_nonempty=True,
    )
    return polar_cone_hrep(polar)


def generators(poly):
    """V-representation (points, rays, lines) with
    poly = conv(points) + cone(rays) + span(lines).

    Works for any nonempty polyhedron via homogenization; for a polytope
    the points are exactly its vertices.
    """
    if poly.is_empty():
        return [], [], []
    dim = poly.dim
    h_ineq = [tuple(a) + (-b,) for a, b in poly.ineq]
    h_ineq.append((ZERO,) * dim + (-ONE,))  # t >= 0
    h_eq = [tuple(e) + (-d,) for e, d in poly.eq]
    rays_h, lines_h = dd_cone(dim + 1, h_ineq, h_eq)
    points = []
    rays = []
    lines = []
    for l in lines_h:
        if l[dim] != 0:
            raise PolystatError("homogenization produced a line with t != 0")
        lines.append(primitive(l[:dim]))
    for r in rays_h:
        t = r[dim]
        if t > 0:
            points.append(tuple(x / t for x in r[:dim]))
        elif t == 0:
            rays.append(primitive(r[:dim]))
        else:
            raise PolystatError("homogenization produced a ray with t < 0")
    return points, rays, lines


def vrep_to_hrep(dim, points=(), rays=(), lines=()):
    """H-representation of conv(points) + cone(rays) + span(lines).

    Small-scale oracle used to cross-check the double description method:
    the hull is written as a lifted system in the combination weights,
    which are then eliminated.
    """
    points = [tuple(p) for p in points]
    rays = [tuple(r) for r in rays]
    lines = [tuple(l) for l in lines]
    if not points and not rays and not lines:
        raise PreconditionError("nothing to take the hull of")
    n_p, n_r, n_l = len(points), len(rays), len(lines)
    total = dim + n_p + n_r + n_l
    ineq = []
    eq = []
    # x_i = sum lambda_j p_j[i] + sum mu_k r_k[i] + sum nu_t l_t[i]
    for i in range(dim):
        row = [ZERO] * total
        row[i] = ONE
        for j, p in enumerate(points):
            row[dim + j] = -p[i]
        for k, r in enumerate(rays):
            row[dim + n_p + k] = -r[i]
        for t, l in enumerate(lines):
            row[dim + n_p + n_r + t] = -l[i]
        eq.append((tuple(row), ZERO))
    if points:
        row = [ZERO] * total
        for j in range(n_p):
            row[dim + j] = ONE
        eq.append((tuple(row), ONE))
        for j in range(n_p):
            row = [ZERO] * total
            row[dim + j] = -ONE
            ineq.append((tuple(row), ZERO))
    for k in range(n_r):
        row = [ZERO] * total
        row[dim + n_p + k] = -ONE
        ineq.append((tuple(row), ZERO))
    lifted = ConvexPolyhedron(total, ineq=ineq, eq=eq, _known_nonempty=True)
    return lifted.eliminate(range(dim, total))
