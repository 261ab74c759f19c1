"""Pure-Python kernel loops.

These are the behavioral twins of polystat._speedups. Both operate on lists
of exact rational objects (gmpy2.mpq or fractions.Fraction); the compiled
version only strips interpreter overhead from the loops. Any change here
must be mirrored in _speedups.pyx.
"""


def pivot(rows, pr, pc):
    """In-place Gauss-Jordan pivot of a dense tableau at (pr, pc).

    ``rows`` is a list of equal-length lists. The pivot row is scaled so the
    pivot entry becomes 1, then the pivot column is eliminated from every
    other row.
    """
    prow = rows[pr]
    piv = prow[pc]
    if piv == 0:
        raise ZeroDivisionError("zero pivot")
    ncols = len(prow)
    if piv != 1:
        inv = 1 / piv
        for j in range(ncols):
            prow[j] = prow[j] * inv
    for i in range(len(rows)):
        if i == pr:
            continue
        row = rows[i]
        factor = row[pc]
        if factor == 0:
            continue
        for j in range(ncols):
            row[j] = row[j] - factor * prow[j]
    return rows


def fm_combine(pos_rows, neg_rows, col):
    """Fourier-Motzkin pairing step.

    Every ``pos`` row has a positive coefficient at ``col`` and every ``neg``
    row a negative one; each pair is combined with the unique positive
    weights that cancel the column. Rows include the right-hand side as
    their last entry, so the combination applies to it too.
    """
    out = []
    for p in pos_rows:
        pc = p[col]
        for q in neg_rows:
            qc = q[col]
            out.append([pc * qj - qc * pj for pj, qj in zip(p, q)])
    return out


def row_reduce(rows, ncols):
    """In-place reduced row echelon form over the first ``ncols`` columns.

    Returns (rank, pivot_columns). Entries past ``ncols`` (e.g. a right-hand
    side) are carried along in the eliminations.
    """
    rank = 0
    pivots = []
    nrows = len(rows)
    width = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot_row = -1
        for i in range(rank, nrows):
            if rows[i][col] != 0:
                pivot_row = i
                break
        if pivot_row < 0:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        prow = rows[rank]
        piv = prow[col]
        if piv != 1:
            inv = 1 / piv
            for j in range(width):
                prow[j] = prow[j] * inv
        for i in range(nrows):
            if i == rank:
                continue
            row = rows[i]
            factor = row[col]
            if factor == 0:
                continue
            for j in range(width):
                row[j] = row[j] - factor * prow[j]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots
