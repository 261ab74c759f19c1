# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
"""Compiled kernel loops.

Behavioral twin of polystat.kernels.pure; the arithmetic still happens on
exact rational Python objects, only the loop overhead is compiled away.
"""


def pivot(list rows, Py_ssize_t pr, Py_ssize_t pc):
    cdef list prow = <list>rows[pr]
    cdef Py_ssize_t ncols = len(prow)
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j
    cdef list row
    piv = prow[pc]
    if piv == 0:
        raise ZeroDivisionError("zero pivot")
    if piv != 1:
        inv = 1 / piv
        for j in range(ncols):
            prow[j] = prow[j] * inv
    for i in range(nrows):
        if i == pr:
            continue
        row = <list>rows[i]
        factor = row[pc]
        if factor == 0:
            continue
        for j in range(ncols):
            row[j] = row[j] - factor * prow[j]
    return rows


def fm_combine(list pos_rows, list neg_rows, Py_ssize_t col):
    cdef list out = []
    cdef list p, q, combined
    cdef Py_ssize_t i, k, n, width
    n = len(neg_rows)
    for p in pos_rows:
        pc = p[col]
        width = len(p)
        for i in range(n):
            q = <list>neg_rows[i]
            qc = q[col]
            combined = [None] * width
            for k in range(width):
                combined[k] = pc * q[k] - qc * p[k]
            out.append(combined)
    return out


def row_reduce(list rows, Py_ssize_t ncols):
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t width = 0
    cdef Py_ssize_t col, i, j, pivot_row
    cdef list pivots = []
    cdef list prow, row
    if nrows > 0:
        width = len(<list>rows[0])
    for col in range(ncols):
        pivot_row = -1
        for i in range(rank, nrows):
            if (<list>rows[i])[col] != 0:
                pivot_row = i
                break
        if pivot_row < 0:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        prow = <list>rows[rank]
        piv = prow[col]
        if piv != 1:
            inv = 1 / piv
            for j in range(width):
                prow[j] = prow[j] * inv
        for i in range(nrows):
            if i == rank:
                continue
            row = <list>rows[i]
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
