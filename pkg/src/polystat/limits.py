"""Desk-scale resource limits.

The exact algorithms here (Fourier-Motzkin, double description, sign-vector
stratification) all have exponential worst cases. These caps bound the
work the expensive kernels will attempt before raising ResourceLimitError;
plain data construction (products, embeddings) is not capped.
"""

from .exceptions import ResourceLimitError

#: Largest ambient dimension accepted by the elimination / double-description
#: / stratification kernels.
MAX_KERNEL_DIM = 16

#: Largest number of pieces a union may carry.
MAX_PIECES = 64

#: Largest number of inequality rows allowed to survive one elimination step.
MAX_FM_ROWS = 512

#: Hard cap on intermediate rows produced while combining positive and
#: negative rows during one Fourier-Motzkin step.
MAX_FM_INTERMEDIATE = 8192

#: Node budget for the sign-vector search that enumerates strata.
MAX_STRATA_NODES = 100_000

#: Generator budget for the double description method.
MAX_DDM_RAYS = 4096


def check_kernel_dim(dim, what):
    if dim > MAX_KERNEL_DIM:
        raise ResourceLimitError(
            "%s needs ambient dimension %d, above the desk-scale cap %d"
            % (what, dim, MAX_KERNEL_DIM)
        )


def check_pieces(count, what):
    if count > MAX_PIECES:
        raise ResourceLimitError(
            "%s would carry %d pieces, above the cap %d"
            % (what, count, MAX_PIECES)
        )


def check_rows(count, what):
    if count > MAX_FM_ROWS:
        raise ResourceLimitError(
            "%s accumulated %d rows, above the cap %d" % (what, count, MAX_FM_ROWS)
        )
