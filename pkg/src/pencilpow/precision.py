"""Element-precision plumbing shared by every kernel.

Matrices are plain ``numpy.ndarray`` objects; precision rides on the dtype.
``binary32`` maps to ``complex64`` and ``binary64`` to ``complex128``, with
unit roundoffs ``2**-24`` and ``2**-53``.
"""

import numpy as np

from .errors import DomainError, PrecisionMismatchError, ShapeError

#: dtype for each named precision.
PRECISION_DTYPES = {
    "binary32": np.complex64,
    "binary64": np.complex128,
}

#: unit roundoff keyed by complex dtype.
UNIT_ROUNDOFF = {
    np.dtype(np.complex64): 2.0 ** -24,
    np.dtype(np.complex128): 2.0 ** -53,
}

_REAL_TO_COMPLEX = {
    np.dtype(np.float32): np.complex64,
    np.dtype(np.float64): np.complex128,
}


def dtype_for(precision):
    """Return the complex dtype for a precision name."""
    try:
        return PRECISION_DTYPES[precision]
    except KeyError:
        raise DomainError(
            f"unknown precision {precision!r}; expected 'binary32' or 'binary64'"
        ) from None


def precision_name(a):
    """Return 'binary32' or 'binary64' for a matrix or dtype."""
    dt = np.dtype(getattr(a, "dtype", a))
    for name, cdt in PRECISION_DTYPES.items():
        if np.dtype(cdt) == dt:
            return name
    raise DomainError(f"unsupported dtype {dt}")


def unit_roundoff(a):
    """Unit roundoff of a matrix, dtype, or precision name."""
    if isinstance(a, str):
        return UNIT_ROUNDOFF[np.dtype(dtype_for(a))]
    return UNIT_ROUNDOFF[np.dtype(getattr(a, "dtype", a))]


def as_matrix(a, name="matrix"):
    """Validate and return ``a`` as a 2-D finite complex array.

    Real float32/float64 input is widened to the matching complex dtype;
    anything else must already be complex64/complex128. Non-finite entries
    are rejected, honoring the construction invariant of the carrier type.
    """
    a = np.asarray(a)
    if a.dtype in _REAL_TO_COMPLEX:
        a = a.astype(_REAL_TO_COMPLEX[a.dtype])
    elif a.dtype not in UNIT_ROUNDOFF:
        # integer / object / float16 inputs: promote through float64
        a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains non-finite entries")
    return a


def same_precision(a, b, op):
    """Raise unless two matrices share a dtype."""
    if a.dtype != b.dtype:
        raise PrecisionMismatchError(
            f"{op}: mixed precisions {precision_name(a)} and {precision_name(b)}"
        )


def square_matrix(a, name="matrix"):
    """Validate a square matrix."""
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a
