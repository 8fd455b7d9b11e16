"""Exception types raised across the library."""


class PencilPowError(Exception):
    """Base class for all structured errors raised by pencilpow."""


class ShapeError(PencilPowError):
    """Input dimensions violate an operation's preconditions."""


class PrecisionMismatchError(PencilPowError):
    """Operands carry different element precisions (complex64 vs complex128)."""


class DomainError(PencilPowError):
    """A scalar argument or matrix structure is outside the valid domain."""


class NumericallySingularError(PencilPowError):
    """A matrix required to be invertible is numerically singular.

    Carries ``sigma_min``, the smallest-singular-value estimate that
    triggered the error.
    """

    def __init__(self, message, sigma_min):
        super().__init__(f"{message} (sigma_min estimate {sigma_min:.3e})")
        self.sigma_min = float(sigma_min)


class NearSingularNodeError(NumericallySingularError):
    """A quadrature node sits too close to a pencil eigenvalue.

    Carries ``phi``, the offending angle on the unit circle.
    """

    def __init__(self, message, sigma_min, phi):
        super().__init__(f"{message} at phi={phi:.6f}", sigma_min)
        self.phi = float(phi)


class NonUnitaryError(PencilPowError):
    """An input required to be unitary fails the orthogonality tolerance.

    Carries ``defect``, the measured ``||Q^H Q - I||_2``.
    """

    def __init__(self, message, defect):
        super().__init__(f"{message} (||Q^H Q - I||_2 = {defect:.3e})")
        self.defect = float(defect)


class ConvergenceError(PencilPowError):
    """An iterative kernel failed to converge within its iteration cap."""


class RankDeficientStackWarning(UserWarning):
    """The stacked block factored during implicit squaring looks rank deficient."""
