"""Exception hierarchy shared by every module of the package."""


class DynFramesError(Exception):
    """Base class for all package errors."""


class ValidationError(DynFramesError, ValueError):
    """Input violates a documented precondition."""


class NumericalError(DynFramesError, ArithmeticError):
    """A numerical certificate or tolerance could not be met."""


class NonHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class Unstable(ValidationError):
    """Spectral radius is too close to (or above) one for the requested solve."""


class Borderline(ValidationError):
    """Spectral radius sits inside the band where no finite-dimensional verdict is given."""


class Singular(ValidationError):
    pass


class NotAFrame(ValidationError):
    pass


class NotContraction(ValidationError):
    pass


class NotAdmissible(ValidationError):
    pass


class NotInDisc(ValidationError):
    pass


class Overflow(ValidationError):
    """Shifting a vector whose top-degree coefficient is nonzero."""


class DegreeOverflow(ValidationError):
    pass


class CutoffTooSmall(ValidationError):
    pass


class Degenerate(ValidationError):
    pass


class NotInvariant(ValidationError):
    pass


class TailNotCertified(NumericalError):
    pass


class CertificateFailed(NumericalError):
    pass


class VerdictMismatch(NumericalError):
    pass
