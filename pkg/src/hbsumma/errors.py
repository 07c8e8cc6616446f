"""Exception hierarchy shared by all hbsumma modules."""


class HbsummaError(Exception):
    """Base class for every error raised by hbsumma."""


class ValidationError(HbsummaError, ValueError):
    """Input outside the domain of an operation (CLI exit code 1)."""


class CertificationError(HbsummaError, ArithmeticError):
    """A truncation, quadrature or factorization could not be certified (CLI exit code 2)."""


class QuadratureError(CertificationError):
    pass
