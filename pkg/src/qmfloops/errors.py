"""Exception hierarchy shared by all modules."""


class QMFError(Exception):
    """Base class for every error raised by this package."""


class ZeroDeterminant(QMFError, ValueError):
    """The lattice basis is singular."""


class DimMismatch(QMFError, ValueError):
    """Operands live in different ambient dimensions."""


class SizeMismatch(QMFError, ValueError):
    """Matrix operands have incompatible sizes."""


class UnknownLabel(QMFError, KeyError):
    """A coset or dual coset label does not belong to the system."""


class DomainNotFundamental(QMFError, ValueError):
    """A candidate fundamental domain has congruent or missing points."""


class NotParaunitary(QMFError, ValueError):
    """A loop or filter bank fails the paraunitarity (QMF) test."""


class NonUnitaryStep(QMFError, ValueError):
    """An elementary step carries a non-unitary matrix."""


class DimUnsupported(QMFError, ValueError):
    """The operation is only defined for a restricted dimension or size."""


class SupportNotReducible(QMFError, ValueError):
    """A peel step of the 1-D factorization could not shorten the support."""


class ConsistencyError(QMFError, ArithmeticError):
    """Two independent routes to the same quantity disagree."""


class ParseError(QMFError, ValueError):
    """A bank, steps, signal or subband file is malformed."""
