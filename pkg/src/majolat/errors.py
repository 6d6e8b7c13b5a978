"""Exception hierarchy. Everything raised by the package derives from MajorizationError."""


class MajorizationError(ValueError):
    pass


class EmptyVector(MajorizationError):
    pass


class NegativeEntry(MajorizationError):
    pass


class MassNotOne(MajorizationError):
    pass


class MassNotTwo(MajorizationError):
    pass


class TargetTooSmall(MajorizationError):
    pass


class DegenerateTransfer(MajorizationError):
    pass


class AlphaOutOfRange(MajorizationError):
    pass


class UnknownFunctional(MajorizationError):
    pass


class UnknownInequality(MajorizationError):
    pass


class DimensionTooSmall(MajorizationError):
    pass


class ExhaustedTries(MajorizationError):
    pass


class TooLarge(MajorizationError):
    pass


class VerdictMismatch(MajorizationError):
    """Two evaluations of the same inequality disagreed."""
