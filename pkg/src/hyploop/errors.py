"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): a ``ValidationError``
means the inputs violate a precondition, a ``NumericalFailure`` means the inputs
were acceptable but a measure-zero configuration was hit and the caller is
expected to perturb and retry.
"""


class HyploopError(Exception):
    pass


class ValidationError(HyploopError, ValueError):
    pass


class NumericalFailure(HyploopError, ArithmeticError):
    pass


# geometry
class KindMismatch(ValidationError):
    pass


class BadRadius(ValidationError):
    pass


class BadBudget(ValidationError):
    pass


class DegenerateTangency(NumericalFailure):
    pass


# homotopy
class NoGenerators(ValidationError):
    pass


class TangentialCrossing(NumericalFailure):
    pass


class NullClass(ValidationError):
    pass


# kobayashi
class OutsideDomain(ValidationError):
    pass


class TouchesComplement(ValidationError):
    pass


# reroute
class NearBase(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class NotSimple(ValidationError):
    pass


class NoRoomForBase(ValidationError):
    pass


class BadBase(ValidationError):
    pass


# extremal
class InsufficientData(ValidationError):
    pass


class ObstructedRegime(ValidationError):
    pass


# growth / arithmetic
class BadLattice(ValidationError):
    pass


class NotBordered(ValidationError):
    pass


class NotElliptic(ValidationError):
    pass
