"""Exception hierarchy.

Every error raised by the library derives from :class:`BirefError`.  Input
problems additionally derive from :class:`ValueError` so callers that only
care about "bad input" can catch that.
"""


class BirefError(Exception):
    pass


class InputError(BirefError, ValueError):
    pass


# algebra
class NonPrime(InputError):
    pass


class EvenCharacteristic(InputError):
    pass


class ReducibleModulus(InputError):
    pass


class UnsupportedField(InputError):
    pass


class ZeroElement(InputError):
    pass


class ZeroPolynomial(InputError):
    pass


class ZeroConstantTerm(InputError):
    pass


# linalg
class Singular(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class Inconsistent(InputError):
    pass


# space
class Degenerate(InputError):
    pass


class NotNested(InputError):
    pass


class DescentFails(InputError):
    pass


class NoInvariantForm(InputError):
    pass


class ExhaustedSolutionSpace(BirefError):
    pass


# ortho
class NotAnIsometry(InputError):
    pass


class IsotropicVector(InputError):
    pass


class AnisotropicSmallSpace(BirefError):
    """Omega membership is not given by det and spinor norm when Wind V = 0."""


class DegenerateSubspace(InputError):
    pass


class BadSpec(InputError):
    pass


class InternalDecompositionFailure(BirefError):
    """Post-verification of an orthogonal decomposition failed (a bug)."""


# classify
class NotSpecial(InputError):
    pass


class NotInOmega(InputError):
    pass


class WrongFieldBranch(InputError):
    pass


class NotAReversal(InputError):
    pass


class EtaSquareNotMinusOne(InputError):
    pass


class NotSL(InputError):
    pass


class NotReversibleInGL(InputError):
    pass


class WrongDimensionClass(InputError):
    pass


class TheoremViolation(BirefError):
    """A classification theorem disagreed with a certified instance."""


# oracle
class GroupTooLarge(BirefError):
    pass


class CentralizerTooLarge(BirefError):
    pass


class UnknownSuite(InputError):
    pass


# io / cli
class ParseError(InputError):
    pass
