"""Exception types raised across the package."""


class FFExtError(ValueError):
    """Base class for every domain error raised by ffext."""


class NotPrime(FFExtError):
    pass


class EvenCharacteristic(FFExtError):
    pass


class CapExceeded(FFExtError):
    pass


class ZeroInverse(FFExtError, ZeroDivisionError):
    pass


class SpaceMismatch(FFExtError):
    pass


class BadExponent(FFExtError):
    pass


class ParseError(FFExtError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DegreeExceedsCharacteristic(FFExtError):
    pass


class ZeroPolynomial(FFExtError):
    pass


class SupportViolation(FFExtError):
    pass


class ZeroFunction(FFExtError):
    pass


class EmptyVariety(FFExtError):
    pass


class BadRange(FFExtError):
    pass


class WrongPolynomial(FFExtError):
    pass


class ZeroFrequency(FFExtError):
    pass


class NonDiagonalPolynomial(FFExtError):
    pass


class WrongResidueClass(FFExtError):
    pass


class ZeroRadius(FFExtError):
    pass


class BadSizes(FFExtError):
    pass
