"""Exception hierarchy for almostrep."""


class AlmostRepError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(AlmostRepError, ValueError):
    pass


class InvalidMatrix(AlmostRepError, ValueError):
    """Non-square, non-finite or otherwise malformed matrix payload."""


class NonNormalMatrix(AlmostRepError, ValueError):
    pass


class NotUnitary(AlmostRepError, ValueError):
    pass


class NotInvolution(AlmostRepError, ValueError):
    pass


class NonzeroProjectionRequired(AlmostRepError, ValueError):
    pass


class NoCentralMarking(AlmostRepError, ValueError):
    pass


class SeparationBelowDelta(AlmostRepError):
    """The separation hypothesis ``norm(phi(J) - 1) >= delta`` fails."""


class NoNegativeEigenspace(AlmostRepError):
    """The snapped involution is the identity, so there is nothing to compress onto."""


class NoSeparatingCharacter(AlmostRepError):
    pass


class OrderViolation(AlmostRepError, ValueError):
    """A generator image is too far from having the declared finite order."""


class UnknownGroup(AlmostRepError, KeyError):
    pass


class ConfigError(AlmostRepError, ValueError):
    """Invalid experiment configuration; the message starts with the field path."""


class NormPairNotDominated(AlmostRepError, ValueError):
    """The second norm is not bounded by the first on all matrices."""


class NotCentral(AlmostRepError, ValueError):
    pass
