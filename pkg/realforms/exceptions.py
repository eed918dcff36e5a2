class RealFormsException(Exception):
    """Base exception class for realforms."""


class InvalidSpecException(RealFormsException):
    """Raised for malformed group, action or case documents."""


class NotAGroupException(RealFormsException):
    """Raised when a multiplication table fails the group axioms."""


class NotAnAutomorphismException(RealFormsException):
    """Raised when the involution does not respect multiplication."""


class NotAnInvolutionException(RealFormsException):
    """Raised when the involution does not square to the identity."""


class OrderCapExceededException(RealFormsException):
    """Raised when a generated group exceeds the configured order cap."""


class InversionOnNonabelianException(RealFormsException):
    """Raised for the "inversion" involution on a nonabelian group."""


class NotASubgroupException(RealFormsException):
    """Raised when an element set is not closed under products and inverses."""


class NotNormalException(RealFormsException):
    """Raised when a subgroup is not normal."""


class NotSigmaStableException(RealFormsException):
    """Raised when a subgroup is not preserved by the involution."""


class NotACocycleException(RealFormsException):
    """Raised when an element g fails g*sigma(g) = 1."""


class NotAStrongInvolutionException(RealFormsException):
    """Raised when g*sigma(g) is not a sigma-fixed central element."""


class NotACharacterException(RealFormsException):
    """Raised when a +-1 valued map is not a homomorphism."""


class NotEquivariantException(RealFormsException):
    """Raised when a character or action is incompatible with the involution."""


class NotFreeException(RealFormsException):
    """Raised when a normal subgroup does not act freely."""


class EmptyFormException(RealFormsException):
    """Raised for quadratic forms of rank zero."""


class UnknownKindException(RealFormsException):
    """Raised for an unknown group kind in witt_rank."""


class SingularException(RealFormsException):
    """Raised when a matrix that must be invertible has zero determinant."""


class CaseNotFoundException(RealFormsException):
    """Raised when a witness case id or file does not exist."""


class CapExceededException(RealFormsException):
    """Raised when a cohomology computation exceeds the order or degree caps."""
