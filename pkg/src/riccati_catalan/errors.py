"""Exception types raised by the solvers."""


class RiccatiError(Exception):
    """Base class for numerical failures inside the solvers."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class CatalanOverflowError(OverflowError):
    """A Catalan number does not fit the supported exact-integer width."""


class SingularityError(RiccatiError):
    """A closed-form denominator or a matrix pivot vanished."""


class ResidueError(RiccatiError):
    """A quantity that must be real carried a non-negligible imaginary part."""
