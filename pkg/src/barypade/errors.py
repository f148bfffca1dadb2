"""Exception and warning types shared across the package."""


class BaryPadeError(Exception):
    """Base class for all errors raised by barypade."""


class DegreeZero(BaryPadeError):
    """A constant polynomial has no roots."""


class NonConvergence(BaryPadeError):
    """An iteration hit its cap; usually the working precision is too low."""


class DerivativeUnderflow(NonConvergence):
    """Newton step undefined: the derivative vanished to working precision."""


class InsufficientTruncation(BaryPadeError):
    """Not enough series coefficients to determine the requested quantity."""


class NodeCollision(BaryPadeError):
    """Interpolation nodes are not pairwise distinct (or a node is zero)."""


class AlphaOnNode(BaryPadeError):
    """A pole target coincides with an interpolation node."""


class DegenerateSystem(BaryPadeError):
    """The order-condition matrix has nullity greater than one."""


class PoleHit(BaryPadeError):
    """Evaluation point is a pole of the approximant."""


class NoPole(BaryPadeError):
    """The denominator has no zero in the search region."""


class BlockOverlap(BaryPadeError):
    """Two coefficient blocks of the adversary function overlap."""


class PlanError(BaryPadeError, ValueError):
    """An adversary plan or config violates its invariants."""


class SearchExhausted(BaryPadeError):
    """The mu search ran out of retries; ``bundle`` holds the last attempt."""

    def __init__(self, message, bundle=None):
        super().__init__(message)
        self.bundle = bundle


class ZeroWeightWarning(UserWarning):
    """A solved weight vanished; interpolation at that node is not guaranteed."""
