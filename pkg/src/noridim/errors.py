"""Exception hierarchy shared across the package.

Everything raised on purpose derives from NoridimError so callers (and
the CLI) can distinguish expected failure modes from genuine bugs.
"""

from __future__ import annotations


class NoridimError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(NoridimError):
    """Malformed or out-of-range input (bad prime, shape, precision...)."""


class ContextMismatch(InvalidInput):
    """Operands live over different moduli or sizes."""


class PreconditionError(InvalidInput):
    """A documented precondition of the operation does not hold."""


class NotInvertible(NoridimError):
    """The matrix is not a unit: its determinant vanishes mod p."""


class NotDivisible(NoridimError):
    """Exact division by a power of p failed on some entry."""


class NotNilpotent(NoridimError):
    """x**n != 0, so the truncated exponential does not apply."""


class NotUnipotent(NoridimError):
    """(u - 1)**n != 0, so the truncated logarithm does not apply."""


class NotALift(NoridimError):
    """The matrix does not reduce to the requested mod-p matrix."""


class CapExceeded(NoridimError):
    """An enumeration grew past its element cap.

    `cap` is the configured limit and `found` the count reached when the
    enumeration gave up; partial results are discarded.
    """

    def __init__(self, message: str, *, cap: int | None = None, found: int | None = None):
        super().__init__(message)
        self.cap = cap
        self.found = found


class BoundExceeded(NoridimError):
    """An element-order search passed its bound without closing."""

    def __init__(self, message: str, *, bound: int | None = None):
        super().__init__(message)
        self.bound = bound


class InvariantViolation(NoridimError):
    """A mathematical identity that must hold was observed to fail.

    This is the loud-failure path: it carries a witness so the offending
    object can be inspected rather than silently papered over.
    """

    def __init__(self, message: str, *, witness=None):
        super().__init__(message)
        self.witness = witness
