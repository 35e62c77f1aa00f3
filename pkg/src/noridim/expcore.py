"""Truncated exponential and logarithm for matrices over Z/p^k.

For x with x^n = 0 the series exp(x) = sum_{i<n} x^i / i! terminates,
and p >= n makes every i! a unit.  Likewise log(u) = -sum_{1<=i<n}
(1-u)^i / i for unipotent u.  On those domains the two maps are inverse
bijections; over F_p the unipotents other than 1 are exactly the
elements of order p.

The bare polynomials exp_series/log_series are exposed separately: some
congruence arguments apply them to matrices that are only nilpotent
after reduction, so they must not insist on nilpotency themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotNilpotent, NotUnipotent, PreconditionError
from .modring import PrecisionContext, ResidueMatrix


def is_nilpotent(x: ResidueMatrix) -> bool:
    """x^n == 0 (n-th power suffices for n x n matrices)."""
    return (x ** x.ctx.n).is_zero()


def is_unipotent(g: ResidueMatrix) -> bool:
    return is_nilpotent(g - ResidueMatrix.identity(g.ctx))


@dataclass(frozen=True)
class NilpotentMatrix:
    """A ResidueMatrix wrapper whose construction proves x^n = 0."""

    mat: ResidueMatrix

    def __post_init__(self):
        if not is_nilpotent(self.mat):
            raise NotNilpotent(f"matrix is not nilpotent: {self.mat!r}")

    @property
    def ctx(self) -> PrecisionContext:
        return self.mat.ctx


@dataclass(frozen=True)
class UnipotentMatrix:
    """A ResidueMatrix wrapper whose construction proves (u-1)^n = 0."""

    mat: ResidueMatrix

    def __post_init__(self):
        if not is_unipotent(self.mat):
            raise NotUnipotent(f"matrix is not unipotent: {self.mat!r}")

    @property
    def ctx(self) -> PrecisionContext:
        return self.mat.ctx


def exp_series(x: ResidueMatrix) -> ResidueMatrix:
    """sum_{i=0}^{n-1} x^i / i! as a bare polynomial, no nilpotency check."""
    ctx = x.ctx
    invs = ctx.factorial_invs
    acc = ResidueMatrix.identity(ctx)
    term = ResidueMatrix.identity(ctx)
    for i in range(1, ctx.n):
        term = term * x
        acc = acc + term.scale(invs[i])
    return acc


def log_series(u: ResidueMatrix) -> ResidueMatrix:
    """-sum_{i=1}^{n-1} (1-u)^i / i as a bare polynomial."""
    ctx = u.ctx
    mod = ctx.modulus
    w = ResidueMatrix.identity(ctx) - u
    acc = ResidueMatrix.zero(ctx)
    term = ResidueMatrix.identity(ctx)
    for i in range(1, ctx.n):
        term = term * w
        acc = acc + term.scale(pow(i, -1, mod))
    return -acc


def _as_matrix(x) -> ResidueMatrix:
    return x.mat if isinstance(x, (NilpotentMatrix, UnipotentMatrix)) else x


def trunc_exp(x) -> UnipotentMatrix:
    """Truncated exponential of a nilpotent matrix; always unipotent."""
    nil = x if isinstance(x, NilpotentMatrix) else NilpotentMatrix(_as_matrix(x))
    return UnipotentMatrix(exp_series(nil.mat))


def trunc_log(u) -> NilpotentMatrix:
    """Truncated logarithm of a unipotent matrix; always nilpotent."""
    uni = u if isinstance(u, UnipotentMatrix) else UnipotentMatrix(_as_matrix(u))
    return NilpotentMatrix(log_series(uni.mat))


def phi(x, t: int) -> UnipotentMatrix:
    """The one-parameter map t -> exp(t x) attached to a nilpotent x."""
    nil = x if isinstance(x, NilpotentMatrix) else NilpotentMatrix(_as_matrix(x))
    return trunc_exp(NilpotentMatrix(nil.mat.scale(t)))


def has_order_p(g: ResidueMatrix) -> bool:
    """Over F_p: g^p == 1 and g != 1, i.e. g is unipotent and nontrivial.

    The caller promises g invertible; the power is taken by
    square-and-multiply rather than through the logarithm so this stays
    an independent check of the exp/log picture.
    """
    if g.ctx.k != 1:
        raise PreconditionError("order-p test is a mod-p question: need k=1")
    ident = ResidueMatrix.identity(g.ctx)
    if g == ident:
        return False
    return g ** g.ctx.p == ident
