"""Lie algebras of matrices over F_p: brackets, closures, generation tests.

A LieAlgebraFp is a bracket-closed subspace of M_n(F_p) together with
the generators it was grown from.  Closure is computed by a worklist:
bracket every pair of working matrices, append each bracket that
enlarges the span.  Appends are bounded by n^2, so termination is
immediate, and the carrier is an RREF subspace, so the result does not
depend on input order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import CapExceeded, InvariantViolation, PreconditionError
from .expcore import is_nilpotent
from .modring import FpSubspace, PrecisionContext, ResidueMatrix, SpanBuilder, span

NILGEN_DEFAULT_CAP = 10**6


def bracket(a: ResidueMatrix, b: ResidueMatrix) -> ResidueMatrix:
    """Commutator ab - ba; an F_p operation, so k=1 is required."""
    if a.ctx.k != 1:
        raise PreconditionError("bracket is an F_p operation: need k=1")
    return a * b - b * a


@dataclass(frozen=True)
class LieAlgebraFp:
    """A bracket-closed subspace with its generating set recorded.

    Construction re-checks closure (all basis brackets land inside) and
    that the recorded generators lie in the carrier, so an instance is
    evidence, not just data.
    """

    carrier: FpSubspace
    generators: tuple[ResidueMatrix, ...]

    def __post_init__(self):
        sb = self.carrier.builder()
        for g in self.generators:
            if not sb.contains(g.entries):
                raise InvariantViolation(
                    "generator outside the carrier", witness=g
                )
        basis = self.carrier.basis_matrices()
        for i, a in enumerate(basis):
            for b in basis[i + 1 :]:
                c = bracket(a, b)
                if not sb.contains(c.entries):
                    raise InvariantViolation(
                        "carrier is not closed under the bracket", witness=(a, b)
                    )

    @property
    def ctx(self) -> PrecisionContext:
        return self.carrier.ctx

    @property
    def dim(self) -> int:
        return self.carrier.dim


def lie_closure(
    generators: Iterable[ResidueMatrix], *, ctx: PrecisionContext | None = None
) -> LieAlgebraFp:
    """Smallest bracket-closed subspace containing the generators."""
    gens = list(generators)
    if ctx is None:
        if not gens:
            raise PreconditionError("closure of an empty family needs an explicit ctx")
        ctx = gens[0].ctx
    if ctx.k != 1:
        raise PreconditionError("Lie closure is an F_p operation: need k=1")

    sb = SpanBuilder(ctx.p, ctx.n * ctx.n)
    work: list[ResidueMatrix] = []
    for g in gens:
        if sb.add(g.entries):
            work.append(g)
    i = 0
    while i < len(work):
        a = work[i]
        for j in range(i):
            c = bracket(a, work[j])
            if sb.add(c.entries):
                work.append(c)
        i += 1
    return LieAlgebraFp(FpSubspace.from_builder(ctx, sb), tuple(gens))


def is_nilpotently_generated(L: LieAlgebraFp, cap: int = NILGEN_DEFAULT_CAP) -> bool:
    """Whether the carrier is spanned by its own nilpotent elements.

    Two phases.  First a sound certificate: collect the nilpotent
    matrices among the recorded generators and all basis brackets; if
    they already span the carrier, the answer is yes.  Otherwise fall
    back to scanning all p^dim carrier elements, refusing with
    CapExceeded when that count passes `cap` (the cheap phase proves
    nothing in the negative, so guessing is not allowed).
    """
    ctx = L.ctx
    dim = L.dim
    if dim == 0:
        return True

    basis = L.carrier.basis_matrices()
    candidates = list(L.generators) + [
        bracket(a, b) for i, a in enumerate(basis) for b in basis[i + 1 :]
    ]
    nil_span = span(
        [m for m in candidates if is_nilpotent(m)], ctx=ctx
    )
    if nil_span.dim == dim:
        return True

    total = ctx.p**dim
    if total > cap:
        raise CapExceeded(
            f"exhaustive nilpotent scan needs {total} elements, cap is {cap}",
            cap=cap,
            found=total,
        )
    sb = SpanBuilder(ctx.p, ctx.n * ctx.n)
    for coeffs in product(range(ctx.p), repeat=dim):
        m = ResidueMatrix.zero(ctx)
        for c, b in zip(coeffs, basis):
            if c:
                m = m + b.scale(c)
        if is_nilpotent(m) and sb.add(m.entries):
            if sb.dim == dim:
                return True
    return False


def nilpotent_span(matrices: Sequence[ResidueMatrix], *, ctx: PrecisionContext) -> FpSubspace:
    """Span of the nilpotent members of a family (helper for reports)."""
    return span([m for m in matrices if is_nilpotent(m)], ctx=ctx)
