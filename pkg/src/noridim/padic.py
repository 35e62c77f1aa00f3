"""Congruence filtrations and power congruences over Z/p^k.

For an enumerated group G mod p^k the filtration subspace at level m
collects (g - 1)/p^m mod p over all g = 1 mod p^m; these subspaces
increase with m, are bounded below by the mod-p nilpotent-generation
dimension and above by any declared dimension, and drive an exact
order-growth law: passing from precision m to m+1 multiplies the group
order by p^(dim V_m).  Every one of those identities is re-checked on
the computed data before a report is handed out.

The power congruence (1 + p^m A)^p = 1 + p^(m+1) A mod p^(m+2) and the
lift behaviour A^(p^k) = 1 + p^k M mod p^(k+1), M = x mod p, for any A
congruent to exp(x~) mod p are verified here as well, with seeded batch
runners shared by the CLI and the acceptance battery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrays import identity_rows, unique_rows
from .errors import (
    InvariantViolation,
    NotALift,
    NotDivisible,
    PreconditionError,
)
from .expcore import NilpotentMatrix, exp_series
from .fingroup import DEFAULT_CAP, EnumeratedGroup, enumerate_group, ndim
from .modring import FpSubspace, PrecisionContext, ResidueMatrix, span_rows

_STREAM_CONGRUENCE = 1
_STREAM_LEMMA = 2
_STREAM_MATRIX = 3


# -- filtration subspaces ----------------------------------------------


def _filtration_from_rows(ctx: PrecisionContext, rows: np.ndarray, m: int) -> FpSubspace:
    """V_m from the element rows of the group reduced mod p^(m+1)."""
    p = ctx.p
    level = p ** (m + 1)
    ident = identity_rows(1, ctx.n)[0]
    d = (rows - ident) % level
    mask = (d % p**m == 0).all(axis=1)
    v = (d[mask] // p**m) % p
    return span_rows(ctx.at_level(1), v)


def filtration_subspace(G: EnumeratedGroup, m: int) -> FpSubspace:
    """V_m = span{(g - 1)/p^m mod p : g in G mod p^(m+1), g = 1 mod p^m}."""
    ctx = G.ctx
    if not (1 <= m <= ctx.k - 1):
        raise PreconditionError(f"level m={m} outside [1, k-1] for k={ctx.k}")
    level = ctx.p ** (m + 1)
    rows = unique_rows(G.elements % level, level)
    return _filtration_from_rows(ctx, rows, m)


def _level_orders(G: EnumeratedGroup) -> tuple[int, ...]:
    """|G mod p^j| for j = 1..k, read off one top-precision enumeration."""
    orders = []
    for j in range(1, G.ctx.k + 1):
        level = G.ctx.p**j
        orders.append(int(unique_rows(G.elements % level, level).shape[0]))
    return tuple(orders)


def _growth_exponents(orders: Sequence[int], p: int) -> tuple[int, ...]:
    """Exact base-p logs of consecutive order ratios; loud on non-powers."""
    out = []
    for a, b in zip(orders, orders[1:]):
        if b % a:
            raise InvariantViolation(
                f"order {b} is not a multiple of {a}", witness=(a, b)
            )
        ratio = b // a
        e = 0
        while ratio % p == 0:
            ratio //= p
            e += 1
        if ratio != 1:
            raise InvariantViolation(
                f"order ratio {b}//{a} is not a power of p={p}", witness=(a, b)
            )
        out.append(e)
    return tuple(out)


@dataclass(frozen=True)
class FiltrationReport:
    """Filtration subspaces, level orders, and the mod-p dimension.

    Validated on construction: the inclusion chain, the lower bound by
    ndim mod p, the exact growth law, and (when a declared dimension is
    supplied) the upper bound plus equality propagation.
    """

    ctx: PrecisionContext
    levels: tuple[FpSubspace, ...]
    group_orders: tuple[int, ...]
    ndim_mod_p: int
    declared_dim: int | None

    def __post_init__(self):
        k = self.ctx.k
        if len(self.levels) != k - 1 or len(self.group_orders) != k:
            raise InvariantViolation("report shape does not match precision k")
        for m in range(len(self.levels) - 1):
            if not self.levels[m] <= self.levels[m + 1]:
                raise InvariantViolation(
                    f"V_{m + 1} is not contained in V_{m + 2}", witness=m + 1
                )
        dims = self.dims
        for m, d in enumerate(dims, start=1):
            if self.ndim_mod_p > d:
                raise InvariantViolation(
                    f"ndim mod p = {self.ndim_mod_p} exceeds dim V_{m} = {d}",
                    witness=m,
                )
        growth = _growth_exponents(self.group_orders, self.ctx.p)
        if growth != dims:
            raise InvariantViolation(
                f"growth exponents {growth} disagree with dims {dims}",
                witness=(growth, dims),
            )
        if self.declared_dim is not None:
            for m, d in enumerate(dims, start=1):
                if d > self.declared_dim:
                    raise InvariantViolation(
                        f"dim V_{m} = {d} exceeds declared dim {self.declared_dim}",
                        witness=m,
                    )
            if self.ndim_mod_p == self.declared_dim and any(
                d != self.declared_dim for d in dims
            ):
                raise InvariantViolation(
                    "ndim equals the declared dim, so every level must too",
                    witness=dims,
                )

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.dim for v in self.levels)

    @property
    def growth_profile(self) -> tuple[int, ...]:
        return _growth_exponents(self.group_orders, self.ctx.p)


def filtration_report(
    generators: Sequence[ResidueMatrix],
    *,
    cap: int = DEFAULT_CAP,
    declared_dim: int | None = None,
) -> FiltrationReport:
    """One top-precision enumeration, then every level read off it."""
    if not generators:
        raise PreconditionError("filtration of the trivial group is vacuous")
    ctx = generators[0].ctx
    if ctx.k < 2:
        raise PreconditionError("a filtration needs k >= 2")
    top = enumerate_group(generators, cap=cap)
    levels = tuple(filtration_subspace(top, m) for m in range(1, ctx.k))
    orders = _level_orders(top)
    report_ndim = ndim(top.at_level(1)).ndim
    return FiltrationReport(
        ctx=ctx,
        levels=levels,
        group_orders=orders,
        ndim_mod_p=report_ndim,
        declared_dim=declared_dim,
    )


def growth_profile(
    generators: Sequence[ResidueMatrix], *, cap: int = DEFAULT_CAP
) -> tuple[int, ...]:
    """Exponents e_j with |G mod p^(j+1)| = |G mod p^j| * p^(e_j)."""
    if not generators:
        raise PreconditionError("growth profile of the trivial group is vacuous")
    top = enumerate_group(generators, cap=cap)
    return _growth_exponents(_level_orders(top), top.ctx.p)


# -- power congruences -------------------------------------------------


def check_power_congruence(A: ResidueMatrix, m: int) -> bool:
    """(1 + p^m A)^p = 1 + p^(m+1) A  in Z/p^(m+2), for m >= 1."""
    ctx = A.ctx
    if m < 1:
        raise PreconditionError("the congruence needs m >= 1")
    if ctx.k < m + 2:
        raise PreconditionError(
            f"checking mod p^{m + 2} needs precision k >= {m + 2}, have {ctx.k}"
        )
    work = ctx.at_level(m + 2)
    a = A.at_level(m + 2)
    ident = ResidueMatrix.identity(work)
    lhs = (ident + a.scale(ctx.p**m)) ** ctx.p
    rhs = ident + a.scale(ctx.p ** (m + 1))
    return lhs == rhs


def verify_lift_lemma(
    x: NilpotentMatrix,
    k: int,
    perturbation: ResidueMatrix | None = None,
    candidate: ResidueMatrix | None = None,
) -> tuple[bool, ResidueMatrix | None]:
    """A^(p^k) = 1 + p^k M mod p^(k+1) with M = x mod p, for any lift A.

    A is exp(x~) + p*B at precision k+1, where x~ lifts x entrywise and
    B is the optional perturbation; alternatively a full candidate A
    may be supplied, which must reduce to exp(x~) mod p (NotALift
    otherwise).  Returns (ok, M): ok only when the power has the stated
    shape AND M reduces to x; M is None when even the shape fails.

    This statement needs p >= 2n; smaller primes are refused rather
    than tested vacuously.
    """
    ctx1 = x.ctx
    if ctx1.k != 1:
        raise PreconditionError("x must be given mod p (k=1)")
    if ctx1.p < 2 * ctx1.n:
        raise PreconditionError(
            f"the lift statement needs p >= 2n, have p={ctx1.p}, n={ctx1.n}"
        )
    if k < 1:
        raise PreconditionError(f"exponent level k={k} must be >= 1")
    hi = PrecisionContext(ctx1.n, ctx1.p, k + 1)
    base = exp_series(ResidueMatrix(hi, x.mat.entries))
    if candidate is not None:
        if perturbation is not None:
            raise PreconditionError("give a perturbation or a candidate, not both")
        if candidate.ctx != hi:
            raise PreconditionError(f"candidate must live at precision k+1={k + 1}")
        if candidate.at_level(1) != base.at_level(1):
            raise NotALift("candidate does not reduce to exp(x) mod p")
        A = candidate
    elif perturbation is not None:
        if perturbation.ctx != hi:
            raise PreconditionError(f"perturbation must live at precision k+1={k + 1}")
        A = base + perturbation.scale(ctx1.p)
    else:
        A = base

    powered = A ** (ctx1.p**k)
    diff = powered - ResidueMatrix.identity(hi)
    try:
        M = diff.div_p_power(k) if k < hi.k else diff
    except NotDivisible:
        return False, None
    M1 = M.at_level(1)
    return M1 == x.mat, M1


# -- seeded batch runners ----------------------------------------------


def _rng(seed: int, stream: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream, *tags]))


def random_matrix(ctx: PrecisionContext, rng: np.random.Generator) -> ResidueMatrix:
    vals = rng.integers(0, ctx.modulus, size=ctx.n * ctx.n)
    return ResidueMatrix(ctx, tuple(int(v) for v in vals))


def random_invertible(ctx: PrecisionContext, rng: np.random.Generator) -> ResidueMatrix:
    while True:
        m = random_matrix(ctx, rng)
        if m.det_mod_p() != 0:
            return m


def random_nilpotent(ctx: PrecisionContext, rng: np.random.Generator) -> NilpotentMatrix:
    """A conjugated strictly upper-triangular matrix: nilpotent by shape."""
    n = ctx.n
    ent = [0] * (n * n)
    for i in range(n):
        for j in range(i + 1, n):
            ent[i * n + j] = int(rng.integers(0, ctx.modulus))
    upper = ResidueMatrix(ctx, tuple(ent))
    s = random_invertible(ctx, rng)
    return NilpotentMatrix(s * upper * s.inverse())


@dataclass(frozen=True)
class TrialSummary:
    """Outcome of a seeded batch: label, counts, and a first witness."""

    label: str
    trials: int
    failures: int
    witness: tuple | None

    @property
    def ok(self) -> bool:
        return self.failures == 0


def run_congruence_trials(
    n: int, p: int, k: int, m_values: Sequence[int], trials: int, seed: int
) -> TrialSummary:
    """check_power_congruence on `trials` seeded random A per level m."""
    ctx = PrecisionContext(n, p, k)
    rng = _rng(seed, _STREAM_CONGRUENCE, n, p, k)
    failures = 0
    witness = None
    for t in range(trials):
        A = random_matrix(ctx, rng)
        for m in m_values:
            if not check_power_congruence(A, m):
                failures += 1
                if witness is None:
                    witness = (t, m, A.entries)
    return TrialSummary(
        label=f"power congruence n={n} p={p} k={k} m={list(m_values)}",
        trials=trials * len(list(m_values)),
        failures=failures,
        witness=witness,
    )


def run_lemma_trials(n: int, p: int, k: int, trials: int, seed: int) -> TrialSummary:
    """verify_lift_lemma on seeded random (x, perturbation) pairs."""
    ctx1 = PrecisionContext(n, p, 1)
    hi = PrecisionContext(n, p, k + 1)
    rng = _rng(seed, _STREAM_LEMMA, n, p, k)
    failures = 0
    witness = None
    for t in range(trials):
        x = random_nilpotent(ctx1, rng)
        B = random_matrix(hi, rng)
        ok, M = verify_lift_lemma(x, k, perturbation=B)
        if not ok:
            failures += 1
            if witness is None:
                witness = (t, x.mat.entries, None if M is None else M.entries)
    return TrialSummary(
        label=f"lift lemma n={n} p={p} k={k}",
        trials=trials,
        failures=failures,
        witness=witness,
    )
