"""Finite matrix groups over Z/p^k by exhaustive enumeration.

Groups are closed out by breadth-first search from the identity under
left multiplication by the generators, through the kernel backend (see
noridim.kernel).  Element stacks are int64 numpy arrays in discovery
order, so payloads stay compact (the 1.8M-element groups used by the
filtration passes take ~60 MB) and the mod-p scans can run vectorized.

On top of enumeration this module computes the order-p elements, their
logarithms, the subgroup they generate, the subgroup an explicit
nilpotent family generates through exp, and the dimension of the Lie
algebra those logarithms span and bracket-generate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernel
from .arrays import identity_rows, log_unipotent_rows, matmul_rows, pack_rows, pow_rows, unique_rows
from .errors import (
    BoundExceeded,
    ContextMismatch,
    InvalidInput,
    InvariantViolation,
    NotInvertible,
    PreconditionError,
)
from .expcore import NilpotentMatrix, UnipotentMatrix, trunc_exp
from .liealg import LieAlgebraFp, lie_closure
from .modring import FpSubspace, PrecisionContext, ResidueMatrix, span_rows

DEFAULT_CAP = 2_000_000

_SCAN_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class EnumeratedGroup:
    """A fully enumerated matrix group over Z/p^k.

    elements is an (order, n*n) int64 stack; when depth_starts is
    present the stack is in BFS discovery order and depth d occupies
    elements[depth_starts[d]:depth_starts[d+1]].  Groups obtained by
    reducing an enumeration mod a smaller power keep the identity at
    index 0 but carry no depth information.
    """

    ctx: PrecisionContext
    elements: np.ndarray
    generators: tuple[ResidueMatrix, ...]
    cap: int
    depth_starts: np.ndarray | None

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    def __len__(self) -> int:
        return self.order

    @property
    def max_depth(self) -> int | None:
        if self.depth_starts is None:
            return None
        return len(self.depth_starts) - 2

    def matrix_at(self, i: int) -> ResidueMatrix:
        return ResidueMatrix(self.ctx, tuple(int(v) for v in self.elements[i]))

    def matrices(self) -> Iterator[ResidueMatrix]:
        for i in range(self.order):
            yield self.matrix_at(i)

    @cached_property
    def _sorted_keys(self) -> np.ndarray | None:
        keys = pack_rows(self.elements, self.ctx.modulus)
        return np.sort(keys) if keys is not None else None

    @cached_property
    def _row_index(self) -> dict[bytes, int] | None:
        if self._sorted_keys is not None:
            return None
        return {row.tobytes(): i for i, row in enumerate(self.elements)}

    def contains_rows(self, arr: np.ndarray) -> np.ndarray:
        """Membership mask for an (m, n*n) stack of reduced rows."""
        arr = np.asarray(arr, dtype=np.int64)
        keys = pack_rows(arr, self.ctx.modulus)
        if keys is not None and self._sorted_keys is not None:
            pos = np.searchsorted(self._sorted_keys, keys)
            pos = np.minimum(pos, len(self._sorted_keys) - 1)
            return self._sorted_keys[pos] == keys
        index = self._row_index or {}
        return np.array([row.tobytes() in index for row in arr], dtype=bool)

    def __contains__(self, m: ResidueMatrix) -> bool:
        if m.ctx != self.ctx:
            raise ContextMismatch(f"mixed contexts {m.ctx} and {self.ctx}")
        row = np.array(m.entries, dtype=np.int64).reshape(1, -1)
        return bool(self.contains_rows(row)[0])

    def same_elements(self, other: "EnumeratedGroup") -> bool:
        if self.ctx != other.ctx or self.order != other.order:
            return False
        mine = unique_rows(self.elements, self.ctx.modulus)
        theirs = unique_rows(other.elements, other.ctx.modulus)
        return bool(np.array_equal(mine, theirs))

    def at_level(self, j: int) -> "EnumeratedGroup":
        """The image group mod p^j: reductions of the enumerated set.

        The reduction map is onto the mod-p^j group, so deduplicating
        the reduced stack is a complete enumeration down there.  BFS
        depth does not survive reduction; the identity is put first.
        """
        if j == self.ctx.k:
            return self
        ctx = self.ctx.at_level(j)
        reduced = unique_rows(self.elements % ctx.modulus, ctx.modulus)
        ident = identity_rows(1, ctx.n)[0]
        where = np.nonzero((reduced == ident).all(axis=1))[0]
        if len(where) != 1:
            raise InvariantViolation("reduced enumeration lost the identity")
        order = [int(where[0])] + [i for i in range(reduced.shape[0]) if i != where[0]]
        elements = reduced[order]
        elements.setflags(write=False)
        return EnumeratedGroup(
            ctx=ctx,
            elements=elements,
            generators=tuple(g.at_level(j) for g in self.generators),
            cap=self.cap,
            depth_starts=None,
        )

    def __repr__(self) -> str:
        c = self.ctx
        return f"EnumeratedGroup(order={self.order}, n={c.n}, mod {c.p}^{c.k})"


def enumerate_group(
    generators: Sequence[ResidueMatrix],
    *,
    cap: int = DEFAULT_CAP,
    ctx: PrecisionContext | None = None,
) -> EnumeratedGroup:
    """BFS closure of the generators (empty list: the trivial group).

    Generators must be invertible; the search is deterministic, so the
    same generators in the same order give the same element stack.  A
    small inverse-membership sample is checked on the result before it
    is returned.
    """
    gens = list(generators)
    if ctx is None:
        if not gens:
            raise InvalidInput("enumerating an empty generator list needs ctx")
        ctx = gens[0].ctx
    if cap < 1:
        raise InvalidInput(f"cap must be positive, got {cap}")
    for g in gens:
        if g.ctx != ctx:
            raise ContextMismatch(f"mixed contexts {g.ctx} and {ctx}")
        if g.det_mod_p() == 0:
            raise NotInvertible(f"generator is singular mod p: {g!r}")

    nn = ctx.n * ctx.n
    if gens:
        arr = np.array([g.entries for g in gens], dtype=np.int64)
    else:
        arr = np.empty((0, nn), dtype=np.int64)
    elements, starts = kernel.bfs_closure(arr, ctx.modulus, ctx.n, cap)
    elements.setflags(write=False)
    group = EnumeratedGroup(
        ctx=ctx,
        elements=elements,
        generators=tuple(gens),
        cap=cap,
        depth_starts=starts,
    )
    _check_inverse_sample(group)
    return group


def _check_inverse_sample(G: EnumeratedGroup, sample: int = 8) -> None:
    """Closure under inverse, spot-checked: a BFS bug would surface here."""
    idx = np.unique(np.linspace(0, G.order - 1, min(sample, G.order)).astype(int))
    for i in idx:
        inv = G.matrix_at(int(i)).inverse()
        if inv not in G:
            raise InvariantViolation(
                "enumerated set is not closed under inverse", witness=inv
            )


def _order_p_rows(G: EnumeratedGroup) -> np.ndarray:
    """Rows of the elements of exact order p, in enumeration order."""
    if G.ctx.k != 1:
        raise PreconditionError("order-p scan is a mod-p question: need k=1")
    n, p = G.ctx.n, G.ctx.p
    ident = identity_rows(1, n)[0]
    keep = []
    for start in range(0, G.order, _SCAN_CHUNK):
        chunk = G.elements[start : start + _SCAN_CHUNK]
        powered = pow_rows(chunk, p, n, p)
        mask = (powered == ident).all(axis=1) & ~(chunk == ident).all(axis=1)
        if mask.any():
            keep.append(chunk[mask])
    if not keep:
        return np.empty((0, n * n), dtype=np.int64)
    return np.concatenate(keep, axis=0)


def order_p_elements(G: EnumeratedGroup) -> list[UnipotentMatrix]:
    """Elements of exact order p, in ascending row order.

    Over F_p these are exactly the nontrivial unipotents, so wrapping
    them re-proves unipotency element by element.
    """
    rows = unique_rows(_order_p_rows(G), G.ctx.p)
    return [
        UnipotentMatrix(ResidueMatrix(G.ctx, tuple(int(v) for v in row)))
        for row in rows
    ]


def _log_rows(G: EnumeratedGroup) -> np.ndarray:
    """Logarithms of the order-p elements plus the zero row, sorted."""
    n, p = G.ctx.n, G.ctx.p
    rows = _order_p_rows(G)
    logs = log_unipotent_rows(rows, n, p) if rows.shape[0] else rows
    zero = np.zeros((1, n * n), dtype=np.int64)
    return unique_rows(np.concatenate([logs, zero], axis=0), p)


def nilpotent_log_set(G: EnumeratedGroup) -> list[NilpotentMatrix]:
    """{log u : u in G, u^p = 1}, zero included, in ascending row order."""
    return [
        NilpotentMatrix(ResidueMatrix(G.ctx, tuple(int(v) for v in row)))
        for row in _log_rows(G)
    ]


@dataclass(frozen=True)
class NdimReport:
    """Everything the nilpotent-generation dimension computation saw.

    ndim is the dimension of the Lie algebra generated by the log set;
    span_dim is the plain linear span of the same set.  The two are
    computed by different code paths and reported side by side; their
    agreement is recorded, never assumed.
    """

    log_set: tuple[NilpotentMatrix, ...]
    span: FpSubspace
    algebra: LieAlgebraFp
    span_dim: int
    lie_dim: int
    ndim: int
    span_equals_lie: bool

    def __post_init__(self):
        n2 = self.span.ctx.n ** 2
        if not (0 <= self.span_dim <= self.lie_dim <= n2):
            raise InvariantViolation(
                f"dimension chain broken: span={self.span_dim}, "
                f"lie={self.lie_dim}, n^2={n2}"
            )
        if self.ndim != self.lie_dim:
            raise InvariantViolation("ndim must equal the Lie-closure dimension")
        if self.span_equals_lie != (self.span_dim == self.lie_dim):
            raise InvariantViolation("agreement flag contradicts the dimensions")
        if not self.log_set or not self.log_set[0].mat.is_zero():
            raise InvariantViolation("log set must contain 0 (and sort it first)")
        if not self.span <= self.algebra.carrier:
            raise InvariantViolation("span must sit inside its Lie closure")


def ndim(G: EnumeratedGroup) -> NdimReport:
    """Dimension data of the Lie algebra generated by log of the p-torsion.

    The span is built from all log rows; the Lie closure is seeded with
    the span's basis (same algebra, fewer generators) and grown by the
    bracket worklist.
    """
    rows = _log_rows(G)
    sp = span_rows(G.ctx, rows)
    algebra = lie_closure(sp.basis_matrices(), ctx=G.ctx)
    return NdimReport(
        log_set=nilpotent_log_set(G),
        span=sp,
        algebra=algebra,
        span_dim=sp.dim,
        lie_dim=algebra.dim,
        ndim=algebra.dim,
        span_equals_lie=sp.dim == algebra.dim,
    )


def p_core(G: EnumeratedGroup, *, cap: int | None = None) -> EnumeratedGroup:
    """Subgroup generated by all elements of order p.

    Grown incrementally: order-p elements are added as generators only
    while they fall outside the subgroup built so far, which keeps the
    generator list short without changing the subgroup.
    """
    if G.ctx.k != 1:
        raise PreconditionError("the p-core is a mod-p construction: need k=1")
    cap = G.cap if cap is None else cap
    ops = order_p_elements(G)
    gens: list[ResidueMatrix] = []
    core = enumerate_group([], cap=cap, ctx=G.ctx)
    for u in ops:
        if u.mat not in core:
            gens.append(u.mat)
            core = enumerate_group(gens, cap=cap)
    return core


def exp_generated_subgroup(
    nilpotents: Iterable[NilpotentMatrix | ResidueMatrix],
    *,
    cap: int = DEFAULT_CAP,
    ctx: PrecisionContext | None = None,
) -> EnumeratedGroup:
    """Subgroup generated by exp(t x) over all t and all x in the family.

    exp(t x) = exp(x)^t for each fixed x, so one generator per distinct
    nonzero x suffices; zero members contribute only the identity and
    are dropped.
    """
    gens: list[ResidueMatrix] = []
    seen = set()
    for x in nilpotents:
        nil = x if isinstance(x, NilpotentMatrix) else NilpotentMatrix(x)
        if ctx is None:
            ctx = nil.ctx
        if nil.ctx != ctx:
            raise ContextMismatch(f"mixed contexts {nil.ctx} and {ctx}")
        if nil.mat.is_zero():
            continue
        u = trunc_exp(nil).mat
        if u.entries not in seen:
            seen.add(u.entries)
            gens.append(u)
    if ctx is None:
        raise InvalidInput("an empty nilpotent family needs an explicit ctx")
    if ctx.k != 1:
        raise PreconditionError("exp-generation is a mod-p construction: need k=1")
    return enumerate_group(gens, cap=cap, ctx=ctx)


def element_order(g: ResidueMatrix, bound: int) -> int:
    """Multiplicative order of g, by iterated multiplication.

    Walks g, g^2, ... up to `bound` steps and raises BoundExceeded
    beyond that, so a bad bound fails loudly instead of spinning.
    """
    ident = ResidueMatrix.identity(g.ctx)
    acc = g
    for e in range(1, bound + 1):
        if acc == ident:
            return e
        acc = acc * g
    raise BoundExceeded(f"order exceeds bound {bound}", bound=bound)


def check_group_axioms(
    G: EnumeratedGroup,
    *,
    full_limit: int = 1000,
    pair_sample: int = 4096,
    inverse_sample: int = 64,
    seed: int = 0,
) -> dict:
    """Closure under product and inverse on the enumerated stack.

    Exhaustive for groups up to full_limit elements, seeded random
    samples beyond that.  Any miss raises InvariantViolation with the
    offending pair; the return value summarizes what was checked.
    """
    n = G.ctx.n
    order = G.order
    rng = np.random.default_rng(seed)
    if order <= full_limit:
        mode = "full"
        ia = np.repeat(np.arange(order), order)
        ib = np.tile(np.arange(order), order)
        inv_idx = np.arange(order)
    else:
        mode = "sampled"
        ia = rng.integers(0, order, pair_sample)
        ib = rng.integers(0, order, pair_sample)
        inv_idx = rng.choice(order, size=min(inverse_sample, order), replace=False)

    for start in range(0, len(ia), _SCAN_CHUNK):
        sa = ia[start : start + _SCAN_CHUNK]
        sb = ib[start : start + _SCAN_CHUNK]
        prod = matmul_rows(G.elements[sa], G.elements[sb], n, G.ctx.modulus)
        ok = G.contains_rows(prod)
        if not ok.all():
            bad = int(np.argmin(ok))
            raise InvariantViolation(
                "product escaped the enumerated set",
                witness=(int(sa[bad]), int(sb[bad])),
            )
    for i in inv_idx:
        inv = G.matrix_at(int(i)).inverse()
        if inv not in G:
            raise InvariantViolation(
                "inverse escaped the enumerated set", witness=int(i)
            )
    return {
        "mode": mode,
        "pairs_checked": int(len(ia)),
        "inverses_checked": int(len(inv_idx)),
    }
