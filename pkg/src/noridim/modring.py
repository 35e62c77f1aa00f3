"""Exact matrices over Z/p^k and subspaces of M_n(F_p).

Entries are plain Python integers kept reduced into [0, p^k).  All
values are immutable; every operation returns a new value and raises on
mixed contexts instead of coercing.  The working prime always satisfies
p >= n so that 0!, ..., (n-1)! are units, which the series code relies
on, and p^k stays below 2^31 so batched numpy passes can run in int64
without overflow.

Subspaces of M_n(F_p) are stored as reduced row echelon bases (flat
row-major vectors of length n^2), which makes equality and inclusion
checks canonical string comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ContextMismatch,
    InvalidInput,
    NotDivisible,
    NotInvertible,
    PreconditionError,
)

MAX_N = 50
MODULUS_LIMIT = 1 << 31


def is_prime(p: int) -> bool:
    """Trial division; moduli here are tiny so nothing fancier is needed."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrecisionContext:
    """Matrix size n, prime p, and precision k: arithmetic in M_n(Z/p^k).

    Hashable and cheap to compare, so matrices can carry their context
    and refuse to mix with foreign ones.
    """

    n: int
    p: int
    k: int

    def __post_init__(self):
        if not (1 <= self.n <= MAX_N):
            raise InvalidInput(f"matrix size n={self.n} outside [1, {MAX_N}]")
        if not is_prime(self.p):
            raise InvalidInput(f"p={self.p} is not prime")
        if self.p < self.n:
            raise InvalidInput(
                f"p={self.p} < n={self.n}: factorials up to (n-1)! must be units"
            )
        if self.k < 1:
            raise InvalidInput(f"precision k={self.k} must be >= 1")
        if self.p**self.k >= MODULUS_LIMIT:
            raise InvalidInput(
                f"modulus {self.p}^{self.k} exceeds the 2^31 working limit"
            )

    @cached_property
    def modulus(self) -> int:
        return self.p**self.k

    @cached_property
    def factorial_invs(self) -> tuple[int, ...]:
        """inv(i!) mod p^k for i = 0..n-1; they exist because i < n <= p."""
        invs = [1]
        fact = 1
        for i in range(1, self.n):
            fact = fact * i % self.modulus
            invs.append(pow(fact, -1, self.modulus))
        return tuple(invs)

    def at_level(self, j: int) -> "PrecisionContext":
        """The same ring truncated to precision j <= k."""
        if not (1 <= j <= self.k):
            raise PreconditionError(f"level j={j} outside [1, k={self.k}]")
        return PrecisionContext(self.n, self.p, j)

    def unit_inverse(self, x: int) -> int:
        """Inverse of a scalar unit mod p^k."""
        try:
            return pow(x, -1, self.modulus)
        except ValueError:
            raise NotInvertible(f"{x} is not a unit mod {self.p}^{self.k}") from None

    def __repr__(self) -> str:
        return f"PrecisionContext(n={self.n}, p={self.p}, k={self.k})"


def _check_same_ctx(a: "ResidueMatrix", b: "ResidueMatrix") -> None:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"mixed contexts {a.ctx} and {b.ctx}")


@dataclass(frozen=True)
class ResidueMatrix:
    """Immutable n x n matrix over Z/p^k, entries row-major in [0, p^k)."""

    ctx: PrecisionContext
    entries: tuple[int, ...]

    def __post_init__(self):
        nn = self.ctx.n * self.ctx.n
        if len(self.entries) != nn:
            raise InvalidInput(
                f"expected {nn} entries for n={self.ctx.n}, got {len(self.entries)}"
            )
        mod = self.ctx.modulus
        object.__setattr__(
            self, "entries", tuple(int(v) % mod for v in self.entries)
        )

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(ctx: PrecisionContext) -> "ResidueMatrix":
        return ResidueMatrix(ctx, (0,) * (ctx.n * ctx.n))

    @staticmethod
    def identity(ctx: PrecisionContext) -> "ResidueMatrix":
        n = ctx.n
        return ResidueMatrix(
            ctx, tuple(1 if i == j else 0 for i in range(n) for j in range(n))
        )

    @staticmethod
    def from_rows(ctx: PrecisionContext, rows: Sequence[Sequence[int]]) -> "ResidueMatrix":
        if len(rows) != ctx.n or any(len(r) != ctx.n for r in rows):
            raise InvalidInput(f"expected {ctx.n} rows of length {ctx.n}")
        return ResidueMatrix(ctx, tuple(v for r in rows for v in r))

    @staticmethod
    def elementary(ctx: PrecisionContext, i: int, j: int, value: int = 1) -> "ResidueMatrix":
        """value * e_ij."""
        n = ctx.n
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidInput(f"position ({i}, {j}) outside a {n}x{n} matrix")
        ent = [0] * (n * n)
        ent[i * n + j] = value
        return ResidueMatrix(ctx, tuple(ent))

    @staticmethod
    def from_array(ctx: PrecisionContext, arr: np.ndarray) -> "ResidueMatrix":
        flat = np.asarray(arr, dtype=np.int64).reshape(-1)
        return ResidueMatrix(ctx, tuple(int(v) for v in flat))

    # -- accessors ---------------------------------------------------

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.ctx.n + j]

    def rows(self) -> tuple[tuple[int, ...], ...]:
        n = self.ctx.n
        return tuple(self.entries[i * n : (i + 1) * n] for i in range(n))

    def to_array(self) -> np.ndarray:
        n = self.ctx.n
        return np.array(self.entries, dtype=np.int64).reshape(n, n)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries)

    def is_identity(self) -> bool:
        return self == ResidueMatrix.identity(self.ctx)

    def trace(self) -> int:
        n = self.ctx.n
        return sum(self.entries[i * n + i] for i in range(n)) % self.ctx.modulus

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        _check_same_ctx(self, other)
        return ResidueMatrix(
            self.ctx, tuple(a + b for a, b in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        _check_same_ctx(self, other)
        return ResidueMatrix(
            self.ctx, tuple(a - b for a, b in zip(self.entries, other.entries))
        )

    def __neg__(self) -> "ResidueMatrix":
        return ResidueMatrix(self.ctx, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "ResidueMatrix":
        return ResidueMatrix(self.ctx, tuple(c * a for a in self.entries))

    def __rmul__(self, c: int) -> "ResidueMatrix":
        if not isinstance(c, int):
            return NotImplemented
        return self.scale(c)

    def __mul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        _check_same_ctx(self, other)
        n = self.ctx.n
        mod = self.ctx.modulus
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            arow = a[i * n : (i + 1) * n]
            for j in range(n):
                s = 0
                for l in range(n):
                    s += arow[l] * b[l * n + j]
                out.append(s % mod)
        return ResidueMatrix(self.ctx, tuple(out))

    def __pow__(self, e: int) -> "ResidueMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = ResidueMatrix.identity(self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self) -> "ResidueMatrix":
        """Gauss-Jordan over Z/p^k; pivots must be units mod p."""
        n = self.ctx.n
        mod = self.ctx.modulus
        p = self.ctx.p
        a = [list(r) for r in self.rows()]
        b = [list(r) for r in ResidueMatrix.identity(self.ctx).rows()]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] % p), None)
            if piv is None:
                raise NotInvertible("determinant vanishes mod p")
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                b[col], b[piv] = b[piv], b[col]
            inv = pow(a[col][col], -1, mod)
            a[col] = [v * inv % mod for v in a[col]]
            b[col] = [v * inv % mod for v in b[col]]
            for r in range(n):
                if r != col and a[r][col]:
                    f = a[r][col]
                    a[r] = [(x - f * y) % mod for x, y in zip(a[r], a[col])]
                    b[r] = [(x - f * y) % mod for x, y in zip(b[r], b[col])]
        return ResidueMatrix(self.ctx, tuple(v for row in b for v in row))

    def det_mod_p(self) -> int:
        """Determinant of the mod-p reduction (enough to test invertibility)."""
        n = self.ctx.n
        p = self.ctx.p
        a = [[v % p for v in row] for row in self.rows()]
        det = 1
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                return 0
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            det = det * a[col][col] % p
            inv = pow(a[col][col], -1, p)
            for r in range(col + 1, n):
                if a[r][col]:
                    f = a[r][col] * inv % p
                    a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
        return det % p

    # -- precision moves ----------------------------------------------

    def at_level(self, j: int) -> "ResidueMatrix":
        """Reduce mod p^j.  A ring homomorphism for every j <= k."""
        ctx = self.ctx.at_level(j)
        return ResidueMatrix(ctx, self.entries)

    def div_p_power(self, m: int) -> "ResidueMatrix":
        """Exact division by p^m, landing in precision k - m.

        Only meaningful when every entry is divisible by p^m; raises
        NotDivisible otherwise so silent truncation can never happen.
        """
        if m == 0:
            return self
        if not (0 < m < self.ctx.k):
            raise PreconditionError(
                f"division by p^{m} needs 0 < m < k={self.ctx.k}"
            )
        q = self.ctx.p**m
        if any(v % q for v in self.entries):
            raise NotDivisible(f"entries are not all divisible by {self.ctx.p}^{m}")
        ctx = PrecisionContext(self.ctx.n, self.ctx.p, self.ctx.k - m)
        return ResidueMatrix(ctx, tuple(v // q for v in self.entries))

    def __repr__(self) -> str:
        c = self.ctx
        return f"ResidueMatrix({c.n}x{c.n} mod {c.p}^{c.k}, {list(self.rows())})"


# -- F_p row spans ----------------------------------------------------


class SpanBuilder:
    """Incremental reduced row echelon basis of a subspace of F_p^width.

    Rows are kept fully reduced against each other and ordered by pivot
    column, so `basis` is canonical at every moment regardless of the
    order vectors arrive in.
    """

    def __init__(self, p: int, width: int):
        self.p = p
        self.width = width
        self._rows: list[list[int]] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def full(self) -> bool:
        return len(self._rows) == self.width

    def basis(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r) for r in self._rows)

    def add(self, vec: Sequence[int]) -> bool:
        """Reduce vec against the basis; returns True if it extended it."""
        p = self.p
        if len(vec) != self.width:
            raise InvalidInput(f"expected vector of length {self.width}")
        v = [int(x) % p for x in vec]
        for row, piv in zip(self._rows, self._pivots):
            c = v[piv]
            if c:
                v = [(a - c * b) % p for a, b in zip(v, row)]
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        inv = pow(v[piv], -1, p)
        v = [x * inv % p for x in v]
        for i, row in enumerate(self._rows):
            c = row[piv]
            if c:
                self._rows[i] = [(a - c * b) % p for a, b in zip(row, v)]
        pos = next(
            (i for i, q in enumerate(self._pivots) if q > piv), len(self._pivots)
        )
        self._rows.insert(pos, v)
        self._pivots.insert(pos, piv)
        return True

    def add_rows(self, arr: np.ndarray) -> None:
        """Bulk-add rows of an (m, width) array, vectorizing the reduction."""
        if self.full:
            return
        arr = np.asarray(arr, dtype=np.int64)
        if arr.size == 0:
            return
        if arr.ndim != 2 or arr.shape[1] != self.width:
            raise InvalidInput(f"expected rows of width {self.width}")
        p = self.p
        for start in range(0, arr.shape[0], 1 << 15):
            chunk = arr[start : start + (1 << 15)] % p
            while not self.full:
                work = chunk
                for row, piv in zip(self._rows, self._pivots):
                    coef = work[:, piv]
                    if coef.any():
                        row_arr = np.array(row, dtype=np.int64)
                        work = (work - coef[:, None] * row_arr[None, :]) % p
                nz = work.any(axis=1)
                if not nz.any():
                    break
                self.add([int(x) for x in work[int(np.argmax(nz))]])
            if self.full:
                return

    def contains(self, vec: Sequence[int]) -> bool:
        p = self.p
        v = [int(x) % p for x in vec]
        for row, piv in zip(self._rows, self._pivots):
            c = v[piv]
            if c:
                v = [(a - c * b) % p for a, b in zip(v, row)]
        return not any(v)


@dataclass(frozen=True)
class FpSubspace:
    """A subspace of M_n(F_p), held as its unique RREF basis.

    Bases are tuples of flat row-major vectors; structural equality of
    two subspaces is therefore genuine equality of subspaces.
    """

    ctx: PrecisionContext
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ctx.k != 1:
            raise PreconditionError("subspaces live over F_p: context must have k=1")
        width = self.ctx.n * self.ctx.n
        last_piv = -1
        for row in self.basis:
            if len(row) != width:
                raise InvalidInput(f"basis row of length {len(row)}, expected {width}")
            piv = next((j for j, x in enumerate(row) if x), None)
            if piv is None or row[piv] != 1 or piv <= last_piv:
                raise InvalidInput("basis rows must be RREF with increasing pivots")
            last_piv = piv

    @staticmethod
    def zero(ctx: PrecisionContext) -> "FpSubspace":
        return FpSubspace(ctx, ())

    @staticmethod
    def from_builder(ctx: PrecisionContext, sb: SpanBuilder) -> "FpSubspace":
        return FpSubspace(ctx, sb.basis())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def builder(self) -> SpanBuilder:
        sb = SpanBuilder(self.ctx.p, self.ctx.n * self.ctx.n)
        for row in self.basis:
            sb.add(row)
        return sb

    def contains(self, value) -> bool:
        vec = value.entries if isinstance(value, ResidueMatrix) else value
        return self.builder().contains(vec)

    def __le__(self, other: "FpSubspace") -> bool:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"mixed contexts {self.ctx} and {other.ctx}")
        sb = other.builder()
        return all(sb.contains(row) for row in self.basis)

    def basis_matrices(self) -> tuple[ResidueMatrix, ...]:
        return tuple(ResidueMatrix(self.ctx, row) for row in self.basis)

    def __repr__(self) -> str:
        return f"FpSubspace(dim={self.dim} in M_{self.ctx.n}(F_{self.ctx.p}))"


def span(matrices: Iterable[ResidueMatrix], *, ctx: PrecisionContext | None = None) -> FpSubspace:
    """F_p-span of a family of matrices (empty family: zero subspace).

    The result is order-independent because the builder keeps a
    canonical RREF basis throughout.
    """
    mats = list(matrices)
    if ctx is None:
        if not mats:
            raise InvalidInput("span of an empty family needs an explicit ctx")
        ctx = mats[0].ctx
    if ctx.k != 1:
        raise PreconditionError("span is an F_p operation: context must have k=1")
    sb = SpanBuilder(ctx.p, ctx.n * ctx.n)
    for m in mats:
        if m.ctx != ctx:
            raise ContextMismatch(f"mixed contexts {m.ctx} and {ctx}")
        sb.add(m.entries)
    return FpSubspace.from_builder(ctx, sb)


def span_rows(ctx: PrecisionContext, arr: np.ndarray) -> FpSubspace:
    """Span of flat matrix rows given as an (m, n^2) array."""
    if ctx.k != 1:
        raise PreconditionError("span is an F_p operation: context must have k=1")
    sb = SpanBuilder(ctx.p, ctx.n * ctx.n)
    sb.add_rows(arr)
    return FpSubspace.from_builder(ctx, sb)


def subspace_leq(u: FpSubspace, v: FpSubspace) -> bool:
    return u <= v
