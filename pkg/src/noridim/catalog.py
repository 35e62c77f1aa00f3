"""Curated example groups with declared ground-truth metadata.

Entries carry the dimension of the ambient algebraic group as data, not
computation: Zariski closures are out of algorithmic reach here, so the
dimension inequality is tested against declared truth (each declaration
carries a one-line justification in the data file).  Order formulas are
advisory in the same spirit: enumeration always counts, the formula is
compared against the count and a mismatch indicts the entry.

The data lives in data/catalog.json next to this module; format:
a list of entries with name, n, row-major integer generator matrices
(the string "r" stands for the smallest generator of the unit group
mod p), known_dim, expected_ndim (an integer, "equals_known_dim" or
"strictly_less"), frozen_ndim (a computed value kept as a regression
check), an optional order_fn polynomial in p, tags, bad_primes, and an
optional max_k precision limit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Sequence

from .errors import InvalidInput, PreconditionError
from .expcore import NilpotentMatrix, trunc_exp
from .fingroup import DEFAULT_CAP, EnumeratedGroup, enumerate_group
from .modring import PrecisionContext, ResidueMatrix, is_prime


class InadmissiblePrime(PreconditionError):
    """The requested prime is outside the entry's admissible range."""


def smallest_primitive_root(p: int) -> int:
    """Least generator of (Z/p)^*, by checking maximal order directly."""
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if p == 2:
        return 1
    # prime factors of p - 1
    m = p - 1
    factors = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            factors.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        factors.append(m)
    for a in range(2, p):
        if all(pow(a, (p - 1) // q, p) != 1 for q in factors):
            return a
    raise InvalidInput(f"no primitive root found mod {p}")  # unreachable


@dataclass(frozen=True)
class CatalogEntry:
    """One example group: symbolic generators plus declared metadata."""

    name: str
    n: int
    generators: tuple[tuple[int | str, ...], ...]
    known_dim: int
    dim_note: str
    expected_ndim: int | str
    frozen_ndim: int | None
    order_fn: str | None
    tags: tuple[str, ...]
    bad_primes: tuple[int, ...]
    max_k: int | None
    note: str

    def __post_init__(self):
        nn = self.n * self.n
        for g in self.generators:
            if len(g) != nn:
                raise InvalidInput(
                    f"{self.name}: generator of length {len(g)}, expected {nn}"
                )
        if isinstance(self.expected_ndim, int):
            if not (0 <= self.expected_ndim <= self.known_dim):
                raise InvalidInput(f"{self.name}: expected_ndim above known_dim")
        elif self.expected_ndim not in ("equals_known_dim", "strictly_less"):
            raise InvalidInput(
                f"{self.name}: bad expected_ndim {self.expected_ndim!r}"
            )
        if self.frozen_ndim is not None:
            if not (0 <= self.frozen_ndim <= self.known_dim):
                raise InvalidInput(f"{self.name}: frozen_ndim above known_dim")
            if self.expected_ndim == "strictly_less" and self.frozen_ndim >= self.known_dim:
                raise InvalidInput(f"{self.name}: frozen_ndim contradicts strictness")
            if self.expected_ndim == "equals_known_dim" and self.frozen_ndim != self.known_dim:
                raise InvalidInput(f"{self.name}: frozen_ndim contradicts equality")
            if isinstance(self.expected_ndim, int) and self.frozen_ndim != self.expected_ndim:
                raise InvalidInput(f"{self.name}: frozen_ndim contradicts expected_ndim")

    def is_admissible(self, p: int) -> bool:
        return is_prime(p) and p >= self.n and p not in self.bad_primes

    def order_at(self, p: int) -> int | None:
        if self.order_fn is None:
            return None
        return int(eval(self.order_fn, {"__builtins__": {}}, {"p": p}))


@lru_cache(maxsize=1)
def load_catalog() -> dict[str, CatalogEntry]:
    """The shipped catalog, keyed by name, in file order."""
    raw = json.loads(
        resources.files("noridim").joinpath("data/catalog.json").read_text()
    )
    entries = {}
    for item in raw["entries"]:
        entry = CatalogEntry(
            name=item["name"],
            n=item["n"],
            generators=tuple(tuple(v for v in g) for g in item["generators"]),
            known_dim=item["known_dim"],
            dim_note=item["dim_note"],
            expected_ndim=item["expected_ndim"],
            frozen_ndim=item["frozen_ndim"],
            order_fn=item["order_fn"],
            tags=tuple(item["tags"]),
            bad_primes=tuple(item["bad_primes"]),
            max_k=item["max_k"],
            note=item["note"],
        )
        if entry.name in entries:
            raise InvalidInput(f"duplicate catalog entry {entry.name}")
        entries[entry.name] = entry
    return entries


def instantiate(entry: CatalogEntry, p: int, k: int = 1) -> list[ResidueMatrix]:
    """Reduce the entry's symbolic generators into M_n(Z/p^k).

    Admissibility is p prime, p >= n and p outside the entry's bad
    primes (the lift statement's stronger p >= 2n range is enforced
    where that statement is used, not here: the example groups are
    deliberately usable at small p).  Every generator is checked to be
    invertible after substitution.
    """
    if not entry.is_admissible(p):
        raise InadmissiblePrime(f"p={p} is not admissible for entry {entry.name}")
    if entry.max_k is not None and k > entry.max_k:
        raise PreconditionError(
            f"entry {entry.name} is limited to precision k <= {entry.max_k}"
        )
    ctx = PrecisionContext(entry.n, p, k)
    root = smallest_primitive_root(p)
    mats = []
    for g in entry.generators:
        ent = tuple(root if v == "r" else int(v) for v in g)
        m = ResidueMatrix(ctx, ent)
        if m.det_mod_p() == 0:
            raise InadmissiblePrime(
                f"entry {entry.name}: generator singular mod {p}"
            )
        mats.append(m)
    return mats


@dataclass(frozen=True)
class PointCountResult:
    """BFS point count of an entry against the (p-1)^d..(p+1)^d window."""

    entry: str
    p: int
    count: int
    lower: int
    upper: int
    ok: bool


def point_count_bounds_check(
    entry: CatalogEntry, p: int, cap: int = DEFAULT_CAP
) -> PointCountResult:
    """Count points mod p and compare with the declared-dimension window."""
    if "connected" not in entry.tags:
        raise PreconditionError(
            f"point-count bounds assume a connected group; {entry.name} is not tagged so"
        )
    group = enumerate_group(instantiate(entry, p, 1), cap=cap)
    lower = (p - 1) ** entry.known_dim
    upper = (p + 1) ** entry.known_dim
    return PointCountResult(
        entry=entry.name,
        p=p,
        count=group.order,
        lower=lower,
        upper=upper,
        ok=lower <= group.order <= upper,
    )


@dataclass(frozen=True)
class WordLengthDiagnostic:
    """Observed BFS depth in one-parameter letters, beside the budget.

    Data only, no verdict: the classical generation bound lives at the
    variety level and rational points may genuinely need more letters.
    """

    max_bfs_depth: int
    budget: int
    group_order: int
    letter_count: int


def borel_wordlength_diagnostic(
    nilpotents: Sequence[NilpotentMatrix | ResidueMatrix],
    cap: int = DEFAULT_CAP,
    *,
    ctx: PrecisionContext | None = None,
) -> WordLengthDiagnostic:
    """Depth of the BFS over all letters exp(t x), x in N, t in F_p.

    The budget is 2n^2 letters drawn from an n^2-element pool, i.e.
    2n^2 * min(#nonzero N, n^2); with a full pool it is the classical
    2n^4 figure.
    """
    mats = []
    for x in nilpotents:
        nil = x if isinstance(x, NilpotentMatrix) else NilpotentMatrix(x)
        if ctx is None:
            ctx = nil.ctx
        if not nil.mat.is_zero():
            mats.append(nil)
    if ctx is None:
        raise InvalidInput("an empty family needs an explicit ctx")
    if ctx.k != 1:
        raise PreconditionError("the diagnostic runs mod p: need k=1")
    budget = 2 * ctx.n**2 * min(len(mats), ctx.n**2)
    if not mats:
        return WordLengthDiagnostic(0, 0, 1, 0)

    letters: list[ResidueMatrix] = []
    seen = set()
    for nil in mats:
        for t in range(1, ctx.p):
            u = trunc_exp(NilpotentMatrix(nil.mat.scale(t))).mat
            if u.entries not in seen:
                seen.add(u.entries)
                letters.append(u)
    group = enumerate_group(letters, cap=cap, ctx=ctx)
    depth = group.max_depth
    assert depth is not None  # fresh BFS always carries depth data
    return WordLengthDiagnostic(
        max_bfs_depth=depth,
        budget=budget,
        group_order=group.order,
        letter_count=len(letters),
    )
