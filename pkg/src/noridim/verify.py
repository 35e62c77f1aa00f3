"""The acceptance battery: ten numbered criteria, run end to end.

Each criterion produces a row (expected, observed, verdict) built only
from deterministic values; wall-clock measurements feed the per-row
time verdict but never appear in the document, so two runs with the
same seed render byte-identical documents.  Criterion 10 is exactly
that property: the battery is rebuilt from scratch and the two
renderings are compared.

A cap override is threaded through every enumeration so that budget
semantics stay visible: with a tiny cap the affected criteria fail
loudly with CapExceeded in the observed column rather than being
skipped silently.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from itertools import product

from . import kernel
from .catalog import (
    CatalogEntry,
    instantiate,
    load_catalog,
    point_count_bounds_check,
)
from .errors import CapExceeded, NoridimError
from .expcore import is_nilpotent, is_unipotent, has_order_p, trunc_exp, trunc_log
from .fingroup import (
    DEFAULT_CAP,
    EnumeratedGroup,
    enumerate_group,
    exp_generated_subgroup,
    ndim,
    nilpotent_log_set,
    p_core,
)
from .modring import PrecisionContext, ResidueMatrix
from .padic import filtration_report, run_congruence_trials, run_lemma_trials

# |SL_3(F_7)| = 5,630,688 sits above the default cap; the catalog-wide
# criterion needs it enumerated, so that one combination gets its own
# budget when no explicit override is in force.
_SL3_AT_7_CAP = 6_500_000


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    expected: str
    observed: str
    ok: bool
    time_limit_s: float | None
    time_ok: bool

    @property
    def passed(self) -> bool:
        return self.ok and self.time_ok

    def as_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "expected": self.expected,
            "observed": self.observed,
            "ok": self.ok,
            "time_limit_s": self.time_limit_s,
            "time_ok": self.time_ok,
            "verdict": "PASS" if self.passed else "FAIL",
        }


class _EnumCache:
    """Catalog enumerations shared across criteria within one battery."""

    def __init__(self, cap_override: int | None):
        self.cap_override = cap_override
        self._groups: dict[tuple, EnumeratedGroup] = {}

    def cap_for(self, entry: CatalogEntry, p: int) -> int:
        if self.cap_override is not None:
            return self.cap_override
        if entry.name == "sl3" and p == 7:
            return _SL3_AT_7_CAP
        return DEFAULT_CAP

    def group(self, entry: CatalogEntry, p: int, k: int = 1) -> EnumeratedGroup:
        cap = self.cap_for(entry, p)
        key = (entry.name, p, k, cap)
        if key not in self._groups:
            self._groups[key] = enumerate_group(
                instantiate(entry, p, k), cap=cap
            )
        return self._groups[key]


def _row(number, title, expected, limit, fn) -> CriterionResult:
    """Run one criterion body, catching expected failure modes."""
    start = time.perf_counter()
    try:
        ok, observed = fn()
    except CapExceeded as exc:
        ok, observed = False, f"CapExceeded: {exc}"
    except NoridimError as exc:
        ok, observed = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    return CriterionResult(
        number=number,
        title=title,
        expected=expected,
        observed=observed,
        ok=ok,
        time_limit_s=limit,
        time_ok=(limit is None) or (elapsed < limit),
    )


def _all_matrices(ctx: PrecisionContext):
    nn = ctx.n * ctx.n
    for combo in product(range(ctx.modulus), repeat=nn):
        yield ResidueMatrix(ctx, combo)


def _crit_1() -> tuple[bool, str]:
    ctx = PrecisionContext(2, 5, 1)
    nils = [m for m in _all_matrices(ctx) if is_nilpotent(m)]
    unis = [m for m in _all_matrices(ctx) if is_unipotent(m)]
    log_exp = sum(1 for x in nils if trunc_log(trunc_exp(x)).mat == x)
    exp_log = sum(1 for u in unis if trunc_exp(trunc_log(u)).mat == u)
    images = {trunc_exp(x).mat.entries for x in nils}
    ok = (
        len(nils) == 25
        and len(unis) == 25
        and log_exp == 25
        and exp_log == 25
        and images == {u.entries for u in unis}
    )
    observed = (
        f"nilpotents={len(nils)}, unipotents={len(unis)}, "
        f"log(exp(x))=x on {log_exp}/25, exp(log(u))=u on {exp_log}/25, "
        f"exp image {'=' if images == {u.entries for u in unis} else '!='} unipotents"
    )
    return ok, observed


def _crit_2() -> tuple[bool, str]:
    ctx = PrecisionContext(2, 5, 1)
    ident = ResidueMatrix.identity(ctx)
    invertible = [m for m in _all_matrices(ctx) if m.det_mod_p() != 0]
    mismatches = sum(
        1
        for g in invertible
        if has_order_p(g) != (is_nilpotent(g - ident) and g != ident)
    )
    ok = len(invertible) == 480 and mismatches == 0
    return ok, f"group size {len(invertible)}, mismatches {mismatches}/480"


def _crit_3(cache: _EnumCache) -> tuple[bool, str]:
    cat = load_catalog()
    parts = []
    ok = True
    for name, p, want in [("sl2", 5, 3), ("sl2", 7, 3), ("sl2", 11, 3),
                          ("heisenberg", 5, 3), ("torus1", 5, 0)]:
        rep = ndim(cache.group(cat[name], p))
        good = rep.ndim == want
        if name in ("sl2", "heisenberg"):
            good = good and rep.span_equals_lie
        ok = ok and good
        parts.append(f"{name}@{p}: ndim={rep.ndim} span={rep.span_dim}")
    return ok, "; ".join(parts)


def _crit_4(cache: _EnumCache) -> tuple[bool, str]:
    cat = load_catalog()
    parts = []
    ok = True
    for entry in cat.values():
        for p in (5, 7):
            if not entry.is_admissible(p):
                ok = False
                parts.append(f"{entry.name}@{p}: inadmissible")
                continue
            value = ndim(cache.group(entry, p)).ndim
            good = value <= entry.known_dim
            if entry.name in ("torus1", "borel2"):
                good = good and value < entry.known_dim
            if entry.expected_ndim == "equals_known_dim":
                good = good and value == entry.known_dim
            elif entry.expected_ndim == "strictly_less":
                good = good and value < entry.known_dim
            elif isinstance(entry.expected_ndim, int):
                good = good and value == entry.expected_ndim
            ok = ok and good
            rel = "<" if value < entry.known_dim else "="
            parts.append(f"{entry.name}@{p}: {value}{rel}{entry.known_dim}")
    return ok, "; ".join(parts)


def _crit_5(cache: _EnumCache) -> tuple[bool, str]:
    cat = load_catalog()
    cap = cache.cap_override if cache.cap_override is not None else DEFAULT_CAP

    smoke_start = time.perf_counter()
    smoke = filtration_report(instantiate(cat["sl2"], 5, 2), cap=cap, declared_dim=3)
    smoke_s = time.perf_counter() - smoke_start
    smoke_ok = smoke.dims == (3,) and smoke.group_orders == (120, 15000)

    full = filtration_report(instantiate(cat["sl2"], 5, 3), cap=cap, declared_dim=3)
    chain = full.levels[0] <= full.levels[1]
    full_ok = (
        full.dims == (3, 3)
        and full.group_orders == (120, 15000, 1875000)
        and full.growth_profile == (3, 3)
        and chain
    )
    ok = smoke_ok and full_ok and smoke_s < 5.0
    observed = (
        f"mod 5^2: dims={smoke.dims} orders={smoke.group_orders} "
        f"smoke_under_5s={smoke_s < 5.0}; "
        f"mod 5^3: dims={full.dims} orders={full.group_orders} "
        f"growth={full.growth_profile} V1<=V2={chain}"
    )
    return ok, observed


def _crit_6(seed: int) -> tuple[bool, str]:
    a = run_congruence_trials(2, 5, 4, (1, 2), 100, seed)
    b = run_congruence_trials(3, 7, 4, (1, 2), 100, seed)
    ok = a.failures == 0 and b.failures == 0
    return ok, (
        f"n=2 p=5: {a.failures}/{a.trials} failures; "
        f"n=3 p=7: {b.failures}/{b.trials} failures"
    )


def _crit_7(seed: int) -> tuple[bool, str]:
    total = failures = 0
    for n, p, k in product((2, 3), (7, 11), (1, 2)):
        s = run_lemma_trials(n, p, k, 25, seed)
        total += s.trials
        failures += s.failures
    return failures == 0, f"{failures}/{total} failures over 8 parameter blocks"


def _crit_8(cache: _EnumCache) -> tuple[bool, str]:
    cat = load_catalog()
    parts = []
    ok = True
    for name in ("sl2", "heisenberg", "gl2", "torus1"):
        G = cache.group(cat[name], 5)
        core = p_core(G)
        rebuilt = exp_generated_subgroup(
            nilpotent_log_set(G), cap=G.cap, ctx=G.ctx
        )
        same = core.same_elements(rebuilt)
        ok = ok and same
        parts.append(f"{name}: |core|={core.order} |exp-gen|={rebuilt.order} equal={same}")
    return ok, "; ".join(parts)


def _crit_9(cache: _EnumCache) -> tuple[bool, str]:
    cat = load_catalog()
    parts = []
    ok = True
    for name in ("sl2", "heisenberg", "torus1"):
        entry = cat[name]
        for p in (5, 7):
            res = point_count_bounds_check(entry, p, cap=cache.cap_for(entry, p))
            good = res.ok
            if name == "sl2":
                good = good and res.count == p * (p**2 - 1)
            elif name == "heisenberg":
                good = good and res.count == p**3
            ok = ok and good
            parts.append(
                f"{name}@{p}: {res.lower}<={res.count}<={res.upper} {'ok' if good else 'BAD'}"
            )
    return ok, "; ".join(parts)


def run_battery(seed: int = 0, cap: int | None = None) -> list[CriterionResult]:
    """Criteria 1 through 9, sharing one enumeration cache."""
    cache = _EnumCache(cap)
    return [
        _row(1, "exp/log bijection on all of M_2(F_5)",
             "25 nilpotents, 25 unipotents, both round trips exact",
             1.0, _crit_1),
        _row(2, "order p iff unipotent and nontrivial, all of GL_2(F_5)",
             "480 elements, 0 mismatches", 1.0, _crit_2),
        _row(3, "nilpotent-generation dimension on the catalog",
             "sl2: 3 at p=5,7,11; heisenberg: 3; torus1: 0; span=lie on sl2/heisenberg",
             30.0, lambda: _crit_3(cache)),
        _row(4, "dimension inequality across the catalog",
             "ndim <= known_dim at p=5,7 for every entry; strict for torus1, borel2",
             None, lambda: _crit_4(cache)),
        _row(5, "filtration chain mod 5^2 and 5^3",
             "dims (3,3), orders (120, 15000, 1875000), growth (3,3), V1<=V2; smoke < 5 s",
             120.0, lambda: _crit_5(cache)),
        _row(6, "power congruence batches",
             "0 failures over 100 trials x m in {1,2} in M_2(Z/5^4) and M_3(Z/7^4)",
             None, lambda: _crit_6(seed)),
        _row(7, "lift behaviour of perturbed exponentials",
             "0 failures over 200 trials, n in {2,3}, p in {7,11}, k in {1,2}",
             None, lambda: _crit_7(seed)),
        _row(8, "p-core equals the exp-generated subgroup of the log set",
             "set equality for sl2, heisenberg, gl2, torus1 at p=5",
             None, lambda: _crit_8(cache)),
        _row(9, "point counts within the declared-dimension window",
             "counts in [(p-1)^d, (p+1)^d] at p=5,7; sl2 = p(p^2-1), heisenberg = p^3",
             None, lambda: _crit_9(cache)),
    ]


def render_rows(rows: list[CriterionResult]) -> str:
    """Canonical rendering used for the determinism comparison."""
    return json.dumps([r.as_dict() for r in rows], indent=2, sort_keys=True)


def run_verify(seed: int = 0, cap: int | None = None) -> list[CriterionResult]:
    """The full ten-row battery, determinism row included.

    The first nine criteria are computed twice, each pass with a fresh
    cache, and their canonical renderings are compared byte for byte.
    The rows of the first pass are what gets reported.
    """
    rows = run_battery(seed, cap)
    first = render_rows(rows)
    second = render_rows(run_battery(seed, cap))
    identical = first == second
    rows.append(
        CriterionResult(
            number=10,
            title="battery determinism",
            expected="two fresh runs render byte-identical rows",
            observed=f"identical={identical}, rendering_bytes={len(first)}",
            ok=identical,
            time_limit_s=None,
            time_ok=True,
        )
    )
    return rows


def format_table(rows: list[CriterionResult]) -> str:
    """Human-readable table: one line per criterion."""
    lines = [f"backend: {kernel.BACKEND}"]
    for r in rows:
        mark = "PASS" if r.passed else "FAIL"
        note = "" if r.time_ok else " [over time limit]"
        lines.append(f"[{mark}] {r.number:2d} {r.title}{note}")
        lines.append(f"         expected: {r.expected}")
        lines.append(f"         observed: {r.observed}")
    passed = sum(r.passed for r in rows)
    lines.append(f"{passed}/{len(rows)} criteria passed")
    return "\n".join(lines)
