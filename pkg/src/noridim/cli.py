"""Command-line entry point with document-based I/O.

One subcommand per operation; inputs come from flags plus an optional
JSON document (--input FILE, or - for standard input) whose fields are
exactly the job parameters.  A flag and a document field that disagree
is an error rather than a precedence rule.  Every invocation emits one
JSON document (inputs echoed, results, checks, timing) with sorted keys
so identical jobs render byte-identical output; timing_ms stays null
unless --timing is passed, precisely to keep that property.

Exit codes: 0 success, 2 invalid input, 3 cap or bound exceeded,
4 invariant violation or failed checks, 5 internal error.

The CLI performs no arithmetic of its own: every number in the output
is produced by a module operation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import kernel
from . import verify as verify_mod
from .catalog import (
    borel_wordlength_diagnostic,
    instantiate,
    load_catalog,
    point_count_bounds_check,
)
from .errors import (
    BoundExceeded,
    CapExceeded,
    InvalidInput,
    InvariantViolation,
    NoridimError,
    NotALift,
    NotDivisible,
    NotInvertible,
    NotNilpotent,
    NotUnipotent,
    PreconditionError,
)
from .expcore import NilpotentMatrix, trunc_exp, trunc_log
from .fingroup import DEFAULT_CAP, enumerate_group, ndim, nilpotent_log_set, p_core
from .modring import PrecisionContext, ResidueMatrix
from .padic import filtration_report, run_lemma_trials

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_INVARIANT = 4
EXIT_INTERNAL = 5

_CENSUS_PRIMES = (5, 7)

# Per-command field schema: scalars resolve from flags and document,
# matrix-valued fields from the document only.
_FIELDS: dict[str, dict] = {
    "exp": {"required": {"n", "p", "matrix"}, "optional": {"k"}},
    "log": {"required": {"n", "p", "matrix"}, "optional": {"k"}},
    "ndim": {"required": {"n", "p", "generators"}, "optional": {"k", "cap"}},
    "enumerate": {"required": {"n", "p", "generators"}, "optional": {"k", "cap"}},
    "filtration": {
        "required": {"n", "p", "k", "generators"},
        "optional": {"cap", "declared_dim"},
    },
    "lemma-check": {"required": {"n", "p"}, "optional": {"k", "trials", "seed"}},
    "census": {"required": set(), "optional": {"p", "cap"}},
    "diagnostic": {
        "required": {"p"},
        "optional": {"n", "k", "cap", "entry", "nilpotents"},
    },
    "verify": {"required": set(), "optional": {"seed", "cap"}},
}

_SCALAR_KEYS = ("n", "p", "k", "cap", "seed", "declared_dim", "trials", "entry")
_LIST_KEYS = ("matrix", "generators", "nilpotents")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noridim",
        description="Finite matrix groups over Z/p^k: exp/log, dimensions, filtrations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "exp": "truncated exponential of a nilpotent matrix",
        "log": "truncated logarithm of a unipotent matrix",
        "ndim": "nilpotent-generation dimension of an enumerated group",
        "enumerate": "BFS closure of a generator list",
        "filtration": "congruence filtration report at precision k",
        "lemma-check": "seeded batch check of the lift behaviour",
        "census": "point-count bounds across the catalog",
        "diagnostic": "word-length diagnostic for one-parameter letters",
        "verify": "run the full acceptance battery",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--input", help="JSON job document; - for standard input")
        sp.add_argument("--output", help="write the output document here")
        sp.add_argument("--timing", action="store_true",
                        help="fill timing_ms (breaks byte-for-byte reproducibility)")
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--k", type=int)
        sp.add_argument("--cap", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--declared-dim", dest="declared_dim", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--entry", help="catalog entry name")
    return parser


def _load_document(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"input document is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidInput("input document must be a JSON object")
    return doc


def _check_int(job: dict, key: str, minimum: int, maximum: int | None = None) -> None:
    if key not in job:
        return
    v = job[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidInput(f"field {key} must be an integer, got {v!r}")
    if v < minimum or (maximum is not None and v > maximum):
        bound = f">= {minimum}" if maximum is None else f"in [{minimum}, {maximum}]"
        raise InvalidInput(f"field {key} must be {bound}, got {v}")


def _flat_int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in value
    ):
        raise InvalidInput(f"{what} must be a flat list of integers")
    return list(value)


def resolve_job(args: argparse.Namespace) -> dict:
    """Merge flags and document into one validated job dictionary."""
    command = args.command
    schema = _FIELDS[command]
    allowed = schema["required"] | schema["optional"]

    doc = _load_document(args.input) if args.input else {}
    if "command" in doc and doc["command"] != command:
        raise InvalidInput(
            f"document says command={doc['command']!r} but {command!r} was invoked"
        )
    for key in doc:
        if key != "command" and key not in allowed:
            raise InvalidInput(f"field {key!r} does not apply to {command!r}")

    job: dict = {"command": command}
    for key in _SCALAR_KEYS:
        flag = getattr(args, key, None)
        doc_val = doc.get(key)
        if flag is not None and key not in allowed:
            raise InvalidInput(f"flag --{key.replace('_', '-')} does not apply to {command!r}")
        if flag is not None and doc_val is not None and flag != doc_val:
            raise InvalidInput(
                f"conflict for {key}: flag says {flag!r}, document says {doc_val!r}"
            )
        value = flag if flag is not None else doc_val
        if value is not None:
            job[key] = value
    for key in _LIST_KEYS:
        if key in doc:
            job[key] = doc[key]

    # defaults
    if "k" in allowed and "k" not in job and command != "filtration":
        job["k"] = 1
    if "cap" in allowed and "cap" not in job and command != "verify":
        job["cap"] = DEFAULT_CAP
    if "seed" in allowed:
        job.setdefault("seed", 0)
    if "trials" in allowed:
        job.setdefault("trials", 100)

    missing = [key for key in schema["required"] if key not in job]
    if missing:
        raise InvalidInput(f"{command!r} is missing required field(s): {', '.join(missing)}")

    _check_int(job, "n", 1)
    _check_int(job, "p", 2)
    _check_int(job, "k", 1)
    _check_int(job, "cap", 1)
    _check_int(job, "seed", 0, 2**63 - 1)
    _check_int(job, "trials", 1)
    _check_int(job, "declared_dim", 0)
    if command in ("ndim", "diagnostic") and job.get("k", 1) != 1:
        raise InvalidInput(f"{command!r} is a mod-p computation: k must be 1")
    if command == "filtration" and job["k"] < 2:
        raise InvalidInput("a filtration needs k >= 2")
    if "entry" in job:
        names = list(load_catalog())
        if job["entry"] not in names:
            raise InvalidInput(
                f"unknown catalog entry {job['entry']!r}; known: {', '.join(names)}"
            )
    return job


def _context(job: dict) -> PrecisionContext:
    return PrecisionContext(job["n"], job["p"], job.get("k", 1))


def _matrix(job: dict, ctx: PrecisionContext, key: str) -> ResidueMatrix:
    flat = _flat_int_list(job[key], key)
    if len(flat) != ctx.n * ctx.n:
        raise InvalidInput(
            f"{key} must have n^2 = {ctx.n * ctx.n} entries, got {len(flat)}"
        )
    return ResidueMatrix(ctx, tuple(flat))


def _generators(job: dict, ctx: PrecisionContext) -> list[ResidueMatrix]:
    gens = job["generators"]
    if not isinstance(gens, list) or not gens:
        raise InvalidInput("generators must be a nonempty list of flat matrices")
    out = []
    for i, g in enumerate(gens):
        flat = _flat_int_list(g, f"generators[{i}]")
        if len(flat) != ctx.n * ctx.n:
            raise InvalidInput(
                f"generators[{i}] must have {ctx.n * ctx.n} entries, got {len(flat)}"
            )
        out.append(ResidueMatrix(ctx, tuple(flat)))
    return out


# -- per-command dispatch ----------------------------------------------


def _run_exp(job: dict):
    u = trunc_exp(_matrix(job, _context(job), "matrix"))
    return {"matrix": list(u.mat.entries)}, {"input_nilpotent": True}, False


def _run_log(job: dict):
    x = trunc_log(_matrix(job, _context(job), "matrix"))
    return {"matrix": list(x.mat.entries)}, {"input_unipotent": True}, False


def _run_ndim(job: dict):
    ctx = _context(job)
    G = enumerate_group(_generators(job, ctx), cap=job["cap"], ctx=ctx)
    rep = ndim(G)
    core = p_core(G)
    results = {
        "span_dim": rep.span_dim,
        "lie_dim": rep.lie_dim,
        "ndim": rep.ndim,
        "span_equals_lie": rep.span_equals_lie,
        "order": G.order,
        "p_core_order": core.order,
        "log_set_size": len(rep.log_set),
        "span_basis": [list(row) for row in rep.span.basis],
        "lie_basis": [list(row) for row in rep.algebra.carrier.basis],
    }
    return results, {"inverse_sample": True}, False


def _run_enumerate(job: dict):
    ctx = _context(job)
    G = enumerate_group(_generators(job, ctx), cap=job["cap"], ctx=ctx)
    results = {
        "order": G.order,
        "max_depth": G.max_depth,
        "generator_count": len(G.generators),
    }
    return results, {"inverse_sample": True}, False


def _run_filtration(job: dict):
    ctx = _context(job)
    rep = filtration_report(
        _generators(job, ctx), cap=job["cap"], declared_dim=job.get("declared_dim")
    )
    results = {
        "group_orders": list(rep.group_orders),
        "dims": list(rep.dims),
        "growth_profile": list(rep.growth_profile),
        "ndim_mod_p": rep.ndim_mod_p,
        "declared_dim": rep.declared_dim,
        "levels": [
            {"m": m, "dim": v.dim, "basis": [list(row) for row in v.basis]}
            for m, v in enumerate(rep.levels, start=1)
        ],
    }
    checks = {
        "inclusion_chain": True,
        "growth_law": True,
        "lower_bound_ndim": True,
        "upper_bound_declared": rep.declared_dim is not None,
    }
    return results, checks, False


def _run_lemma_check(job: dict):
    summary = run_lemma_trials(
        job["n"], job["p"], job.get("k", 1), job["trials"], job["seed"]
    )
    results = {
        "label": summary.label,
        "trials": summary.trials,
        "failures": summary.failures,
    }
    if summary.witness is not None:
        trial, x_entries, m_entries = summary.witness
        results["witness"] = {
            "trial": trial,
            "x": list(x_entries),
            "m": None if m_entries is None else list(m_entries),
        }
    return results, {"zero_failures": summary.ok}, not summary.ok


def _run_census(job: dict):
    primes = (job["p"],) if "p" in job else _CENSUS_PRIMES
    cap = job["cap"]
    rows = []
    all_ok = True
    for entry in load_catalog().values():
        for p in primes:
            base = {"entry": entry.name, "p": p}
            if not entry.is_admissible(p):
                rows.append({**base, "skipped": "inadmissible prime"})
                continue
            if "connected" not in entry.tags:
                rows.append({**base, "skipped": "not tagged connected"})
                continue
            known = entry.order_at(p)
            if known is not None and known > cap:
                rows.append(
                    {**base, "skipped": f"declared order {known} exceeds cap {cap}"}
                )
                continue
            res = point_count_bounds_check(entry, p, cap=cap)
            formula_ok = known is None or known == res.count
            all_ok = all_ok and res.ok and formula_ok
            rows.append(
                {
                    **base,
                    "count": res.count,
                    "lower": res.lower,
                    "upper": res.upper,
                    "bounds_ok": res.ok,
                    "formula_value": known,
                    "formula_ok": formula_ok,
                }
            )
    return {"rows": rows}, {"all_ok": all_ok}, not all_ok


def _run_diagnostic(job: dict):
    cap = job["cap"]
    if "entry" in job:
        if "nilpotents" in job:
            raise InvalidInput("give a catalog entry or explicit nilpotents, not both")
        entry = load_catalog()[job["entry"]]
        if "n" in job and job["n"] != entry.n:
            raise InvalidInput(
                f"entry {entry.name} has n={entry.n}, conflicting with n={job['n']}"
            )
        ctx = PrecisionContext(entry.n, job["p"], 1)
        G = enumerate_group(instantiate(entry, job["p"], 1), cap=cap)
        nils = nilpotent_log_set(G)
        source = f"log set of {entry.name} mod {job['p']}"
    elif "nilpotents" in job:
        if "n" not in job:
            raise InvalidInput("explicit nilpotents need the field n")
        ctx = PrecisionContext(job["n"], job["p"], 1)
        nils = []
        for i, row in enumerate(job["nilpotents"]):
            flat = _flat_int_list(row, f"nilpotents[{i}]")
            if len(flat) != ctx.n * ctx.n:
                raise InvalidInput(
                    f"nilpotents[{i}] must have {ctx.n * ctx.n} entries"
                )
            nils.append(NilpotentMatrix(ResidueMatrix(ctx, tuple(flat))))
        source = "explicit nilpotent family"
    else:
        raise InvalidInput("diagnostic needs a catalog entry or a nilpotents list")
    diag = borel_wordlength_diagnostic(nils, cap, ctx=ctx)
    results = {
        "source": source,
        "max_bfs_depth": diag.max_bfs_depth,
        "budget": diag.budget,
        "group_order": diag.group_order,
        "letter_count": diag.letter_count,
        "family_size": len(nils),
    }
    # data only: the generation bound is not a rational-point guarantee
    return results, {}, False


def _run_verify(job: dict):
    rows = verify_mod.run_verify(job["seed"], job.get("cap"))
    print(verify_mod.format_table(rows), file=sys.stderr)
    passed = sum(r.passed for r in rows)
    results = {
        "criteria": [r.as_dict() for r in rows],
        "passed": passed,
        "failed": len(rows) - passed,
        "backend": kernel.BACKEND,
    }
    all_ok = passed == len(rows)
    return results, {"all_criteria": all_ok}, not all_ok


_DISPATCH = {
    "exp": _run_exp,
    "log": _run_log,
    "ndim": _run_ndim,
    "enumerate": _run_enumerate,
    "filtration": _run_filtration,
    "lemma-check": _run_lemma_check,
    "census": _run_census,
    "diagnostic": _run_diagnostic,
    "verify": _run_verify,
}


def _emit(args: argparse.Namespace, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_exit(args, command: str, job: dict | None, exc: Exception, code: int) -> int:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": {k: v for k, v in (job or {}).items() if k != "command"},
        "status": "error",
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        },
    }
    witness = getattr(exc, "witness", None)
    if witness is not None:
        doc["error"]["witness"] = repr(witness)
    _emit(args, doc)
    print(f"noridim {command}: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command
    job = None
    started = time.perf_counter()
    try:
        job = resolve_job(args)
        results, checks, failed = _DISPATCH[command](job)
    except (
        InvalidInput,
        PreconditionError,
        NotNilpotent,
        NotUnipotent,
        NotInvertible,
        NotDivisible,
        NotALift,
        OSError,
    ) as exc:
        return _error_exit(args, command, job, exc, EXIT_INVALID)
    except (CapExceeded, BoundExceeded) as exc:
        return _error_exit(args, command, job, exc, EXIT_CAP)
    except InvariantViolation as exc:
        return _error_exit(args, command, job, exc, EXIT_INVARIANT)
    except NoridimError as exc:
        return _error_exit(args, command, job, exc, EXIT_INTERNAL)
    except Exception as exc:  # anything else is a bug, not bad input
        return _error_exit(args, command, job, exc, EXIT_INTERNAL)

    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": {k: v for k, v in job.items() if k != "command"},
        "results": results,
        "checks": checks,
        "timing_ms": round((time.perf_counter() - started) * 1000.0, 3)
        if args.timing
        else None,
        "status": "failed" if failed else "ok",
    }
    _emit(args, doc)
    return EXIT_INVARIANT if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
